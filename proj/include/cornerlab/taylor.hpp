#pragma once

#include <Eigen/Core>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cornerlab {

/// Truncated Taylor series about a point x0.
///
/// Stores normalized coefficients c_k = f^(k)(x0) / k! for k = 0..order().
/// `valid` counts the leading coefficients that are finite and meaningful;
/// a function such as x^0.3 expanded at 0 has valid = 1 (only its value).
template <typename Scalar>
struct Taylor {
  using Coeffs = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Coeffs c;
  int valid = 0;

  Taylor() = default;
  explicit Taylor(int order) : c(Coeffs::Zero(order + 1)), valid(order + 1) {}

  static Taylor constant(Scalar value, int order) {
    Taylor t(order);
    t.c(0) = value;
    return t;
  }
  static Taylor variable(Scalar x0, int order) {
    Taylor t(order);
    t.c(0) = x0;
    if (order >= 1) t.c(1) = Scalar(1);
    return t;
  }

  int order() const { return static_cast<int>(c.size()) - 1; }

  /// k-th derivative at x0.
  Scalar derivative(int k) const {
    Scalar f = Scalar(1);
    for (int i = 2; i <= k; ++i) f *= Scalar(i);
    return c(k) * f;
  }
};

template <typename Scalar>
Taylor<Scalar> operator+(const Taylor<Scalar>& a, const Taylor<Scalar>& b) {
  Taylor<Scalar> r;
  r.c = a.c + b.c;
  r.valid = std::min(a.valid, b.valid);
  return r;
}

template <typename Scalar>
Taylor<Scalar> operator-(const Taylor<Scalar>& a, const Taylor<Scalar>& b) {
  Taylor<Scalar> r;
  r.c = a.c - b.c;
  r.valid = std::min(a.valid, b.valid);
  return r;
}

template <typename Scalar>
Taylor<Scalar> operator-(const Taylor<Scalar>& a) {
  Taylor<Scalar> r = a;
  r.c = -a.c;
  return r;
}

template <typename Scalar>
Taylor<Scalar> operator*(Scalar s, const Taylor<Scalar>& a) {
  Taylor<Scalar> r = a;
  r.c *= s;
  return r;
}

template <typename Scalar>
Taylor<Scalar> operator*(const Taylor<Scalar>& a, const Taylor<Scalar>& b) {
  const int n = a.order();
  Taylor<Scalar> r(n);
  for (int k = 0; k <= n; ++k) {
    Scalar acc = Scalar(0);
    for (int j = 0; j <= k; ++j) acc += a.c(j) * b.c(k - j);
    r.c(k) = acc;
  }
  r.valid = std::min(a.valid, b.valid);
  return r;
}

template <typename Scalar>
Taylor<Scalar> operator/(const Taylor<Scalar>& a, const Taylor<Scalar>& b) {
  const int n = a.order();
  Taylor<Scalar> r(n);
  for (int k = 0; k <= n; ++k) {
    Scalar acc = a.c(k);
    for (int j = 1; j <= k; ++j) acc -= b.c(j) * r.c(k - j);
    r.c(k) = acc / b.c(0);
  }
  r.valid = std::min(a.valid, b.valid);
  if (b.c(0) == Scalar(0)) r.valid = 0;
  return r;
}

template <typename Scalar>
Taylor<Scalar> exp(const Taylor<Scalar>& a) {
  const int n = a.order();
  Taylor<Scalar> r(n);
  r.c(0) = std::exp(a.c(0));
  for (int k = 1; k <= n; ++k) {
    Scalar acc = Scalar(0);
    for (int j = 1; j <= k; ++j) acc += Scalar(j) * a.c(j) * r.c(k - j);
    r.c(k) = acc / Scalar(k);
  }
  r.valid = a.valid;
  return r;
}

template <typename Scalar>
Taylor<Scalar> log(const Taylor<Scalar>& a) {
  const int n = a.order();
  Taylor<Scalar> r(n);
  r.c(0) = std::log(a.c(0));
  for (int k = 1; k <= n; ++k) {
    Scalar acc = Scalar(k) * a.c(k);
    for (int j = 1; j < k; ++j) acc -= Scalar(j) * r.c(j) * a.c(k - j);
    r.c(k) = acc / (Scalar(k) * a.c(0));
  }
  r.valid = a.c(0) > Scalar(0) ? a.valid : 0;
  return r;
}

/// Joint sine/cosine recursion.
template <typename Scalar>
std::pair<Taylor<Scalar>, Taylor<Scalar>> sincos(const Taylor<Scalar>& a) {
  const int n = a.order();
  Taylor<Scalar> s(n), co(n);
  s.c(0) = std::sin(a.c(0));
  co.c(0) = std::cos(a.c(0));
  for (int k = 1; k <= n; ++k) {
    Scalar as = Scalar(0), ac = Scalar(0);
    for (int j = 1; j <= k; ++j) {
      as += Scalar(j) * a.c(j) * co.c(k - j);
      ac -= Scalar(j) * a.c(j) * s.c(k - j);
    }
    s.c(k) = as / Scalar(k);
    co.c(k) = ac / Scalar(k);
  }
  s.valid = co.valid = a.valid;
  return {s, co};
}

/// a^p for a(x0) > 0; integer p also handles a(x0) <= 0 by repeated products.
template <typename Scalar>
Taylor<Scalar> pow(const Taylor<Scalar>& a, Scalar p) {
  const int n = a.order();
  const bool integral = p >= Scalar(0) && std::floor(p) == p;
  if (integral && (a.c(0) <= Scalar(0) || p <= Scalar(4))) {
    Taylor<Scalar> r = Taylor<Scalar>::constant(Scalar(1), n);
    r.valid = a.valid;
    for (int i = 0; i < static_cast<int>(p); ++i) r = r * a;
    return r;
  }
  Taylor<Scalar> r(n);
  if (a.c(0) <= Scalar(0)) {
    r.c.setConstant(std::numeric_limits<Scalar>::quiet_NaN());
    r.valid = 0;
    return r;
  }
  r.c(0) = std::pow(a.c(0), p);
  for (int k = 1; k <= n; ++k) {
    Scalar acc = Scalar(0);
    for (int j = 1; j <= k; ++j) acc += (p * Scalar(j) - Scalar(k - j)) * a.c(j) * r.c(k - j);
    r.c(k) = acc / (Scalar(k) * a.c(0));
  }
  r.valid = a.valid;
  return r;
}

}  // namespace cornerlab
