#include "cornerlab/numerics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace cornerlab {

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::finite: return "finite";
    case Verdict::divergent: return "divergent";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

VerdictPolicy& default_policy() {
  static VerdictPolicy policy;
  return policy;
}

namespace num {

double binomial(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return std::round(r);
}

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

int next_pow2(int n) {
  int p = 1;
  while (p < n) p <<= 1;
  return p;
}

Eigen::MatrixXd fornberg_weights(double z, const Eigen::VectorXd& x, int m) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, m + 1);
  double c1 = 1.0, c4 = x(0) - z;
  c(0, 0) = 1.0;
  for (int i = 1; i < n; ++i) {
    const int mn = std::min(i, m);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x(i) - z;
    for (int j = 0; j < i; ++j) {
      const double c3 = x(i) - x(j);
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k) c(i, k) = c1 * (k * c(i - 1, k - 1) - c5 * c(i - 1, k)) / c2;
        c(i, 0) = -c1 * c5 * c(i - 1, 0) / c2;
      }
      for (int k = mn; k >= 1; --k) c(j, k) = (c4 * c(j, k) - k * c(j, k - 1)) / c3;
      c(j, 0) = c4 * c(j, 0) / c3;
    }
    c1 = c2;
  }
  return c;
}

namespace {

void fd_once(const double* u, long stride, int n, double h, double* out, long ostride) {
  if (n < 5) throw std::invalid_argument("fd_derivative: need at least 5 samples");
  auto U = [&](int i) { return u[i * stride]; };
  const int N = n - 1;
  out[0] = (-3.0 * U(0) + 4.0 * U(1) - U(2)) / (2.0 * h);
  out[N * ostride] = (3.0 * U(N) - 4.0 * U(N - 1) + U(N - 2)) / (2.0 * h);
  out[1 * ostride] = (U(2) - U(0)) / (2.0 * h);
  out[(N - 1) * ostride] = (U(N) - U(N - 2)) / (2.0 * h);
  for (int i = 2; i <= N - 2; ++i)
    out[i * ostride] = (-U(i + 2) + 8.0 * U(i + 1) - 8.0 * U(i - 1) + U(i - 2)) / (12.0 * h);
}

}  // namespace

Eigen::VectorXd fd_derivative(const Eigen::VectorXd& u, double h, int order) {
  Eigen::VectorXd cur = u, next(u.size());
  for (int o = 0; o < order; ++o) {
    fd_once(cur.data(), 1, static_cast<int>(cur.size()), h, next.data(), 1);
    cur.swap(next);
  }
  return cur;
}

Eigen::MatrixXd fd_derivative_rows(const Eigen::MatrixXd& u, double h, int order) {
  Eigen::MatrixXd cur = u, next(u.rows(), u.cols());
  for (int o = 0; o < order; ++o) {
    for (Eigen::Index c = 0; c < u.cols(); ++c)
      fd_once(cur.col(c).data(), 1, static_cast<int>(u.rows()), h, next.col(c).data(), 1);
    cur.swap(next);
  }
  return cur;
}

Eigen::MatrixXd fd_derivative_cols(const Eigen::MatrixXd& u, double h, int order) {
  Eigen::MatrixXd cur = u, next(u.rows(), u.cols());
  const long ld = static_cast<long>(u.rows());
  for (int o = 0; o < order; ++o) {
    for (Eigen::Index r = 0; r < u.rows(); ++r)
      fd_once(cur.data() + r, ld, static_cast<int>(u.cols()), h, next.data() + r, ld);
    cur.swap(next);
  }
  return cur;
}

const Quadrature& gauss_legendre(int n) {
  static std::map<int, Quadrature> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Quadrature q{Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    q.nodes(i) = x;
    q.weights(i) = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(q)).first->second;
}

double trapezoid(const Eigen::VectorXd& v, double h) {
  if (v.size() < 2) return 0.0;
  return h * (v.sum() - 0.5 * (v(0) + v(v.size() - 1)));
}

Eigen::VectorXd trapezoid_weights(int n, double h) {
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
  if (n > 0) {
    w(0) *= 0.5;
    w(n - 1) *= 0.5;
  }
  return w;
}

double cubic_interp(const Eigen::VectorXd& v, double h, double x, double x0) {
  const int n = static_cast<int>(v.size());
  const double s = (x - x0) / h;
  int i = static_cast<int>(std::floor(s)) - 1;
  i = std::clamp(i, 0, std::max(0, n - 4));
  double acc = 0.0;
  for (int a = 0; a < 4 && i + a < n; ++a) {
    double l = 1.0;
    for (int b = 0; b < 4 && i + b < n; ++b)
      if (b != a) l *= (s - (i + b)) / static_cast<double>(a - b);
    acc += l * v(i + a);
  }
  return acc;
}

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double den = n * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (n * sxy - sx * sy) / den;
}

NormResult classify_partials(double value, std::vector<double> partials, int fit_end,
                             const VerdictPolicy& policy) {
  NormResult r;
  r.value = value;
  r.truncation_sequence = std::move(partials);
  const auto& P = r.truncation_sequence;
  const int last = static_cast<int>(P.size()) - 1;
  if (fit_end < 0 || fit_end > last) fit_end = last;
  const double total = P.empty() ? 0.0 : P.back();
  r.extrapolated = total;
  if (last < 1 || fit_end < 1) {
    r.verdict = total == 0.0 ? Verdict::finite : Verdict::inconclusive;
    return r;
  }
  const int first = std::max(1, fit_end - policy.fit_window + 1);
  std::vector<double> xs, ys;
  double dmax = 0.0;
  for (int i = first; i <= fit_end; ++i) {
    const double d = std::abs(P[i] - P[i - 1]);
    dmax = std::max(dmax, d);
    xs.push_back(i);
    ys.push_back(std::log2(std::max(d, 1e-300)));
  }
  const double scale = std::max(std::abs(total), std::abs(P[fit_end]));
  if (scale == 0.0 || dmax <= policy.negligible * scale) {
    r.verdict = Verdict::finite;
    return r;
  }
  if (xs.size() < 2) {
    r.verdict = Verdict::inconclusive;
    return r;
  }
  r.slope = ls_slope(xs, ys);
  if (r.slope <= policy.finite_slope) r.verdict = Verdict::finite;
  else if (r.slope >= policy.divergent_slope) r.verdict = Verdict::divergent;
  else r.verdict = Verdict::inconclusive;
  if (r.slope < 0.0) {
    const double ratio = std::exp2(r.slope);
    const double d_last = std::abs(P[fit_end] - P[fit_end - 1]);
    const double tail = d_last * std::pow(ratio, last - fit_end + 1) / (1.0 - ratio);
    r.extrapolated = total + tail;
  } else {
    r.extrapolated = std::numeric_limits<double>::infinity();
  }
  return r;
}

std::vector<double> gagliardo_shells(const double* u, long stride, int n_points, double h,
                                     double theta) {
  const int N = n_points - 1;
  std::vector<double> bands;
  if (N < 1) return bands;
  const double p = 1.0 + 2.0 * theta;
  for (int n = 1; n <= N; ++n) {
    double s = 0.0;
    for (int i = 0; i + n <= N; ++i) {
      const double d = u[(i + n) * stride] - u[i * stride];
      double w = 1.0;
      if (i == 0) w *= 0.5;
      if (i + n == N) w *= 0.5;
      s += w * d * d;
    }
    const int b = static_cast<int>(std::floor(std::log2(static_cast<double>(n))));
    if (static_cast<int>(bands.size()) <= b) bands.resize(b + 1, 0.0);
    bands[b] += 2.0 * h * h * s / std::pow(n * h, p);
  }
  return bands;
}

Eigen::VectorXcd fft(const Eigen::VectorXd& x) {
  Eigen::FFT<double> engine;
  std::vector<double> in(x.data(), x.data() + x.size());
  std::vector<std::complex<double>> out;
  engine.fwd(out, in);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXcd fft(const Eigen::VectorXcd& x) {
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> in(x.data(), x.data() + x.size()), out;
  engine.fwd(out, in);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXcd ifft(const Eigen::VectorXcd& X) {
  Eigen::FFT<double> engine;
  std::vector<std::complex<double>> in(X.data(), X.data() + X.size()), out;
  engine.inv(out, in);
  return Eigen::Map<Eigen::VectorXcd>(out.data(), static_cast<Eigen::Index>(out.size()));
}

Eigen::VectorXd ifft_real(const Eigen::VectorXcd& X) { return ifft(X).real(); }

Eigen::VectorXd fft_frequencies(int n, double h) {
  Eigen::VectorXd xi(n);
  const double base = 2.0 * std::numbers::pi / (n * h);
  for (int k = 0; k < n; ++k) xi(k) = base * (k <= n / 2 ? k : k - n);
  return xi;
}

}  // namespace num
}  // namespace cornerlab
