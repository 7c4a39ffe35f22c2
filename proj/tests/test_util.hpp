#pragma once

#include "cornerlab/expr.hpp"
#include "cornerlab/types.hpp"

#include <cmath>
#include <functional>
#include <string>

namespace testutil {

inline cornerlab::LineSamples sample(const std::function<double(double)>& f, double a, double b, int n) {
  cornerlab::LineSamples s;
  s.h = (b - a) / n;
  s.x0 = a;
  s.values.resize(n + 1);
  for (int i = 0; i <= n; ++i) s.values(i) = f(a + i * s.h);
  return s;
}

inline cornerlab::LineSamples sample(const std::string& expr, double a, double b, int n) {
  const auto f = cornerlab::parse_function(expr);
  return sample([&](double x) { return f->value(x); }, a, b, n);
}

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testutil
