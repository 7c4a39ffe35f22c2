#pragma once

#include "cornerlab/function.hpp"

#include <memory>
#include <string>
#include <string_view>

namespace cornerlab {

/// Closed-form expression in one variable, parsed from a small infix language.
///
/// Grammar: numbers, the variable, + - * / ^ (constant exponents), parentheses,
/// the constants `pi` and `e`, and the functions
///   exp, sin, cos, sqrt, log,
///   eta(arg, a, b)  smooth cutoff, 1 for arg <= a, 0 for arg >= b,
///   step(arg, a)    1 for arg < a, 0 otherwise.
///
/// Taylor expansions are exact (truncated power-series arithmetic), so corner
/// jets at 0 are symbolic. Non-integer powers of the bare variable such as
/// x^0.3 carry finite regularity H^{0.8-} and a jet at 0 of depth 1.
class Expr final : public Function1D {
 public:
  struct Node;

  static Expr parse(std::string_view text, std::string variable = "x");

  double value(double x) const override;
  Taylor<double> taylor(double x, int order) const override;
  SobolevIndex regularity() const override;
  std::string describe() const override { return text_; }

  const std::string& variable() const { return variable_; }

 private:
  Expr(std::shared_ptr<const Node> root, std::string text, std::string variable)
      : root_(std::move(root)), text_(std::move(text)), variable_(std::move(variable)) {}

  std::shared_ptr<const Node> root_;
  std::string text_;
  std::string variable_;
};

ScalarFn parse_function(std::string_view text, std::string variable = "x");

/// The smooth step used for every cutoff: 1 on (-inf, a], 0 on [b, inf),
/// with all derivatives vanishing at both edges.
double smooth_cutoff(double v, double a, double b);
Taylor<double> smooth_cutoff(const Taylor<double>& v, double a, double b);

}  // namespace cornerlab
