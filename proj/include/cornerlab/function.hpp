#pragma once

#include "cornerlab/taylor.hpp"

#include <Eigen/Core>

#include <functional>
#include <limits>
#include <memory>
#include <string>
#include <vector>

namespace cornerlab {

/// Sobolev index of a function on a half-line: membership in H^s for
/// s <= value, or s < value when `exclusive`.
struct SobolevIndex {
  double value = std::numeric_limits<double>::infinity();
  bool exclusive = false;

  static SobolevIndex smooth() { return {}; }
  static SobolevIndex below(double s) { return {s, true}; }
  static SobolevIndex upto(double s) { return {s, false}; }

  bool admits(double s) const { return exclusive ? s < value : s <= value; }
  bool is_smooth() const { return value == std::numeric_limits<double>::infinity(); }
};

inline SobolevIndex min(const SobolevIndex& a, const SobolevIndex& b) {
  if (a.value < b.value) return a;
  if (b.value < a.value) return b;
  return {a.value, a.exclusive || b.exclusive};
}

/// Real function of one variable with Taylor expansions at arbitrary points.
class Function1D {
 public:
  virtual ~Function1D() = default;

  virtual double value(double x) const = 0;
  virtual Taylor<double> taylor(double x, int order) const = 0;
  virtual SobolevIndex regularity() const { return SobolevIndex::smooth(); }
  virtual std::string describe() const { return "<function>"; }

  /// [f(x), f'(x), ..., f^(order)(x)]; entries past the valid depth are NaN.
  Eigen::VectorXd derivatives(double x, int order) const;
  /// Number of derivatives at x that exist (order 0 counts as one).
  int jet_depth(double x, int order) const { return taylor(x, order).valid; }
};

using ScalarFn = std::shared_ptr<const Function1D>;

/// Function given by callables; the Taylor callable returns c_k = f^(k)/k!.
class LambdaFunction final : public Function1D {
 public:
  LambdaFunction(std::function<double(double)> value_fn,
                 std::function<Taylor<double>(double, int)> taylor_fn,
                 SobolevIndex regularity = SobolevIndex::smooth(), std::string name = "<lambda>")
      : value_(std::move(value_fn)),
        taylor_(std::move(taylor_fn)),
        regularity_(regularity),
        name_(std::move(name)) {}

  double value(double x) const override { return value_(x); }
  Taylor<double> taylor(double x, int order) const override { return taylor_(x, order); }
  SobolevIndex regularity() const override { return regularity_; }
  std::string describe() const override { return name_; }

 private:
  std::function<double(double)> value_;
  std::function<Taylor<double>(double, int)> taylor_;
  SobolevIndex regularity_;
  std::string name_;
};

/// base(x) + sum_i weight_i * term_i(x)
class LinearCombination final : public Function1D {
 public:
  LinearCombination(ScalarFn base, std::vector<double> weights, std::vector<ScalarFn> terms);

  double value(double x) const override;
  Taylor<double> taylor(double x, int order) const override;
  SobolevIndex regularity() const override;
  std::string describe() const override;

 private:
  ScalarFn base_;
  std::vector<double> weights_;
  std::vector<ScalarFn> terms_;
};

/// f(scale * x), used for the lambda-rescaled cutoffs of the lifting operators.
class Rescaled final : public Function1D {
 public:
  Rescaled(ScalarFn inner, double scale) : inner_(std::move(inner)), scale_(scale) {}

  double value(double x) const override { return inner_->value(scale_ * x); }
  Taylor<double> taylor(double x, int order) const override;
  SobolevIndex regularity() const override { return inner_->regularity(); }
  std::string describe() const override;

 private:
  ScalarFn inner_;
  double scale_;
};

ScalarFn zero_function();
ScalarFn constant_function(double c);

}  // namespace cornerlab
