#pragma once

#include "cornerlab/function.hpp"

#include <Eigen/Core>

#include <string>
#include <vector>

namespace cornerlab {

/// One separable forcing term coeff * fx(x) * ft(t), coeff a q-vector.
struct ForcingTerm {
  Eigen::VectorXd coeff;
  ScalarFn fx;
  ScalarFn ft;
};

/// f(x, t) = sum of separable terms; `zero` when the list is empty.
struct ForcingSpec {
  enum class Kind { zero, separable_smooth };
  std::vector<ForcingTerm> terms;

  Kind kind() const { return terms.empty() ? Kind::zero : Kind::separable_smooth; }
  bool is_zero() const { return terms.empty(); }
  Eigen::VectorXd evaluate(double x, double t, int q) const;
  /// d_t^j f(x, 0).
  Eigen::VectorXd time_jet(double x, int j, int q) const;
  /// Spot-check time jets against divided differences of the evaluator.
  bool consistent(int q, int max_order, double tol = 1e-8) const;
};

/// Operator data of L = d_t - A d_x on x > 0 with boundary operator B.
struct SystemSpec {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  /// d_t^l A at t = 0; entry 0 equals A.
  std::vector<Eigen::MatrixXd> A_taylor;
  std::vector<Eigen::MatrixXd> B_taylor;
  ForcingSpec forcing;

  int q() const { return static_cast<int>(A.rows()); }
  int b() const { return static_cast<int>(B.rows()); }
  /// Coefficient l of the Taylor stacks, zero past the supplied depth.
  Eigen::MatrixXd A_l(int l) const;
  Eigen::MatrixXd B_l(int l) const;
  bool constant_coefficients() const;

  void validate() const;

  static SystemSpec constant(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);
  /// The transport problem d_t u + d_x u = 0 with u(0, t) = g(t).
  static SystemSpec toy();
};

struct CharDecomp {
  Eigen::VectorXd eigenvalues;  // ascending
  Eigen::MatrixXd P;            // right eigenvectors as columns
  Eigen::MatrixXd P_inv;
  std::vector<int> incoming;  // lambda < 0
  std::vector<int> outgoing;  // lambda > 0
  double condition_number = 1.0;

  Eigen::MatrixXd P_in() const;
  Eigen::MatrixXd P_out() const;
};

struct AdmissibilityReport {
  bool pass = false;
  std::string reason;
  double determinant = 0.0;
  double condition_number = 0.0;
  double min_abs_eigenvalue = 0.0;
};

/// Real diagonalization A P = P diag(lambda). Throws AdmissibilityError
/// ("not hyperbolic", "not diagonalizable").
CharDecomp diagonalize(const Eigen::MatrixXd& A);

AdmissibilityReport check_noncharacteristic(const Eigen::MatrixXd& A);

/// B restricted to the incoming eigenspace must be an isomorphism. Throws
/// AdmissibilityError("boundary condition count mismatch") when b differs from
/// the number of incoming modes.
AdmissibilityReport check_kreiss_lopatinskii_1d(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace cornerlab
