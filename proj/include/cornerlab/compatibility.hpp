#pragma once

#include "cornerlab/hyperbolic_system.hpp"
#include "cornerlab/types.hpp"

#include <map>
#include <string>
#include <vector>

namespace cornerlab {

/// Initial data u0, boundary data g and forcing f of one problem instance.
struct DataTriple {
  SampledHalfLine u0;
  BoundarySignal g;
  ForcingSpec f;

  /// min over all closed-form generators; smooth when only samples are known.
  SobolevIndex regularity() const;
  void validate(const SystemSpec& spec) const;
};

/// Residual of one integer-order condition.
struct OrderResidual {
  int order = 0;
  Eigen::VectorXd residual;  // b-vector
  double tolerance = 0.0;
  bool pass = false;
};

struct CompatReport {
  std::vector<int> orders_checked;
  std::vector<Eigen::VectorXd> residuals;
  std::vector<bool> order_pass;
  /// Half-order checks by k (the condition of order k - 1/2).
  std::map<int, NormResult> half_orders;
  /// The half-order check that decided the verified order, when one did.
  NormResult half_order_hardy;
  int half_order_index = 0;
  double verified_order = 0.0;
  double s_max = 0.0;
  std::string limited_by;
  SobolevIndex data_regularity;
  double tol_cc = 0.0;
  /// Every order j that passed has a finite half-order check at j.
  bool hierarchy_consistent = true;
};

/// Half-integer order needed at regularity s: the order-k conditions for
/// s = k + theta with theta < 1/2, order k + 1/2 at theta = 1/2, and k + 1
/// above.
double required_compat_order(double s);

/// v_0 .. v_k of the formal time-Taylor recursion. Samples share the grid of
/// u0; boundary jets shrink by one row per step; closed-form generators are
/// attached when u0 has them.
std::vector<SampledHalfLine> taylor_coefficients(const SystemSpec& spec, const DataTriple& data,
                                                 int k);

/// eps_j = d_t^{j-1} g(0) - sum_l C(j-1, l) B_l v_{j-1-l}(0). Throws
/// DataError("jet underflow at order j") when jets are too short.
OrderResidual check_cc_order(int j, const SystemSpec& spec, const DataTriple& data);

/// Membership of the order-k residual in H^{1/2}_{00}: Hardy integral plus the
/// H^{1/2} seminorm. Throws DataError("lower-order CC violated") if an order
/// below k fails.
NormResult check_cc_half_order(int k, const SystemSpec& spec, const DataTriple& data);

/// The residual function of order k evaluated at points tau (b x n).
Eigen::MatrixXd half_order_residual(int k, const SystemSpec& spec, const DataTriple& data,
                                    const Eigen::VectorXd& tau);

CompatReport compat_report(const SystemSpec& spec, const DataTriple& data, double s_max);

}  // namespace cornerlab
