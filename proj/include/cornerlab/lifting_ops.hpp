#pragma once

#include "cornerlab/compatibility.hpp"
#include "cornerlab/types.hpp"

#include <vector>

namespace cornerlab {

/// chi(t) = t^m/m! * eta(|t|), eta = 1 on [0, support_end/2], 0 past support_end.
struct CutoffSpec {
  int m = 0;
  double support_end = 1.0;
  ScalarFn profile;

  double operator()(double t) const { return profile->value(t); }
  LineSamples sample(double T, int M) const;
};

CutoffSpec make_cutoff(int m, double support_end = 1.0);

struct LiftOptions {
  double support_end = 1.0;
  /// t samples per unit of lambda <xi_eff> t.
  int t_resolution = 32;
  /// Keep only t >= 0 (enough for trace checks).
  bool half_range = false;
  /// Measure |R_m g|_{H^{m+s+1/2}} and the ratio against lambda^s |g|_{H^s}.
  bool measure_norms = true;
};

/// F_{x'}(R_m g)(xi, t) = chi(lambda t <xi>) / (lambda <xi>)^m g^(xi).
/// Rows of the result follow x', columns follow t (t = 0 is a grid column).
/// Norms are measured on the periodic transform window, where the sampled lift
/// is exact; the x' edge decay of the cropped output is a diagnostic.
/// Throws NumericalGuardError when the spectrum of g is not resolved.
PlaneFn lift_rm(const LineSamples& g, int m, double lambda, double s_report,
                const LiftOptions& options = {});

/// |R_m g|_{H^r} of the sampled lift, measured on the periodic transform window.
double lift_norm(const LineSamples& g, int m, double lambda, double r, const LiftOptions& options = {});

/// One-sided time derivatives of a plane at t = 0, orders 0..max_order,
/// from a stencil on the first `points` columns with t >= 0. Column d holds
/// the d-th derivative at every x'.
Eigen::MatrixXd time_jets_at_zero(const PlaneFn& R, int max_order, int points);

/// Odd extension to [-X, X]; the value at 0 is set to 0.
LineSamples odd_extension(const LineSamples& u0);

struct CornerLiftOptions {
  double support_end = 1.0;
  int padding = 8;
  /// Keep every `stride`-th output sample in each direction.
  int stride = 1;
};

/// R(u0, g) = R_b g + R_0(u0 - R_b g|_{t=0}) on [0, X] x [0, T]; rows follow
/// the normal variable y, columns follow t. Throws
/// DataError("corner data incompatible at order theta") when the gate fails.
PlaneFn corner_lift(const SampledHalfLine& u0, const BoundarySignal& g, double theta,
                    const CornerLiftOptions& options = {});

struct SynthesisResult {
  DataTriple data;
  /// eps_j removed for j = k+1..m (zero vectors when already satisfied).
  std::vector<Eigen::VectorXd> corrections;
  /// |g~ - g|_{H^k(0, T)}.
  double correction_norm = 0.0;
  double lambda = 1.0;
};

/// g~ = g - sum_j eps_j chi_{j-1}(lambda t) / lambda^{j-1} so that the
/// conditions hold up to order m. Data must pass orders 1..k.
SynthesisResult synthesize_compatible_data(const SystemSpec& spec, const DataTriple& data, int k,
                                           int m, double lambda = 4.0);

/// u_app(x, t) = sum_j t^j/j! v_j(x) chi(t) on [0, X] x [0, T].
Field2D approximate_solution(const std::vector<SampledHalfLine>& v, const CutoffSpec& chi, double T,
                             int M);

}  // namespace cornerlab
