#pragma once

#include "cornerlab/types.hpp"

#include <functional>

namespace cornerlab {

inline constexpr double kMaxSobolevOrder = 6.0;

/// Relative size of the end samples above which a window counts as not decayed.
inline constexpr double kWindowTolerance = 1e-6;

/// (int (1+xi^2)^s |u^|^2 dxi)^{1/2} by a zero-padded discrete transform.
/// The truncation sequence holds partial sums over nested frequency cutoffs.
NormResult fourier_hs_norm(const LineSamples& u, double s);
NormResult fourier_hs_norm(const PlaneSamples& u, double s);

/// Intrinsic H^theta seminorm on the sampled interval,
/// (int int |u(x)-u(y)|^2 / |x-y|^{1+2 theta})^{1/2}, excluding |x - y| < h.
/// The truncation sequence is indexed by dyadic diagonal cutoffs, far to near.
NormResult gagliardo_seminorm(const LineSamples& u, double theta);

/// int_0^X u^2/x dx with nested lower cutoffs eps_j = 2^-j x_cut.
NormResult hardy_integral(const LineSamples& u);
/// Same quantity for a closed-form integrand; `squared(x)` returns |u(x)|^2.
NormResult hardy_integral(const std::function<double(double)>& squared, double X,
                          int octaves = 40);
NormResult hardy_integral(const Function1D& u, double X, int octaves = 40);

/// (|u|_{1/2}^2 + |u|_{L2}^2 + int u^2/x)^{1/2}; finite only if all parts are.
NormResult h1200_norm(const LineSamples& u);

double l2_norm(const LineSamples& u);

/// sum_{a+b <= s} |e^{-gamma t} dx^a dt^b u|_{L2}; s an integer in [0, 3].
NormResult weighted_hs_gamma_norm(const Field2D& u, double s, double gamma);
NormResult weighted_hs_gamma_norm(const Eigen::MatrixXd& u, double h, double k, double s,
                                  double gamma);
/// One-variable version on [0, T]: sum_{j <= s} |e^{-gamma t} d_t^j g|_{L2}.
NormResult weighted_hs_gamma_norm(const LineSamples& g, double s, double gamma);

/// int |v^|^2 (1+xi^2)^{s+1} / (1 + delta^2 xi^2) dxi, square-rooted.
NormResult hsdelta_norm(const LineSamples& v, double s, double delta);
NormResult hsdelta_norm(const PlaneSamples& v, double s, double delta);

/// rho = d^m/dx^m of the bump exp(-1/(1-x^2)), scaled so |rho^| has unit
/// RMS on 1 <= |xi| <= 2.
struct MollifierSpec {
  int m = 4;
  double scale = 1.0;

  /// |rho^(omega)| for omega >= 0, accurate to ~1e-14 of its peak.
  double hat(double omega) const;
};

MollifierSpec make_mollifier(double s);

/// |v|_{L2} + (int_0^1 |v * rho_eps|^2 eps^{-2(s+1)} (1 + delta^2/eps^2)^{-1} deps/eps)^{1/2}
/// with eps sampled eight times per octave.
NormResult mollifier_equiv_norm(const LineSamples& v, double s, double delta,
                                const MollifierSpec& rho);

/// Dyadic commutator sum for P = a(x) d/dx, reported as a diagnostic:
/// (int_0^1 |[P, rho_eps *] v|^2 eps^{-2(s+1)} (1 + delta^2/eps^2)^{-1} deps/eps)^{1/2}.
NormResult friedrichs_commutator(const LineSamples& v, double s, double delta,
                                 const MollifierSpec& rho, const std::function<double(double)>& a);

}  // namespace cornerlab
