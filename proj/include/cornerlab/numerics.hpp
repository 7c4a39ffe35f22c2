#pragma once

#include "cornerlab/types.hpp"

#include <Eigen/Core>

#include <complex>
#include <vector>

namespace cornerlab::num {

double binomial(int n, int k);
double factorial(int n);
int next_pow2(int n);

/// Finite-difference weights for derivatives 0..m at z on arbitrary nodes.
/// Returns an (n x (m+1)) matrix; column d holds the weights of the d-th derivative.
Eigen::MatrixXd fornberg_weights(double z, const Eigen::VectorXd& nodes, int m);

/// Grid derivative: 4th-order centred in the interior, 2nd-order one-sided at
/// the two ends; higher orders by repeated application.
Eigen::VectorXd fd_derivative(const Eigen::VectorXd& u, double h, int order = 1);
/// Same operator applied down each column of `u` (derivative along rows).
Eigen::MatrixXd fd_derivative_rows(const Eigen::MatrixXd& u, double h, int order = 1);
/// Same operator applied along each row of `u` (derivative along columns).
Eigen::MatrixXd fd_derivative_cols(const Eigen::MatrixXd& u, double h, int order = 1);

struct Quadrature {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

/// Gauss-Legendre rule on [-1, 1].
const Quadrature& gauss_legendre(int n);

/// Trapezoid rule on a uniform grid.
double trapezoid(const Eigen::VectorXd& v, double h);
/// Trapezoid weights (h/2 at the ends).
Eigen::VectorXd trapezoid_weights(int n, double h);

/// Four-point Lagrange interpolation of uniform samples v_i = f(x0 + i h).
double cubic_interp(const Eigen::VectorXd& v, double h, double x, double x0 = 0.0);

/// Classify a nested sequence of partial values by the decay of its increments.
NormResult classify_partials(double value, std::vector<double> partials,
                             int fit_end = -1, const VerdictPolicy& policy = default_policy());

/// Squared Gagliardo-Slobodeckij seminorm of a strided 1D sample set, grouped
/// into dyadic shells in the index distance n = |i - j| (band b holds
/// 2^b <= n < 2^{b+1}). Shell values already include the factor 2 for i<j/i>j.
std::vector<double> gagliardo_shells(const double* u, long stride, int n_points, double h,
                                     double theta);

/// Discrete Fourier transforms (Eigen unsupported FFT backend).
Eigen::VectorXcd fft(const Eigen::VectorXd& x);
Eigen::VectorXd ifft_real(const Eigen::VectorXcd& X);
Eigen::VectorXcd ifft(const Eigen::VectorXcd& X);
Eigen::VectorXcd fft(const Eigen::VectorXcd& x);

/// Angular frequencies 2 pi k / (n h) in FFT order.
Eigen::VectorXd fft_frequencies(int n, double h);

/// Fit y = a + b x by least squares and return b.
double ls_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace cornerlab::num
