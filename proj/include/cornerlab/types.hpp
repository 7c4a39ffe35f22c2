#pragma once

#include "cornerlab/function.hpp"

#include <Eigen/Core>

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace cornerlab {

enum class Verdict { finite, divergent, inconclusive };

const char* to_string(Verdict v);

/// A norm value together with the refinement trend that decides membership.
struct NormResult {
  double value = 0.0;
  /// Partial values (squared quantities) at nested cutoffs.
  std::vector<double> truncation_sequence;
  Verdict verdict = Verdict::finite;
  /// Least-squares slope of log2 |increment| against cutoff index.
  double slope = -std::numeric_limits<double>::infinity();
  /// value^2 plus a geometric tail estimate; +inf when the trend does not decay.
  double extrapolated = 0.0;
};

/// Classification thresholds shared by every membership test.
struct VerdictPolicy {
  double finite_slope = -0.1;
  double divergent_slope = -0.04;
  double negligible = 1e-10;
  int fit_window = 5;
};

VerdictPolicy& default_policy();

/// Samples of a scalar function at x0 + i*h.
struct LineSamples {
  Eigen::VectorXd values;
  double h = 1.0;
  double x0 = 0.0;

  int size() const { return static_cast<int>(values.size()); }
};

/// Samples of a scalar function on a rectangular grid; rows follow the first
/// variable, columns the second.
struct PlaneSamples {
  Eigen::MatrixXd values;
  double h1 = 1.0;
  double h2 = 1.0;
};

/// Vector-valued function on [0, X] sampled at x_i = i*h, with an optional
/// one-sided derivative stack at x = 0 (row j holds the j-th derivatives).
struct SampledHalfLine {
  Eigen::MatrixXd samples;  // (N+1) x q
  double h = 0.0;
  double X = 0.0;
  std::optional<Eigen::MatrixXd> boundary_jet;
  /// Closed-form generators, one per component, when known.
  std::vector<ScalarFn> sources;

  int N() const { return static_cast<int>(samples.rows()) - 1; }
  int q() const { return static_cast<int>(samples.cols()); }
  /// Number of exact jet rows available (0 when absent).
  int jet_rows() const { return boundary_jet ? static_cast<int>(boundary_jet->rows()) : 0; }
  bool has_sources() const { return !sources.empty(); }
  LineSamples component(int c) const { return {samples.col(c), h, 0.0}; }
  SobolevIndex regularity() const;

  void validate() const;

  static SampledHalfLine from_functions(const std::vector<ScalarFn>& f, double X, int N,
                                        int jet_order);
  static SampledHalfLine zeros(int q, double X, int N, int jet_order);
};

/// Boundary data g on [0, T] sampled at t_i = i*k.
struct BoundarySignal {
  Eigen::MatrixXd samples;  // (M+1) x b
  double k = 0.0;
  double T = 0.0;
  std::optional<Eigen::MatrixXd> jet_at_zero;
  std::vector<ScalarFn> sources;

  int M() const { return static_cast<int>(samples.rows()) - 1; }
  int b() const { return static_cast<int>(samples.cols()); }
  int jet_rows() const { return jet_at_zero ? static_cast<int>(jet_at_zero->rows()) : 0; }
  bool has_sources() const { return !sources.empty(); }
  LineSamples component(int c) const { return {samples.col(c), k, 0.0}; }
  SobolevIndex regularity() const;

  void validate() const;

  static BoundarySignal from_functions(const std::vector<ScalarFn>& g, double T, int M,
                                       int jet_order);
  static BoundarySignal zeros(int b, double T, int M, int jet_order);
};

/// Sampled solution over [0, X] x [0, T]; one (N+1) x (M+1) matrix per
/// component, rows indexing x_i = i*h and columns t_j = j*k.
struct Field2D {
  std::vector<Eigen::MatrixXd> components;
  double h = 0.0;
  double k = 0.0;
  double X = 0.0;
  double T = 0.0;
  std::map<std::string, std::string> metadata;

  int q() const { return static_cast<int>(components.size()); }
  int N() const { return components.empty() ? 0 : static_cast<int>(components[0].rows()) - 1; }
  int M() const { return components.empty() ? 0 : static_cast<int>(components[0].cols()) - 1; }
  Eigen::VectorXd at(int i, int j) const;

  static Field2D zeros(int q, double X, double T, int N, int M);
};

/// Sampled function on a plane (x', t), the range of the lifting operators.
struct PlaneFn {
  Eigen::MatrixXd samples;  // rows: x', cols: t
  double h = 0.0;           // x' spacing
  double k = 0.0;           // t spacing
  double x0 = 0.0;          // first x' sample
  double t0 = 0.0;          // first t sample
  std::map<std::string, std::string> provenance;
  std::map<std::string, double> diagnostics;
};

}  // namespace cornerlab
