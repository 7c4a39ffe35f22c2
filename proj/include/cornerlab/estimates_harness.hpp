#pragma once

#include "cornerlab/characteristics_solver.hpp"
#include "cornerlab/compatibility.hpp"
#include "cornerlab/types.hpp"

#include <string>
#include <vector>

namespace cornerlab {

enum class EstimateKind { semigroup, resolvent, weighted_resolvent };

const char* to_string(EstimateKind k);
EstimateKind parse_estimate_kind(const std::string& name);

struct EstimateSides {
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  double gamma = 0.0;
  double s = 0.0;
  EstimateKind kind = EstimateKind::semigroup;
  /// rhs vanished while lhs did not.
  bool anomaly = false;
};

/// Both sides of the a-priori estimates on a computed solution. Data norms are
/// taken over the full windows of `data` (the domain of dependence of u), f on
/// the u0 grid times [0, u.T]. Resolvent kinds are reported at the squared level.
EstimateSides estimate_sides(const Field2D& u, const DataTriple& data, double gamma, int s,
                             EstimateKind kind);

std::vector<EstimateSides> gamma_sweep(const Field2D& u, const DataTriple& data,
                                       const std::vector<double>& gammas, int s, EstimateKind kind);

struct SweepOptions {
  int base_N = 32;
  double X = 2.0;
  double T = 2.0;
  int duhamel_steps = 16;
};

struct SweepResult {
  std::vector<double> s;
  double compat_order = 0.0;
  CompatReport report;
  /// Squared H^s proxy, one row per s, one column per level.
  Eigen::MatrixXd norm_table;
  std::vector<int> grid_sizes;
  std::vector<Verdict> verdicts;
  std::vector<double> slopes;
  /// "bounded", "divergent" or "inconclusive".
  std::vector<std::string> classification;
  std::vector<bool> predicted_bounded;

  bool matches(std::size_t i) const;
};

/// Bounded iff the verified compatibility order reaches the order required at
/// s and the data regularity admits s.
bool predicted_bounded(const CompatReport& report, double s);

/// Solve on nested grids N = base_N 2^l, l = 0..levels, and classify the growth
/// of the H^s(Omega x [0, T]) proxy for every s.
SweepResult regularity_sweep(const SystemSpec& spec, const DataTriple& data,
                             const std::vector<double>& s_grid, int levels,
                             const SweepOptions& options = {});

/// Squared H^s proxy of a field: L2 norms of all derivatives of order <= floor(s)
/// plus Gagliardo seminorms of the top derivatives along slices in x and t
/// taken every `slice_stride` grid lines.
double hs_proxy(const Field2D& u, double s, int slice_stride);

struct ConstantProbeRow {
  double theta = 0.0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct ProbeOptions {
  int N = 1024;
  double X = 2.0;
  double T = 1.0;
  int time_slices = 9;
};

/// C(theta) = sup_t |u(t)|^2_{H^theta} / |u0|^2_{H^theta} with the seminorms
/// extrapolated past the grid scale.
std::vector<ConstantProbeRow> half_integer_constant_probe(const SystemSpec& spec,
                                                          const DataTriple& data,
                                                          const std::vector<double>& theta_grid,
                                                          const ProbeOptions& options = {});

/// Closed-form triple: one expression per component of u0 (variable x) and g
/// (variable t), sampled on [0, X] and [0, T] with jets to `jet_order`.
DataTriple make_triple(const std::vector<std::string>& u0, const std::vector<std::string>& g,
                       const ForcingSpec& f, double X, double T, int N, int M, int jet_order = 6);

struct CorpusEntry {
  std::string name;
  SystemSpec spec;
  DataTriple data;
  double expected_order = 0.0;  // +inf for smooth compatible data
};

/// Twelve triples spanning compatibility orders 0 .. 5/2 and a smooth control.
std::vector<CorpusEntry> sweep_corpus(const SweepOptions& options = {});

}  // namespace cornerlab
