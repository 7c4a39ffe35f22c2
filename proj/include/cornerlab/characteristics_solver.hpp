#pragma once

#include "cornerlab/compatibility.hpp"
#include "cornerlab/hyperbolic_system.hpp"
#include "cornerlab/types.hpp"

#include <utility>

namespace cornerlab {

struct SolveConfig {
  enum class Mode { exact_characteristics, toy_closed_form };
  int N = 256;
  int M = 256;
  int duhamel_steps = 16;
  Mode mode = Mode::exact_characteristics;
  /// Field extents; zero means the largest window the data support.
  double X = 0.0;
  double T = 0.0;

  void validate() const;
};

/// u(x,t) = u0(x - t) for x >= t and g(t - x) otherwise.
Field2D solve_toy(const SampledHalfLine& u0, const BoundarySignal& g, const SolveConfig& config);

/// Method of characteristics for L = d_t - A d_x with constant A, B.
/// Initial data must cover [0, X + max(lambda, 0) T] and boundary data [0, T];
/// otherwise DataError("... horizon exceeded").
Field2D solve_exact(const SystemSpec& spec, const DataTriple& data, const SolveConfig& config);

/// Restrictions to t = 0 and x = 0 (all q components).
std::pair<SampledHalfLine, BoundarySignal> extract_traces(const Field2D& u);

}  // namespace cornerlab
