#pragma once

#include "cornerlab/characteristics_solver.hpp"
#include "cornerlab/compatibility.hpp"
#include "cornerlab/estimates_harness.hpp"
#include "cornerlab/hyperbolic_system.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace cornerlab {

/// Malformed or inconsistent configuration; `field` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::runtime_error(field.empty() ? what : field + ": " + what), field_(field) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct NamedTriple {
  std::string name;
  SystemSpec spec;
  DataTriple data;
  double expected_order = -1.0;  // negative when unknown
};

struct LiftParams {
  std::string g = "exp(-x^2)";
  double half_width = 16.0;
  double h = 0.125;
  int m = 1;
  std::vector<double> lambdas{1.0, 2.0, 4.0};
  double s = 0.5;
};

struct SynthesizeParams {
  int k = 1;
  int m = 3;
  std::vector<double> lambdas{2.0, 4.0, 8.0};
};

struct ExperimentConfig {
  std::vector<NamedTriple> triples;
  SolveConfig solve;
  double compat_s_max = 3.0;
  std::vector<double> s_grid{0.4, 0.5, 1.0, 1.5, 2.0, 2.5};
  int levels = 4;
  SweepOptions sweep;
  std::vector<double> gammas{1.0, 2.0, 4.0, 8.0};
  std::vector<std::string> estimate_kinds{"semigroup", "resolvent", "weighted_resolvent"};
  int estimate_s = 1;
  LiftParams lift;
  SynthesizeParams synthesize;
  std::vector<double> norm_thetas{0.25, 0.5, 0.75};
  std::uint64_t seed = 0;
  /// Canonical JSON of the input, the basis of the manifest hash.
  std::string canonical;
};

/// Parse a configuration document. Unknown top-level keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

}  // namespace cornerlab
