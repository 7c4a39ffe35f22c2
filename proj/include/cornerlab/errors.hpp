#pragma once

#include <stdexcept>
#include <string>

namespace cornerlab {

/// Missing or inconsistent data: jet underflow, exceeded horizons,
/// incompatible corner data. CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Structural failure of the operator: characteristic boundary,
/// Kreiss-Lopatinskii failure, non-hyperbolic A. CLI exit code 3.
class AdmissibilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical guard tripped (window too small, unresolved spectrum).
/// CLI exit code 4.
class NumericalGuardError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cornerlab
