#pragma once
// Error taxonomy for the lab.  Everything derives from dscale::Error so the
// CLI can map failures onto exit codes in one place: configuration problems,
// solver-side failures, and conformance-flag failures are kept distinct.

#include <stdexcept>
#include <string>

namespace dscale {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad argument values (non-finite, out of the documented domain, ...).
struct InvalidInputError : Error {
  using Error::Error;
};

/// Evaluation outside the range covered by a solved trajectory.
struct OutOfRangeError : Error {
  using Error::Error;
};

/// An iterative solve could not reach its tolerance.  `last_valid_t` is the
/// last time up to which the returned/partial data is trustworthy.
struct ConvergenceError : Error {
  double last_valid_t;
  ConvergenceError(const std::string& msg, double t) : Error(msg), last_valid_t(t) {}
};

/// Non-finite field values appeared during time stepping.
struct BlowUpError : Error {
  double time;
  BlowUpError(const std::string& msg, double t) : Error(msg), time(t) {}
};

/// Density dropped to (or below) zero where positivity is structural.
struct PositivityError : Error {
  double time;
  double min_density;
  PositivityError(const std::string& msg, double t, double rho)
      : Error(msg), time(t), min_density(rho) {}
};

/// A requested time step violates the stability bound; `suggested_dt` is a
/// stable alternative computed from the current state.
struct StepRejectedError : Error {
  double suggested_dt;
  StepRejectedError(const std::string& msg, double dt) : Error(msg), suggested_dt(dt) {}
};

/// A dilation/interpolation would move significant mass across the periodic
/// seam, so the result would be contaminated by wrap-around images.
struct DomainOverflowError : Error {
  using Error::Error;
};

/// Configuration parsing/validation failure; `field` is the JSON path of the
/// offending entry.
struct ConfigError : Error {
  std::string field;
  ConfigError(const std::string& msg, std::string field_path)
      : Error(msg + " (field: " + field_path + ")"), field(std::move(field_path)) {}
};

}  // namespace dscale
