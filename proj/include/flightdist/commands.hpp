#pragma once

// Subcommand implementations behind the flightdist binary.  They write the
// payload to `out` and diagnostics to `diag`, and return the process exit
// code: 0 success, 1 validation failure, 2 configuration error, 3 quadrature
// non-convergence.

#include <iosfwd>

#include "flightdist/run_config.hpp"

namespace flightdist {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailure = 1;
inline constexpr int kExitConfigError = 2;
inline constexpr int kExitNoConvergence = 3;

// Evaluates phi on the configured grid and emits CSV rows
// r,phi,abs_error,regime with 17 significant digits.
int cmd_eval(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// Runs the self-check battery (endpoints, junction continuity, component-sum
// oracle, monotonicity, optional Monte Carlo agreement) and prints one
// PASS/FAIL line per check with measured and allowed values.
int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

// Draws Monte Carlo distances and emits either the empirical CDF or the raw
// samples, with a comment header recording parameters and seed.
int cmd_sample(const RunConfig& cfg, std::ostream& out, std::ostream& diag);

}  // namespace flightdist
