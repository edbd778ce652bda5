#pragma once

// Run configuration shared by the CLI subcommands.  Values come from three
// layers with increasing precedence: a flat key=value config file, the
// FLIGHTDIST_SEED environment variable, and command-line flags.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace flightdist {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  double c1 = 1.0;
  double c2 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double t = 1.0;

  std::vector<double> r_grid;  // explicit grid; empty means auto
  int grid_n = 101;            // auto grid size over [0, (c1+c2)t]

  double tol = 1e-10;          // single-integral tolerance; doubles run at 100x

  std::size_t mc_n = 0;        // 0 means no Monte Carlo requested
  std::uint64_t seed = 20260814;
  double alpha = 0.01;

  std::string out;             // output path; empty means stdout
  std::string format = "csv";
  int threads = 1;
  bool raw_samples = false;    // sample: dump draws instead of the ECDF
};

// Parses a flat key=value file (one pair per line, '#' comments).  Unknown
// keys and malformed values raise ConfigError with "<name>:<line>: ..."
// diagnostics.  Starts from the given base so partial files override only
// what they mention.
RunConfig parse_config_file(std::istream& in, const std::string& name,
                            const RunConfig& base = {});

// Applies FLIGHTDIST_SEED if set (must parse as an unsigned integer).
void apply_env_overrides(RunConfig& cfg);

// Emits the config in the same key=value format parse_config_file reads;
// the round trip reproduces the config exactly.
std::string dump_config(const RunConfig& cfg);

// Validates cross-field invariants (positive parameters, sane tolerance,
// grid inside [0, 1.05*(c1+c2)t], mc_n >= 100 when Monte Carlo is used).
// Sorts the explicit grid.  Throws ConfigError.
void finalize_config(RunConfig& cfg, bool mc_required);

}  // namespace flightdist
