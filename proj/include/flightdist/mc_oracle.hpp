#pragma once

// Monte Carlo oracle: event-driven simulation of the flights plus empirical
// distribution machinery with the Dvoretzky-Kiefer-Wolfowitz band.  Sampling
// is chunked (fixed chunk size, one RNG stream per chunk) so the multiset of
// samples depends only on (seed, n), never on the thread count.

#include <cstddef>
#include <cstdint>
#include <vector>

#include "flightdist/core_model.hpp"
#include "flightdist/rng.hpp"

namespace flightdist {

struct FlightState {
  double x = 0.0;
  double y = 0.0;
  double t = 0.0;
  long switches = 0;  // direction changes by time t; 0 means still on the rim
};

// Simulates one flight to horizon t by stepping between direction switches
// (exponential inter-arrival times).  Throws std::domain_error for t <= 0.
FlightState simulate_flight(const FlightParams& p, double t, Philox& rng);

class EmpiricalCdf {
 public:
  // Takes ownership of the samples; sorts them.
  EmpiricalCdf(std::vector<double> samples, std::uint64_t seed);

  // Left-continuous empirical CDF: #{samples < x} / n.
  double operator()(double x) const;

  std::size_t size() const { return samples_.size(); }
  std::uint64_t seed() const { return seed_; }
  const std::vector<double>& sorted_samples() const { return samples_; }

  // Half-width of the DKW confidence band: sqrt(log(2/alpha) / (2n)).
  static double dkw_halfwidth(double alpha, std::size_t n);

 private:
  std::vector<double> samples_;
  std::uint64_t seed_;
};

// Distances |Z1(t) - Z2(t)| for n independent pairs, in draw order.
std::vector<double> sample_distances(const PairParams& pair, double t, std::size_t n,
                                     std::uint64_t seed, int threads = 1);

EmpiricalCdf empirical_distance_cdf(const PairParams& pair, double t, std::size_t n,
                                    std::uint64_t seed, int threads = 1);

// Empirical law of the x-projection of a single flight.
EmpiricalCdf empirical_marginal(const FlightParams& p, double t, std::size_t n,
                                std::uint64_t seed, int threads = 1);

}  // namespace flightdist
