#include "flightdist/mc_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <mutex>
#include <stdexcept>
#include <thread>

namespace flightdist {

namespace {

// Samples are drawn in fixed-size chunks, one counter stream per chunk, so
// the value at index i depends only on (seed, tag, i) and never on how the
// chunks were distributed over threads.
constexpr std::size_t kChunk = 4096;
constexpr std::uint64_t kDistanceTag = 1;
constexpr std::uint64_t kMarginalTag = 2;

template <typename PerSample>
std::vector<double> chunked_samples(std::size_t n, std::uint64_t seed,
                                    std::uint64_t tag, int threads,
                                    const PerSample& draw) {
  std::vector<double> out(n);
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  auto run_chunk = [&](std::size_t k) {
    Philox gen(seed, (tag << 56) + k);
    const std::size_t lo = k * kChunk;
    const std::size_t hi = std::min(lo + kChunk, n);
    for (std::size_t i = lo; i < hi; ++i) out[i] = draw(gen);
  };
  const int workers = std::clamp<int>(threads, 1, 64);
  if (workers <= 1 || chunks <= 1) {
    for (std::size_t k = 0; k < chunks; ++k) run_chunk(k);
    return out;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mu;
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t k = static_cast<std::size_t>(w); k < chunks;
             k += static_cast<std::size_t>(workers))
          run_chunk(k);
      } catch (...) {
        std::scoped_lock lock(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

}  // namespace

FlightState simulate_flight(const FlightParams& p, double t, Philox& rng) {
  if (!(t > 0.0)) throw std::domain_error("horizon t must be positive");
  FlightState st;
  st.t = t;
  double heading = rng.angle();
  double remaining = t;
  for (;;) {
    const double wait = rng.exponential(p.rate);
    const double step = std::fmin(wait, remaining);
    st.x += p.speed * step * std::cos(heading);
    st.y += p.speed * step * std::sin(heading);
    if (wait >= remaining) break;
    remaining -= wait;
    ++st.switches;
    heading = rng.angle();
  }
  return st;
}

EmpiricalCdf::EmpiricalCdf(std::vector<double> samples, std::uint64_t seed)
    : samples_(std::move(samples)), seed_(seed) {
  if (samples_.empty()) throw std::invalid_argument("empirical cdf needs samples");
  std::sort(samples_.begin(), samples_.end());
}

double EmpiricalCdf::operator()(double x) const {
  const auto it = std::lower_bound(samples_.begin(), samples_.end(), x);
  return static_cast<double>(it - samples_.begin()) /
         static_cast<double>(samples_.size());
}

double EmpiricalCdf::dkw_halfwidth(double alpha, std::size_t n) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::domain_error("alpha outside (0, 1)");
  if (n == 0) throw std::domain_error("empty sample");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(n)));
}

std::vector<double> sample_distances(const PairParams& pair, double t, std::size_t n,
                                     std::uint64_t seed, int threads) {
  if (!(t > 0.0)) throw std::domain_error("horizon t must be positive");
  const FlightParams f1 = pair.first();
  const FlightParams f2 = pair.second();
  return chunked_samples(n, seed, kDistanceTag, threads, [&](Philox& gen) {
    const FlightState z1 = simulate_flight(f1, t, gen);
    const FlightState z2 = simulate_flight(f2, t, gen);
    return std::hypot(z1.x - z2.x, z1.y - z2.y);
  });
}

EmpiricalCdf empirical_distance_cdf(const PairParams& pair, double t, std::size_t n,
                                    std::uint64_t seed, int threads) {
  return EmpiricalCdf(sample_distances(pair, t, n, seed, threads), seed);
}

EmpiricalCdf empirical_marginal(const FlightParams& p, double t, std::size_t n,
                                std::uint64_t seed, int threads) {
  if (!(t > 0.0)) throw std::domain_error("horizon t must be positive");
  auto xs = chunked_samples(n, seed, kMarginalTag, threads, [&](Philox& gen) {
    return simulate_flight(p, t, gen).x;
  });
  return EmpiricalCdf(std::move(xs), seed);
}

}  // namespace flightdist
