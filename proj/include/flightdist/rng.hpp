#pragma once

// Counter-based random number generator (Philox 4x64, 10 rounds).  A stream
// is identified by (seed, stream) and produces the same sequence regardless
// of what other streams exist, which is what makes the Monte Carlo sampling
// reproducible under any work partition: chunk k of a run always draws from
// stream k.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace flightdist {

class Philox {
 public:
  Philox(std::uint64_t seed, std::uint64_t stream) : key_{seed, stream} {}

  std::uint64_t next_u64() {
    if (pos_ == 4) {
      fill_block();
      pos_ = 0;
    }
    return block_[pos_++];
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Exponential with the given rate; uniform01() < 1 keeps the log finite.
  double exponential(double rate) { return -std::log1p(-uniform01()) / rate; }

  // Uniform angle on [0, 2*pi).
  double angle() { return 2.0 * std::numbers::pi * uniform01(); }

 private:
  static void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi,
                      std::uint64_t& lo) {
    unsigned __int128 prod =
        static_cast<unsigned __int128>(a) * static_cast<unsigned __int128>(b);
    hi = static_cast<std::uint64_t>(prod >> 64);
    lo = static_cast<std::uint64_t>(prod);
  }

  void fill_block() {
    constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
    constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
    constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ULL;
    constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73BULL;

    std::array<std::uint64_t, 4> x = counter_;
    std::uint64_t k0 = key_[0];
    std::uint64_t k1 = key_[1];
    for (int round = 0; round < 10; ++round) {
      std::uint64_t hi0, lo0, hi1, lo1;
      mulhilo(kMul0, x[0], hi0, lo0);
      mulhilo(kMul1, x[2], hi1, lo1);
      x = {hi1 ^ x[1] ^ k0, lo1, hi0 ^ x[3] ^ k1, lo0};
      k0 += kWeyl0;
      k1 += kWeyl1;
    }
    block_ = x;
    for (auto& limb : counter_) {
      if (++limb != 0) break;
    }
  }

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_{0, 0, 0, 0};
  std::array<std::uint64_t, 4> block_{};
  int pos_ = 4;
};

}  // namespace flightdist
