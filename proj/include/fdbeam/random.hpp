#pragma once

#include <cstdint>
#include <random>

#include "fdbeam/types.hpp"

namespace fdbeam {

// SplitMix64 finalizer, used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Stream seed for (master_seed, axis_index, trial_index).
constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t axis, std::uint64_t trial) {
  return mix64(mix64(mix64(master) ^ axis) ^ (trial * 0xD1B54A32D192ED03ULL));
}

// mt19937_64 with the handful of draws the simulator needs. Bit-reproducible for a given
// seed within one build (the standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
  double normal() { return normal_(engine_); }

  // Circularly-symmetric CN(0, 1): variance 1/2 per real and imaginary part.
  cd complex_normal() {
    const double re = normal();
    const double im = normal();
    return {re * kInvSqrt2, im * kInvSqrt2};
  }

  CMat complex_normal(Eigen::Index rows, Eigen::Index cols) {
    CMat out(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
      for (Eigen::Index r = 0; r < rows; ++r) out(r, c) = complex_normal();
    return out;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static constexpr double kInvSqrt2 = 0.70710678118654752440;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace fdbeam
