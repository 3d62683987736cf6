#pragma once

#include <cstdint>
#include <random>

#include "setd/types.hpp"

namespace setd {

// Purposes that get their own sub-stream of a seed.
enum class StreamPurpose : std::uint64_t {
  kEnvironment = 1,  // random MDP construction
  kDataset = 2,      // transition sampling
  kTest = 3,
};

// Portable 64-bit generator. The engine is std::mt19937_64, whose output
// sequence is fixed by the C++ standard; all conversions to doubles and
// categorical draws are done here rather than through <random>
// distributions, whose algorithms are implementation-defined.
//
// Stream splitting: the sub-stream for (seed, purpose) is seeded with
// splitmix64(seed ^ splitmix64(purpose)). Sub-streams depend only on the
// seed value, never on its position in a seed list.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  static Rng for_stream(std::uint64_t seed, StreamPurpose purpose);

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Draws an index i with probability weights[i] / sum(weights). Accepts any
  // Eigen vector expression, including matrix rows.
  template <typename Derived>
  int categorical(const Eigen::DenseBase<Derived>& weights) {
    const double u = uniform() * weights.sum();
    double acc = 0.0;
    int last_positive = -1;
    for (Eigen::Index i = 0; i < weights.size(); ++i) {
      const double wi = weights.derived().coeff(i);
      if (wi <= 0.0) continue;
      acc += wi;
      last_positive = static_cast<int>(i);
      if (u < acc) return last_positive;
    }
    // Rounding left u at or above the accumulated total.
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace setd
