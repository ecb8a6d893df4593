#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>

namespace bnnmi {

// Mixes a parent seed with a stream id into an independent child seed.
// Used everywhere a sub-computation needs its own reproducible stream
// (per pool item, per iteration, per bootstrap replicate).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

// xoshiro256** seeded through splitmix64. All variate generation is done
// here rather than through <random> distributions so that streams are
// bit-identical across standard library implementations.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()();

  // Uniform on [0, 1) with 53 random bits.
  double uniform();
  // Uniform on (0, 1); safe to take the log of.
  double uniform_open();
  double uniform(double lo, double hi);
  // Uniform integer in [0, n). n must be positive.
  std::size_t below(std::size_t n);
  // Standard normal (Marsaglia polar method).
  double normal();
  // Log of a Gamma(shape, 1) variate, shape > 0. Working in log space keeps
  // tiny shapes from underflowing to an exact zero.
  double log_gamma_variate(double shape);

 private:
  std::uint64_t s_[4];
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace bnnmi
