#pragma once

#include <cstdint>
#include <random>

namespace archie {

// Seeded PRNG with distribution transforms written out explicitly, so that a
// seed produces the same stream under every standard library (the std::
// distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(mix(seed)) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer on [0, n). Rejection sampling keeps it unbiased.
  std::uint64_t index(std::uint64_t n);

  // Standard normal via Box-Muller; the second variate is cached.
  double normal();

  // Derives an independent child seed, e.g. one per environment worker.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t stream);

 private:
  static std::uint64_t mix(std::uint64_t x);

  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace archie
