#pragma once

#include <cstdint>
#include <random>

namespace bfdyn {

// splitmix64 finalizer. Used (twice) to derive per-replica seeds so that
// streams are independent of worker scheduling.
std::uint64_t mix64(std::uint64_t x);

// Per-replica seed derivation: replica `index` under master seed `master`
// always gets the same stream, regardless of how work is partitioned.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

// Seeded random stream. All sampling in the library goes through this class;
// identical (seed, call sequence) yields identical draws.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0,1), 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log() argument.
  double uniform_pos() { return 1.0 - uniform01(); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Unbiased integer in [0, n). n must be positive.
  std::uint64_t uniform_below(std::uint64_t n);

  double exponential(double rate);

  double normal();

  // Exact samplers below switch on the mean: inversion for small means,
  // transformed rejection for large ones. Means above ~1e9 fall back to a
  // rounded normal; at that scale the total-variation gap is < 1e-4 and no
  // feasible replica count can resolve it.
  std::int64_t poisson(double mean);
  std::int64_t binomial(std::int64_t n, double p);

 private:
  std::int64_t poisson_inversion(double mean);
  std::int64_t poisson_ptrs(double mean);
  std::int64_t binomial_inversion(std::int64_t n, double p);
  std::int64_t binomial_btrs(std::int64_t n, double p);

  std::mt19937_64 engine_;
};

}  // namespace bfdyn
