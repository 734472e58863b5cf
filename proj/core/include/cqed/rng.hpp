#pragma once

#include <cstdint>
#include <random>

namespace cqed {

// Deterministic generator for every stochastic operation. There is no global
// RNG state: callers pass a seed explicitly and parallel partitions derive
// independent sub-streams from (seed, stream index).
//
// Normal/exponential/Poisson draws are implemented here instead of using the
// <random> distributions because the standard leaves those algorithms
// implementation-defined and we promise bit-identical output across builds.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix(seed)) {}

  static Rng substream(std::uint64_t seed, std::uint64_t index) {
    return Rng(mix(seed) ^ mix(0x9e3779b97f4a7c15ULL + index));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Standard normal via Box-Muller (cached second variate).
  double normal();
  double normal(double mean, double sigma) { return mean + sigma * normal(); }

  // Exponential with the given mean.
  double exponential(double mean);

  // Exact Poisson sampling: sequential inversion for small means, Hormann's
  // transformed rejection (PTRD) otherwise.
  long long poisson(double mean);

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer; decorrelates consecutive seeds.
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  std::mt19937_64 engine_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace cqed
