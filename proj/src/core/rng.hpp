#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace sliceguard {

// Deterministic random source. std::mt19937_64 output is specified by the
// standard, but the std distribution adapters are not; we draw through our
// own mappings so equal seeds give bit-identical streams on any platform.
class Rng {
 public:
  explicit Rng(uint64_t seed) : engine_(seed), seed_hash_(seed) {}

  uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  int64_t uniform_int(int64_t lo, int64_t hi) {
    uint64_t span = static_cast<uint64_t>(hi - lo) + 1;
    // Rejection sampling to avoid modulo bias.
    uint64_t limit = UINT64_MAX - UINT64_MAX % span;
    uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return lo + static_cast<int64_t>(x % span);
  }

  bool bernoulli(double p) { return uniform() < p; }

  // Multiplicative lognormal jitter around 1.0 with log-stddev sigma.
  double lognormal_factor(double sigma) {
    return std::exp(sigma * gaussian());
  }

  double gaussian() {
    // Box-Muller; draws two uniforms per call, no caching so the
    // consumption pattern stays obvious.
    double u1 = uniform();
    double u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
  }

  // Derive an independent child seed for a named sub-stream.
  uint64_t child_seed(uint64_t stream_id) const {
    return splitmix(seed_hash_ ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1)));
  }

  static uint64_t splitmix(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static Rng with_parent(uint64_t parent_seed, uint64_t stream_id) {
    return Rng(splitmix(parent_seed ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1))));
  }

 private:
  std::mt19937_64 engine_;
  uint64_t seed_hash_ = 0;
};

}  // namespace sliceguard
