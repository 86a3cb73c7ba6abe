#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace crl {

// Deterministic random source. mt19937_64 is fully specified by the standard;
// the value mappings below are our own, so identical seeds give identical
// streams on every platform and build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n); n must be positive.
  std::size_t index(std::size_t n) {
    // Modulo bias is negligible at 64 bits for desk-scale n.
    return static_cast<std::size_t>(engine_() % n);
  }

  double exponential() {
    double u = uniform();
    return -std::log1p(-u);
  }

  // Symmetric Dirichlet(1): uniform on the probability simplex.
  std::vector<double> dirichlet(std::size_t n) {
    std::vector<double> w(n);
    double total = 0.0;
    for (auto& x : w) {
      x = exponential();
      total += x;
    }
    for (auto& x : w) x /= total;
    return w;
  }

  // Independent child stream; distinct labels give decorrelated streams.
  Rng derive(std::uint64_t label) const {
    return Rng(splitmix64(seed_ ^ (0x9e3779b97f4a7c15ULL * (label + 1))));
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_ = 0;
};

}  // namespace crl
