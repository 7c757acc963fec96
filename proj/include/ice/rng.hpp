#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "ice/types.hpp"

namespace ice {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Stream seed derived from (seed, index); trials keyed by index are
// order-independent, which is what makes parallel Monte Carlo deterministic.
inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ull));
}

// mt19937_64 with an explicit Box-Muller transform on top, so the produced
// doubles depend only on this file and not on std distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(splitmix64(seed)) {}

  std::uint64_t seed() const { return seed_; }
  Rng substream(std::uint64_t index) const { return Rng(substream_seed(seed_, index)); }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on (0, 1].
  double uniform() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

  Vec normal_vec(Eigen::Index n) {
    Vec v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = normal();
    return v;
  }

  // Index drawn from the distribution given by probs (assumed normalized).
  int categorical(const Vec& probs) {
    const double u = uniform();
    double acc = 0.0;
    for (Eigen::Index i = 0; i + 1 < probs.size(); ++i) {
      acc += probs(i);
      if (u <= acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size() - 1);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ice
