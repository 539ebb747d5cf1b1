#pragma once

// Deterministic random number generation. A xoshiro256++ engine seeded
// through splitmix64, plus the handful of distributions the generators
// need. Substreams are derived by mixing a 64-bit tag into the base seed,
// so independent streams per (run, purpose) are cheap and reproducible.

#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>

namespace irclust {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive combine: mix_seed(a, b) != mix_seed(b, a) in general.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t tag) {
  std::uint64_t s = base;
  std::uint64_t h = splitmix64_next(s);
  s ^= tag + 0x9e3779b97f4a7c15ULL + (s << 6) + (s >> 2);
  return h ^ splitmix64_next(s);
}

inline std::uint64_t hash_string(std::string_view text) {
  // FNV-1a, used to tag substreams by purpose name.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  std::uint64_t seed() const { return seed_; }

  // New independent stream; deterministic in (seed, tag).
  Rng substream(std::uint64_t tag) const { return Rng(mix_seed(seed_, tag)); }
  Rng substream(std::string_view purpose) const {
    return substream(hash_string(purpose));
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform in [0, 1), 53-bit resolution.
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Unbiased integer in [0, bound) by rejection.
  std::uint64_t uniform_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("uniform_below: bound must be positive");
    const std::uint64_t threshold = (-bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

  bool bernoulli(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("bernoulli: p must be in [0,1]");
    return uniform01() < p;
  }

  // Box-Muller; the spare deviate is cached.
  double gaussian(double mu, double sigma) {
    if (!(sigma >= 0.0)) throw std::invalid_argument("gaussian: sigma must be >= 0");
    if (have_spare_) {
      have_spare_ = false;
      return mu + sigma * spare_;
    }
    // u1 in (0,1] keeps the log finite.
    const double u1 = double((next_u64() >> 11) + 1) * 0x1.0p-53;
    const double u2 = uniform01();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return mu + sigma * radius * std::cos(angle);
  }

  std::size_t multinomial(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (!(w >= 0.0)) throw std::invalid_argument("multinomial: negative weight");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-9)
      throw std::invalid_argument("multinomial: weights must sum to 1");
    const double u = uniform01();
    double cum = 0.0;
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
      cum += weights[k];
      if (u < cum) return k;
    }
    return weights.size() - 1;
  }

  template <typename T>
  void shuffle(std::span<T> values) {
    for (std::size_t i = values.size(); i > 1; --i) {
      const std::size_t j = std::size_t(uniform_below(i));
      std::swap(values[i - 1], values[j]);
    }
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::array<std::uint64_t, 4> state_{};
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace irclust
