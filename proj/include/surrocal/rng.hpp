#pragma once

#include <cstdint>
#include <random>

namespace surrocal {

// SplitMix64 finalizer (Steele, Lea & Flood). Used to turn a
// (master_seed, replication index) pair into an independent stream seed.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// seed_r = splitmix64(splitmix64(master_seed) ^ r)
constexpr std::uint64_t replication_seed(std::uint64_t master_seed, std::uint64_t r) {
  return splitmix64(splitmix64(master_seed) ^ r);
}

// Thin wrapper over mt19937_64 seeded through splitmix64 so that nearby
// user seeds give unrelated streams.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double normal(double mean = 0.0, double sd = 1.0) {
    return mean + sd * std_normal_(engine_);
  }

  double uniform() { return std::generate_canonical<double, 53>(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  // Uniform integer in [0, bound) by rejection, free of modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t draw;
    do {
      draw = engine_();
    } while (draw >= limit);
    return draw % bound;
  }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> std_normal_{0.0, 1.0};
};

}  // namespace surrocal
