#pragma once

#include <cstdint>
#include <limits>
#include <random>

namespace cohlab {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the i-th independent stream derived from a master seed. Order independent,
/// so sample i of a sweep draws the same numbers whatever thread runs it.
constexpr std::uint64_t child_seed(std::uint64_t master, std::uint64_t index) {
  return mix64(mix64(master) ^ mix64(index + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator: output n is mix64(seed + n * golden). Satisfies
/// UniformRandomBitGenerator, so it plugs into the <random> distributions.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    state_ += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(*this); }
  double normal() { return normal_(*this); }
  int uniform_int(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(*this); }

  Rng child(std::uint64_t index) const { return Rng(child_seed(state_, index)); }

 private:
  std::uint64_t state_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace cohlab
