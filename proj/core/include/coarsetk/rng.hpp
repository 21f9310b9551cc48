#pragma once

#include <cstdint>
#include <random>

#include "coarsetk/exact.hpp"

namespace coarsetk {

/// Deterministic seeded RNG for randomized suites. Bounded draws avoid
/// std::uniform_int_distribution, whose output is implementation-defined,
/// so identical seeds produce identical streams on every platform.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }

  /// Uniform integer in [0, bound) via rejection; bound > 0.
  std::uint64_t below(std::uint64_t bound) {
    std::uint64_t limit = ~std::uint64_t(0) - (~std::uint64_t(0) % bound);
    std::uint64_t v;
    do {
      v = eng_();
    } while (v >= limit);
    return v % bound;
  }

  i64 range(i64 lo, i64 hi) {  // inclusive
    return lo + static_cast<i64>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  bool chance(std::uint32_t num, std::uint32_t den) { return below(den) < num; }

private:
  std::mt19937_64 eng_;
};

}  // namespace coarsetk
