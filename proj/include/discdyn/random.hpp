#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace discdyn {

/// Seedable random source with a fully pinned algorithm.
///
/// The engine is MT19937-64, whose output sequence the C++ standard fixes
/// exactly. The uniform and exponential transforms are spelled out here
/// instead of using std::*_distribution, whose algorithms vary between
/// standard libraries. Identical seeds therefore give identical draws on
/// every platform, which keeps simulated fixtures reproducible.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform draw in [0, 1) with 53 random bits.
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Exponential draw with the given rate, by inverse CDF.
  double next_exponential(double rate) {
    return -std::log1p(-next_uniform()) / rate;
  }

  std::uint64_t next_raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace discdyn
