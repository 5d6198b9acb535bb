// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>
#include <vector>

namespace seqcomp {

/// Random stream used throughout the library.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The variate transforms below are written out by hand instead of
/// using the <random> distributions, whose algorithms are unspecified, so a
/// seed reproduces the same draws on every standard library.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  /// Independent stream keyed by (seed, tags...). Used to give each test
  /// case / retained draw its own stream so results do not depend on the
  /// processing order.
  static Rng derive(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::vector<std::uint32_t> words;
    words.reserve(2 * (tags.size() + 1));
    auto push = [&words](std::uint64_t v) {
      words.push_back(static_cast<std::uint32_t>(v));
      words.push_back(static_cast<std::uint32_t>(v >> 32));
    };
    push(seed);
    for (auto t : tags) push(t);
    std::seed_seq seq(words.begin(), words.end());
    Rng r;
    r.engine_.seed(seq);
    return r;
  }

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() {
    constexpr double kScale = 1.0 / 9007199254740992.0;  // 2^-53
    return (static_cast<double>(engine_() >> 11) + 0.5) * kScale;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by the Box-Muller transform (one variate per call).
  double normal() {
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  double exponential() { return -std::log(uniform()); }

  /// Standard Cauchy by inversion.
  double cauchy() { return std::tan(std::numbers::pi * (uniform() - 0.5)); }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    // Reject the top partial block so the modulo is unbiased.
    const std::uint64_t limit = (~std::uint64_t{0}) - ((~std::uint64_t{0}) % n);
    std::uint64_t v;
    do {
      v = engine_();
    } while (v >= limit);
    return v % n;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace seqcomp
