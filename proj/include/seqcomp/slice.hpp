// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "seqcomp/random.hpp"

namespace seqcomp {

struct SliceConfig {
  double width = 1.0;     // w: step size of the initial interval and each step out
  int max_steps = 50;     // m
  bool positive_only = false;
};

/// One univariate slice-sampling update with stepping out and shrinkage.
///
/// `log_density` may return -inf outside the support. With `positive_only`
/// the interval is clipped at 0 and non-positive points are never evaluated.
template <class LogDensity>
double slice_sample(LogDensity&& log_density, double x0, const SliceConfig& cfg, Rng& rng) {
  if (cfg.positive_only && !(x0 > 0.0)) throw std::invalid_argument("slice_sample: x0 must be positive");
  const double lp0 = log_density(x0);
  if (!std::isfinite(lp0)) throw std::invalid_argument("slice_sample: log density at x0 is not finite");

  auto logf = [&](double x) {
    if (cfg.positive_only && !(x > 0.0)) return -std::numeric_limits<double>::infinity();
    return static_cast<double>(log_density(x));
  };

  const double level = lp0 - rng.exponential();

  double left = x0 - cfg.width * rng.uniform();
  double right = left + cfg.width;
  // Split the m steps between the two directions at random.
  int steps_left = static_cast<int>(std::floor(cfg.max_steps * rng.uniform()));
  int steps_right = cfg.max_steps - 1 - steps_left;

  while (steps_left > 0 && logf(left) > level) {
    left -= cfg.width;
    --steps_left;
  }
  while (steps_right > 0 && logf(right) > level) {
    right += cfg.width;
    --steps_right;
  }
  if (cfg.positive_only && left < 0.0) left = 0.0;

  for (;;) {
    const double x1 = left + (right - left) * rng.uniform();
    if (logf(x1) > level) return x1;
    if (x1 < x0)
      left = x1;
    else if (x1 > x0)
      right = x1;
    else
      return x0;  // interval collapsed onto x0 in floating point
  }
}

}  // namespace seqcomp
