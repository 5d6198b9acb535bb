// SPDX-License-Identifier: Apache-2.0
#pragma once

// Shared helpers for the unit and acceptance suites: small fixed datasets,
// random dataset generators, Kolmogorov-Smirnov statistics and an
// independent quadrature oracle for the Cauchy split law.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <vector>

#include "seqcomp/core.hpp"
#include "seqcomp/random.hpp"

namespace seqcomp::testing {

/// The three binary training cases (1,2,1), (2,1,2), (1,1,2) with O = 3.
/// Responses are arbitrary; grouping ignores them.
inline SequenceDataset fig3_dataset() {
  return SequenceDataset({1, 2, 1, 2, 1, 2, 1, 1, 2}, {1, 2, 2}, 3);
}

inline SequenceDataset random_dataset(std::size_t n, int order, int states, int classes, Rng& rng) {
  std::vector<int> h(n * static_cast<std::size_t>(order));
  std::vector<int> y(n);
  for (auto& v : h) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(states))) + 1;
  for (auto& v : y) v = static_cast<int>(rng.below(static_cast<std::uint64_t>(classes))) + 1;
  return SequenceDataset(std::move(h), std::move(y), order, classes);
}

/// One-sample KS statistic sup |F_n - F|.
inline double ks_statistic(std::vector<double> xs, const std::function<double(double)>& cdf) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  double d = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double f = cdf(xs[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

/// Asymptotic 1% critical value.
inline double ks_critical_1pct(std::size_t n) { return 1.6276 / std::sqrt(static_cast<double>(n)); }

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }
inline double cauchy_cdf(double x, double w) { return 0.5 + std::atan(x / w) / std::numbers::pi; }

/// Quadrature oracle for the Cauchy split law: integrates the unnormalized
/// density 1/((S1^2+x^2)(S2^2+(x-s)^2)) after x = c tan(theta), splitting the
/// theta range at both peaks. Shares no code with the closed form.
class SplitQuadrature {
 public:
  SplitQuadrature(double s, double sigma1, double sigma2)
      : s_(s), s1_(sigma1), s2_(sigma2), scale_(std::max({sigma1, sigma2, std::abs(s)})) {
    total_ = integrate_theta(-std::numbers::pi / 2, std::numbers::pi / 2);
  }

  double density(double x) const { return raw(x) / total_; }

  double cdf(double x) const {
    const double theta = std::atan(x / scale_);
    return integrate_theta(-std::numbers::pi / 2, theta) / total_;
  }

  /// CDF at every point of an ascending grid, accumulated cell by cell.
  std::vector<double> cdf_grid(const std::vector<double>& xs) const {
    std::vector<double> out(xs.size());
    double prev = -std::numbers::pi / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double theta = std::atan(xs[i] / scale_);
      acc += integrate_theta(prev, theta);
      out[i] = acc / total_;
      prev = theta;
    }
    return out;
  }

 private:
  double raw(double x) const { return 1.0 / ((s1_ * s1_ + x * x) * (s2_ * s2_ + (x - s_) * (x - s_))); }

  double integrand(double theta) const {
    const double c = std::cos(theta);
    if (c <= 0.0) return 0.0;
    const double x = scale_ * std::tan(theta);
    return raw(x) * scale_ / (c * c);
  }

  double integrate_theta(double a, double b) const {
    std::vector<double> cuts = {a};
    for (double peak : {0.0, s_}) {
      for (double off : {-10.0, -1.0, -0.1, 0.0, 0.1, 1.0, 10.0}) {
        const double w = peak == 0.0 ? s1_ : s2_;
        const double t = std::atan((peak + off * w) / scale_);
        if (t > a && t < b) cuts.push_back(t);
      }
    }
    std::sort(cuts.begin(), cuts.end());
    // Near-coincident cuts leave slivers whose error estimate is roundoff
    // bound; drop them.
    std::vector<double> kept = {a};
    for (double t : cuts)
      if (t - kept.back() > 1e-9) kept.push_back(t);
    if (b - kept.back() > 1e-9 || kept.size() == 1)
      kept.push_back(b);
    else
      kept.back() = b;
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < kept.size(); ++i) {
      if (kept[i + 1] <= kept[i]) continue;
      // Integrate on [-1, 1] so the library's error test is not skewed by
      // the cell width.
      const double mid = 0.5 * (kept[i] + kept[i + 1]);
      const double half = 0.5 * (kept[i + 1] - kept[i]);
      acc += half * boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
                        [&](double u) { return integrand(mid + half * u); }, -1.0, 1.0, 15, 1e-12);
    }
    return acc;
  }

  double s_, s1_, s2_, scale_, total_;
};

}  // namespace seqcomp::testing
