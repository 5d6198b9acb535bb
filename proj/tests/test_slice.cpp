// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "seqcomp/slice.hpp"
#include "test_support.hpp"

using namespace seqcomp;
using namespace seqcomp::testing;

namespace {

std::vector<double> run(const std::function<double(double)>& logf, double x0, SliceConfig cfg, int n, std::uint64_t seed,
                        int thin = 1) {
  Rng rng(seed);
  std::vector<double> xs;
  double x = x0;
  for (int i = 0; i < n * thin; ++i) {
    x = slice_sample(logf, x, cfg, rng);
    if ((i + 1) % thin == 0) xs.push_back(x);
  }
  return xs;
}

}  // namespace

TEST(Slice, StandardNormal) {
  const auto xs = run([](double x) { return -0.5 * x * x; }, 0.0, {1.0, 50, false}, 20000, 3, 5);
  EXPECT_LT(ks_statistic(xs, normal_cdf), ks_critical_1pct(xs.size()));
}

TEST(Slice, WideAndNarrowWidthsAgree) {
  for (double w : {0.05, 20.0}) {
    const auto xs = run([](double x) { return -0.5 * x * x; }, 0.5, {w, 50, false}, 10000, 4, 10);
    EXPECT_LT(ks_statistic(xs, normal_cdf), ks_critical_1pct(xs.size())) << "w=" << w;
  }
}

TEST(Slice, HeavyTails) {
  const auto xs = run([](double x) { return -std::log1p(x * x); }, 0.0, {20.0, 50, false}, 20000, 5, 5);
  EXPECT_LT(ks_statistic(xs, [](double x) { return cauchy_cdf(x, 1.0); }), ks_critical_1pct(xs.size()));
}

TEST(Slice, PositiveSupport) {
  // Exponential(1) on (0, inf).
  const auto xs = run([](double x) { return -x; }, 1.0, {1.0, 50, true}, 20000, 6, 5);
  for (double x : xs) ASSERT_GT(x, 0.0);
  EXPECT_LT(ks_statistic(xs, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-x); }), ks_critical_1pct(xs.size()));
}

TEST(Slice, BoundedSupport) {
  auto logf = [](double x) { return (x > 2.0 && x < 3.0) ? 0.0 : -std::numeric_limits<double>::infinity(); };
  const auto xs = run(logf, 2.5, {0.3, 50, false}, 10000, 7, 3);
  for (double x : xs) {
    ASSERT_GT(x, 2.0);
    ASSERT_LT(x, 3.0);
  }
  EXPECT_LT(ks_statistic(xs, [](double x) { return std::clamp(x - 2.0, 0.0, 1.0); }), ks_critical_1pct(xs.size()));
}

TEST(Slice, RejectsInvalidStart) {
  Rng rng(1);
  auto logf = [](double x) { return x > 0 ? -x : -std::numeric_limits<double>::infinity(); };
  EXPECT_THROW(slice_sample(logf, -1.0, {1.0, 50, false}, rng), std::invalid_argument);
  EXPECT_THROW(slice_sample(logf, 0.0, {1.0, 50, true}, rng), std::invalid_argument);
}
