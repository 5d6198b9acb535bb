// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <sstream>

#include "seqcomp/oracle.hpp"
#include "seqcomp/predict.hpp"
#include "test_support.hpp"

using namespace seqcomp;
using namespace seqcomp::testing;

namespace {

ChainRecord single_draw_chain(const Grouping& g, int K, const ChainState& st, Law law) {
  ChainRecord rec;
  rec.prior = PriorSpec::for_law(law);
  rec.history_length = g.history_length();
  rec.classes = K;
  rec.groups = g.size();
  rec.draws.push_back({1, st});
  return rec;
}

}  // namespace

TEST(Decompose, ThreeCaseExample) {
  const auto g = build_grouping(fig3_dataset());
  const std::vector<double> sigma = {5.0, 0.1, 0.05, 1.0 / 30};
  const auto dec = decompose_test_case(std::vector<int>{2, 2, 1}, g, sigma, Law::Cauchy);
  ASSERT_EQ(dec.groups.size(), 2u);
  EXPECT_EQ(dec.groups[0].group, 0u);
  EXPECT_TRUE(dec.groups[0].full());
  EXPECT_EQ(dec.groups[1].group, 1u);
  EXPECT_EQ(dec.groups[1].matched, 2);
  EXPECT_EQ(dec.groups[1].members, 3);
  EXPECT_EQ(dec.groups[1].matched_lo, 1);
  EXPECT_EQ(dec.groups[1].matched_hi, 2);
  EXPECT_NEAR(dec.groups[1].sigma1, 0.15, 1e-15);
  EXPECT_NEAR(dec.groups[1].sigma2, 1.0 / 30, 1e-15);
  EXPECT_EQ(dec.first_new_order, 3);
  EXPECT_EQ(dec.new_order_count(), 1);
  EXPECT_NEAR(dec.new_width, 1.0 / 30, 1e-15);
}

TEST(Decompose, UnseenLastStateMatchesOnlyTheEmptyPattern) {
  // Every training history ends in 1, so the root group spans orders 0 and 1.
  const SequenceDataset d({1, 1, 2, 1, 1, 1}, {1, 2, 1}, 2);
  const auto g = build_grouping(d);
  const std::vector<double> sigma = {5.0, 0.1, 0.05};
  const auto dec = decompose_test_case(std::vector<int>{1, 2}, g, sigma, Law::Gaussian);
  ASSERT_EQ(dec.groups.size(), 1u);
  EXPECT_EQ(dec.groups[0].group, 0u);
  EXPECT_EQ(dec.groups[0].matched, 1);
  EXPECT_EQ(dec.groups[0].members, 2);
  EXPECT_NEAR(dec.groups[0].sigma1, 5.0, 1e-15);
  EXPECT_NEAR(dec.groups[0].sigma2, 0.1, 1e-15);
  EXPECT_EQ(dec.first_new_order, 1);
  EXPECT_NEAR(dec.new_width, std::sqrt(0.01 + 0.0025), 1e-15);
}

TEST(Decompose, TrainingHistoryIsFullyCovered) {
  Rng rng(3);
  const auto d = random_dataset(40, 5, 2, 2, rng);
  const auto g = build_grouping(d);
  for (std::size_t i = 0; i < d.size(); ++i) {
    const auto dec = match_test_case(d.history(i), g);
    EXPECT_EQ(dec.new_order_count(), 0);
    int total = 0;
    for (const auto& mg : dec.groups) {
      EXPECT_TRUE(mg.full());
      total += mg.matched;
    }
    EXPECT_EQ(total, 6);
  }
}

// Every test pattern is accounted for once: matched members plus new orders
// cover orders 0..O, and the matched sets agree with brute-force lookup.
TEST(Decompose, CoversEveryOrderOnce) {
  Rng rng(4);
  for (int rep = 0; rep < 10; ++rep) {
    const auto d = random_dataset(30, 6, 2, 2, rng);
    const auto g = build_grouping(d);
    const auto ps = oracle::PatternSet::enumerate(d);
    const auto probe = random_dataset(30, 6, 2, 2, rng);
    for (std::size_t i = 0; i < probe.size(); ++i) {
      const auto dec = match_test_case(probe.history(i), g);
      std::vector<int> seen(7, 0);
      for (const auto& mg : dec.groups)
        for (int o = mg.matched_lo; o <= mg.matched_hi; ++o) ++seen[static_cast<std::size_t>(o)];
      for (int o = dec.first_new_order; o <= 6; ++o) ++seen[static_cast<std::size_t>(o)];
      for (int o = 0; o <= 6; ++o) {
        EXPECT_EQ(seen[static_cast<std::size_t>(o)], 1);
        const bool known = ps.find(Pattern::suffix_of(probe.history(i), 7 - o)) != nullptr;
        EXPECT_EQ(known, o < dec.first_new_order);
      }
    }
  }
}

TEST(Predict, FullMatchIsDeterministic) {
  const auto g = build_grouping(fig3_dataset());
  auto st = ChainState::initial(g.size(), 2, 3, PriorSpec::cauchy());
  for (std::size_t j = 0; j < g.size(); ++j) st.at(j, 1) = 0.3 * static_cast<double>(j + 1);
  const auto chain = single_draw_chain(g, 2, st, Law::Cauchy);
  // (1,2,1) expresses groups 0 and 1 fully.
  const auto p = predictive_probs(std::vector<int>{1, 2, 1}, chain, g, 1);
  const double l = 0.3 + 0.6;
  EXPECT_NEAR(p[1], 1.0 / (1.0 + std::exp(-l)), 1e-15);
  EXPECT_NEAR(p[0] + p[1], 1.0, 1e-15);
}

TEST(Predict, ZeroCoefficientsGiveUniformWhenNothingIsSampled) {
  const auto g = build_grouping(fig3_dataset());
  const auto st = ChainState::initial(g.size(), 3, 3, PriorSpec::gaussian());
  const auto chain = single_draw_chain(g, 3, st, Law::Gaussian);
  const auto p = predictive_probs(std::vector<int>{2, 1, 2}, chain, g, 1);
  for (double v : p) EXPECT_NEAR(v, 1.0 / 3.0, 1e-15);
}

// One draw, one partial group: the class-2 predictor is split_sample +
// new-pattern draw, so its average over many seeds matches a direct Monte
// Carlo of the same law.
TEST(Predict, PartialAndNewTermsFollowTheirLaws) {
  const auto g = build_grouping(fig3_dataset());
  auto st = ChainState::initial(g.size(), 2, 3, PriorSpec::cauchy());
  st.sigma = {5.0, 0.5, 0.8, 0.3};
  st.at(1, 1) = 1.2;
  const auto chain = single_draw_chain(g, 2, st, Law::Cauchy);
  const std::vector<int> x = {2, 2, 1};
  double got = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) got += predictive_probs(x, chain, g, 99, static_cast<std::uint64_t>(i))[1];
  got /= n;

  // Reference: importance-weighted draws of the matched sub-sum given the
  // group total, plus an independent new-pattern term.
  Rng rng(1234);
  double ref = 0.0, wsum = 0.0;
  for (int i = 0; i < 400000; ++i) {
    const double a = 1.3 * rng.cauchy();
    const double w = std::exp(stable_log_pdf(1.2 - a, 0.3, Law::Cauchy));
    const double l = a + 0.3 * rng.cauchy();
    ref += w / (1.0 + std::exp(-l));
    wsum += w;
  }
  ref /= wsum;
  EXPECT_NEAR(got, ref, 0.01);
}

TEST(Predict, RepeatableAndThreadIndependent) {
  Rng rng(5);
  const auto d = random_dataset(40, 8, 2, 2, rng);
  const auto test = random_dataset(25, 8, 2, 2, rng);
  const auto g = build_grouping(d);
  McmcConfig cfg;
  cfg.iterations = 40;
  cfg.burn_in = 20;
  cfg.thin = 4;
  cfg.sigma_sweeps = 2;
  Rng chain_rng(1);
  const auto chain = run_chain(d, g, PriorSpec::cauchy(), cfg, chain_rng);
  const auto a = predict_all(test, chain, g, 7, 1);
  const auto b = predict_all(test, chain, g, 7, 3);
  EXPECT_EQ(a, b);
  const auto c = predict_all(test, chain, g, 8, 1);
  EXPECT_NE(a, c);
  EXPECT_THROW(predict_all(random_dataset(3, 4, 2, 2, rng), chain, g, 7), std::invalid_argument);
}

TEST(Metrics, Values) {
  const std::vector<std::vector<double>> half = {{0.5, 0.5}, {0.5, 0.5}};
  const std::vector<int> truth = {1, 2};
  EXPECT_NEAR(amlp(half, truth), std::log(2.0), 1e-15);
  const std::vector<std::vector<double>> sure = {{1.0, 0.0}, {0.0, 1.0}};
  EXPECT_EQ(error_rate(sure, truth), 0.0);
  EXPECT_EQ(amlp(sure, truth), 0.0);
  const std::vector<std::vector<double>> three = {{0.75, 0.25}};
  EXPECT_NEAR(amlp(three, std::vector<int>{1}), 0.2877, 1e-4);
  EXPECT_EQ(argmax_class(std::vector<double>{0.5, 0.5}), 1);
  EXPECT_EQ(error_rate(half, truth), 0.5);
}

TEST(PredictionFile, RoundTrip) {
  const std::vector<std::vector<double>> p = {{0.1, 0.9}, {0.123456789012345678, 1 - 0.123456789012345678}};
  std::stringstream buf;
  write_predictions(buf, p);
  EXPECT_EQ(read_predictions(buf), p);
}
