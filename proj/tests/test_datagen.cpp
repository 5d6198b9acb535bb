// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include "seqcomp/datagen.hpp"

using namespace seqcomp;

TEST(Hmm, ShapeAndAlphabet) {
  Rng rng(1);
  const auto d = hmm_generate(5500, 21, rng);
  EXPECT_EQ(d.size(), 5500u);
  EXPECT_EQ(d.order(), 20);
  EXPECT_EQ(d.num_classes(), 2);
  for (std::size_t i = 0; i < d.size(); ++i) {
    for (int t = 1; t <= 20; ++t) ASSERT_TRUE(d.state(i, t) == 1 || d.state(i, t) == 2);
    ASSERT_TRUE(d.response(i) == 1 || d.response(i) == 2);
  }
}

TEST(Hmm, DeterministicForSeed) {
  Rng a(3), b(3);
  const auto x = hmm_generate(50, 21, a);
  const auto y = hmm_generate(50, 21, b);
  for (std::size_t i = 0; i < x.size(); ++i) {
    EXPECT_TRUE(std::equal(x.history(i).begin(), x.history(i).end(), y.history(i).begin()));
    EXPECT_EQ(x.response(i), y.response(i));
  }
}

// The arrow map is a permutation, so the stationary law is uniform over the
// 8 states and each symbol has marginal probability 1/2.
TEST(Hmm, BalancedMarginal) {
  Rng rng(4);
  const auto d = hmm_generate(20000, 21, rng);
  double ones = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) ones += d.response(i) == 1;
  EXPECT_NEAR(ones / static_cast<double>(d.size()), 0.5, 0.01);
}

TEST(Hmm, ArrowMapIsAPermutation) {
  std::vector<int> seen(9, 0);
  for (int h = 1; h <= 8; ++h) ++seen[static_cast<std::size_t>(HiddenMarkovSource::kArrow[static_cast<std::size_t>(h)])];
  for (int h = 1; h <= 8; ++h) EXPECT_EQ(seen[static_cast<std::size_t>(h)], 1);
}

TEST(Hmm, JumpAvoidsArrowTarget) {
  Rng rng(5);
  std::vector<int> counts(9, 0);
  int n = 0;
  for (int i = 0; i < 200000; ++i) {
    const int next = HiddenMarkovSource::next_state(1, rng);
    ++counts[static_cast<std::size_t>(next)];
    ++n;
  }
  EXPECT_NEAR(counts[2] / static_cast<double>(n), 0.95, 0.003);
  for (int h : {1, 3, 4, 5, 6, 7, 8}) EXPECT_NEAR(counts[static_cast<std::size_t>(h)] / static_cast<double>(n), 0.05 / 7, 0.001);
}

// Knowing two symbols of context changes the next-symbol distribution beyond
// what one symbol tells, i.e. the observed sequence is not first-order Markov.
TEST(Hmm, LongerContextIsInformative) {
  Rng rng(6);
  const auto d = hmm_generate(40000, 21, rng);
  double c[3][3][3] = {};
  for (std::size_t i = 0; i < d.size(); ++i) ++c[d.state(i, 19)][d.state(i, 20)][d.response(i)];
  double tv = 0.0;
  for (int b = 1; b <= 2; ++b) {
    const double p1 = c[1][b][1] / (c[1][b][1] + c[1][b][2]);
    const double p2 = c[2][b][1] / (c[2][b][1] + c[2][b][2]);
    tv = std::max(tv, std::abs(p1 - p2));
  }
  EXPECT_GT(tv, 0.05);
}

TEST(Text, Encoding) {
  EXPECT_EQ(encode_text("be"), (std::vector<int>{2, 1}));
  EXPECT_EQ(encode_text("a  b"), (std::vector<int>{1, 3, 2}));
  EXPECT_EQ(encode_text("Stats!"), (std::vector<int>{2, 2, 1, 2, 2, 3}));
  EXPECT_EQ(encode_text("AEIOU"), (std::vector<int>(5, 1)));
  EXPECT_EQ(encode_text(" \n\t. x"), (std::vector<int>{3, 2}));
  EXPECT_TRUE(encode_text("").empty());
}
