// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Test-time prediction from compressed chains.
 *
 *  The O+1 patterns of a test history split into three kinds: members of
 *  superpatterns it fully expresses, members of partially expressed
 *  superpatterns (whose compressed parameter is split with the conditional
 *  split law), and new patterns no training case expresses (a fresh prior
 *  draw for their sum).
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "seqcomp/core.hpp"
#include "seqcomp/grouping.hpp"
#include "seqcomp/random.hpp"
#include "seqcomp/sampler.hpp"
#include "seqcomp/stabledist.hpp"

namespace seqcomp {

/// One superpattern the test history expresses at least partly.
struct MatchedGroup {
  std::size_t group = 0;
  int matched = 0;        // t_g
  int members = 0;        // n_g
  int matched_lo = 0;     // matched member orders are matched_lo..matched_hi
  int matched_hi = 0;
  int group_hi = 0;       // unmatched orders are matched_hi+1..group_hi
  double sigma1 = 0.0;    // width of the expressed sub-sum
  double sigma2 = 0.0;    // width of the complement

  bool full() const { return matched == members; }
};

struct TestDecomposition {
  int history_length = 0;
  std::vector<MatchedGroup> groups;  // only groups with t_g > 0
  int first_new_order = 0;           // new orders are first_new_order..O (empty if > O)
  double new_width = 0.0;            // width of the sum of the new-pattern coefficients

  int new_order_count() const { return history_length - first_new_order + 1; }
};

/// Structure only; widths are filled by `apply_widths`.
inline TestDecomposition match_test_case(std::span<const int> history, const Grouping& grouping) {
  const int O = grouping.history_length();
  if (static_cast<int>(history.size()) != O)
    throw std::invalid_argument("test history has length " + std::to_string(history.size()) + ", expected " +
                                std::to_string(O));
  TestDecomposition dec;
  dec.history_length = O;
  int top = -1;
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    const auto& sp = grouping.pattern(g);
    const auto m = match_super_pattern(sp, history);
    if (m.count == 0) continue;
    MatchedGroup mg;
    mg.group = g;
    mg.matched = m.count;
    mg.members = sp.member_count();
    mg.matched_lo = sp.min_order();
    mg.matched_hi = O - m.first_position + 1;
    mg.group_hi = sp.max_order();
    top = std::max(top, mg.matched_hi);
    dec.groups.push_back(mg);
  }
  dec.first_new_order = top + 1;
  return dec;
}

inline void apply_widths(TestDecomposition& dec, std::span<const double> sigma, Law law) {
  for (auto& mg : dec.groups) {
    mg.sigma1 = order_range_width(sigma, mg.matched_lo, mg.matched_hi, law);
    mg.sigma2 = order_range_width(sigma, mg.matched_hi + 1, mg.group_hi, law);
  }
  dec.new_width = order_range_width(sigma, dec.first_new_order, dec.history_length, law);
}

inline TestDecomposition decompose_test_case(std::span<const int> history, const Grouping& grouping,
                                             std::span<const double> sigma, Law law) {
  auto dec = match_test_case(history, grouping);
  apply_widths(dec, sigma, law);
  return dec;
}

namespace detail {

inline void softmax_inplace(std::vector<double>& l) {
  const double m = *std::max_element(l.begin(), l.end());
  double acc = 0.0;
  for (double& v : l) {
    v = std::exp(v - m);
    acc += v;
  }
  for (double& v : l) v /= acc;
}

}  // namespace detail

/// Predictive class probabilities for one history, averaged over the
/// retained draws. Draw d uses the stream derived from (seed, case_index, d).
inline std::vector<double> predictive_probs(std::span<const int> history, const ChainRecord& chain,
                                            const Grouping& grouping, std::uint64_t seed,
                                            std::uint64_t case_index = 0) {
  if (chain.draws.empty()) throw std::invalid_argument("predict: chain has no retained draws");
  if (chain.groups != grouping.size() || chain.history_length != grouping.history_length())
    throw std::invalid_argument("predict: chain and grouping come from different training data");
  const int K = chain.classes;
  const int k0 = first_free_class(K);
  const Law law = chain.prior.law;

  auto dec = match_test_case(history, grouping);
  std::vector<double> avg(static_cast<std::size_t>(K), 0.0);
  std::vector<double> l(static_cast<std::size_t>(K));
  for (std::size_t d = 0; d < chain.draws.size(); ++d) {
    const auto& st = chain.draws[d].state;
    apply_widths(dec, st.sigma, law);
    Rng rng = Rng::derive(seed, {case_index, static_cast<std::uint64_t>(d)});
    std::fill(l.begin(), l.end(), 0.0);
    for (int k = k0; k < K; ++k) {
      double acc = 0.0;
      for (const auto& mg : dec.groups) {
        const double s = st.at(mg.group, k);
        acc += mg.full() ? s : split_sample({s, mg.sigma1, mg.sigma2, law}, rng);
      }
      if (dec.new_order_count() > 0) acc += stable_sample(dec.new_width, law, rng);
      l[static_cast<std::size_t>(k)] = acc;
    }
    detail::softmax_inplace(l);
    for (int k = 0; k < K; ++k) avg[static_cast<std::size_t>(k)] += l[static_cast<std::size_t>(k)];
  }
  for (double& v : avg) v /= static_cast<double>(chain.draws.size());
  return avg;
}

/// Predictions for every case of `test`; results do not depend on `threads`.
inline std::vector<std::vector<double>> predict_all(const SequenceDataset& test, const ChainRecord& chain,
                                                    const Grouping& grouping, std::uint64_t seed,
                                                    unsigned threads = 1) {
  if (test.order() != grouping.history_length())
    throw std::invalid_argument("predict: test histories have length " + std::to_string(test.order()) +
                                ", model order is " + std::to_string(grouping.history_length()));
  std::vector<std::vector<double>> out(test.size());
  auto work = [&](std::size_t begin, std::size_t step) {
    for (std::size_t i = begin; i < test.size(); i += step)
      out[i] = predictive_probs(test.history(i), chain, grouping, seed, i);
  };
  threads = std::max(1u, threads);
  if (threads == 1) {
    work(0, 1);
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Metrics. Class codes in `truths` are 1-based.

/// Class code (1-based) of the largest probability; ties go to the smaller code.
inline int argmax_class(std::span<const double> p) {
  return static_cast<int>(std::max_element(p.begin(), p.end()) - p.begin()) + 1;
}

inline void check_metric_inputs(std::span<const std::vector<double>> preds, std::span<const int> truths) {
  if (preds.size() != truths.size())
    throw std::invalid_argument("metrics: " + std::to_string(preds.size()) + " predictions for " +
                                std::to_string(truths.size()) + " truths");
  if (preds.empty()) throw std::invalid_argument("metrics: no predictions");
  for (std::size_t i = 0; i < preds.size(); ++i)
    if (truths[i] < 1 || truths[i] > static_cast<int>(preds[i].size()))
      throw std::invalid_argument("metrics: truth class " + std::to_string(truths[i]) + " out of range");
}

inline double error_rate(std::span<const std::vector<double>> preds, std::span<const int> truths) {
  check_metric_inputs(preds, truths);
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < preds.size(); ++i) wrong += argmax_class(preds[i]) != truths[i];
  return static_cast<double>(wrong) / static_cast<double>(preds.size());
}

/// Average minus log probability of the true class; +inf if any is zero.
inline double amlp(std::span<const std::vector<double>> preds, std::span<const int> truths) {
  check_metric_inputs(preds, truths);
  double acc = 0.0;
  for (std::size_t i = 0; i < preds.size(); ++i) acc -= std::log(preds[i][static_cast<std::size_t>(truths[i] - 1)]);
  return acc / static_cast<double>(preds.size());
}

// Predictions file: '#' comment lines, then one line per test case with the
// K probabilities followed by the argmax class code.

inline void write_predictions(std::ostream& out, std::span<const std::vector<double>> preds,
                              std::span<const std::string> preamble = {}) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& p : preds) {
    buf.str({});
    for (double v : p) buf << v << ' ';
    buf << argmax_class(p) << '\n';
    out << buf.str();
  }
}

inline std::vector<std::vector<double>> read_predictions(std::istream& in, const std::string& name = "<stream>") {
  std::vector<std::vector<double>> preds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    std::vector<double> values;
    std::string tok;
    while (row >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size())
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": malformed number '" + tok + "'");
      values.push_back(v);
    }
    if (values.size() < 3)
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected K>=2 probabilities and a class");
    values.pop_back();
    if (!preds.empty() && values.size() != preds.front().size())
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": inconsistent number of classes");
    preds.push_back(std::move(values));
  }
  if (preds.empty()) throw std::runtime_error(name + ": no predictions found");
  return preds;
}

}  // namespace seqcomp
