// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Uncompressed reference model: one coefficient per training-expressed
 *  pattern and class.
 *
 *  Everything here is computed by direct pattern enumeration and matching
 *  and does not use the grouping. It exists to check the compressed model
 *  against and is not used by the command-line tool.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "seqcomp/core.hpp"
#include "seqcomp/grouping.hpp"
#include "seqcomp/random.hpp"
#include "seqcomp/sampler.hpp"
#include "seqcomp/slice.hpp"
#include "seqcomp/stabledist.hpp"

namespace seqcomp::oracle {

/// Every sequence pattern expressed by at least one training case.
struct PatternSet {
  std::vector<Pattern> patterns;                    // sorted
  std::vector<std::vector<std::size_t>> expressed;  // training cases per pattern
  std::map<Pattern, std::size_t> index;

  static PatternSet enumerate(const SequenceDataset& data) {
    PatternSet ps;
    const int O = data.order();
    for (std::size_t i = 0; i < data.size(); ++i)
      for (int t = 1; t <= O + 1; ++t) ps.index.emplace(Pattern::suffix_of(data.history(i), t), 0);
    for (auto& [p, idx] : ps.index) {
      idx = ps.patterns.size();
      ps.patterns.push_back(p);
      std::vector<std::size_t> cases;
      for (std::size_t i = 0; i < data.size(); ++i)
        if (p.expressed_by(data.history(i))) cases.push_back(i);
      ps.expressed.push_back(std::move(cases));
    }
    return ps;
  }

  std::size_t size() const { return patterns.size(); }

  const std::size_t* find(const Pattern& p) const {
    auto it = index.find(p);
    return it == index.end() ? nullptr : &it->second;
  }
};

struct UncompressedModel {
  PatternSet patterns;
  int classes = 0;
  std::vector<double> beta;   // patterns x classes, row-major
  std::vector<double> sigma;  // sigma_0..sigma_O

  double& at(std::size_t p, int k) { return beta[p * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)]; }
  double at(std::size_t p, int k) const {
    return beta[p * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)];
  }

  static UncompressedModel zeros(const SequenceDataset& data, const PriorSpec& prior) {
    UncompressedModel m;
    m.patterns = PatternSet::enumerate(data);
    m.classes = data.num_classes();
    m.beta.assign(m.patterns.size() * static_cast<std::size_t>(m.classes), 0.0);
    m.sigma = ChainState::initial(0, m.classes, data.order(), prior).sigma;
    return m;
  }
};

/// Direct evaluation: l(x_i, k) is the sum of beta over every stored pattern
/// that x_i expresses.
inline double oracle_log_likelihood(const UncompressedModel& model, const SequenceDataset& data) {
  const int K = model.classes;
  std::vector<double> l(static_cast<std::size_t>(K));
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::fill(l.begin(), l.end(), 0.0);
    for (std::size_t p = 0; p < model.patterns.size(); ++p)
      if (model.patterns.patterns[p].expressed_by(data.history(i)))
        for (int k = 0; k < K; ++k) l[static_cast<std::size_t>(k)] += model.at(p, k);
    total += detail::log_softmax_at(l.data(), K, data.response(i) - 1);
  }
  return total;
}

/// Sums the coefficients of each superpattern's members into s[g][k].
inline ChainState compress(const UncompressedModel& model, const Grouping& grouping) {
  ChainState st;
  st.groups = grouping.size();
  st.classes = model.classes;
  st.s.assign(st.groups * static_cast<std::size_t>(st.classes), 0.0);
  st.sigma = model.sigma;
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    const auto& sp = grouping.pattern(g);
    for (int t = sp.b; t <= sp.f; ++t) {
      const auto* p = model.patterns.find(sp.member(t));
      if (p == nullptr) throw std::logic_error("compress: superpattern member is not a training-expressed pattern");
      for (int k = 0; k < st.classes; ++k) st.at(g, k) += model.at(*p, k);
    }
  }
  return st;
}

struct UncompressedChain {
  struct Draw {
    std::vector<double> beta;
    std::vector<double> sigma;
  };
  McmcConfig config;
  PriorSpec prior;
  int history_length = 0;
  int classes = 0;
  PatternSet patterns;
  std::vector<Draw> draws;

  double beta(std::size_t d, std::size_t p, int k) const {
    return draws[d].beta[p * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)];
  }
};

inline constexpr std::size_t kMaxOracleCases = 200;
inline constexpr int kMaxOracleOrder = 8;

/// Same Gibbs protocol as the compressed sampler, but over every beta.
inline UncompressedChain run_uncompressed_chain(const SequenceDataset& data, const PriorSpec& prior,
                                                const McmcConfig& config, Rng& rng) {
  if (data.size() > kMaxOracleCases || data.order() > kMaxOracleOrder)
    throw std::invalid_argument("oracle chain is limited to desk-scale data (N <= 200, O <= 8)");
  prior.validate();
  config.validate();
  const int O = data.order();
  const int K = data.num_classes();
  const int k0 = first_free_class(K);
  const auto KK = static_cast<std::size_t>(K);

  UncompressedModel model = UncompressedModel::zeros(data, prior);
  const auto P = model.patterns.size();
  std::vector<int> order(P);
  std::vector<std::vector<std::size_t>> by_order(static_cast<std::size_t>(O) + 1);
  for (std::size_t p = 0; p < P; ++p) {
    order[p] = model.patterns.patterns[p].order();
    by_order[static_cast<std::size_t>(order[p])].push_back(p);
  }

  std::vector<double> linear(data.size() * KK, 0.0);
  auto refresh = [&] {
    std::fill(linear.begin(), linear.end(), 0.0);
    for (std::size_t p = 0; p < P; ++p)
      for (std::size_t i : model.patterns.expressed[p])
        for (std::size_t k = 0; k < KK; ++k) linear[i * KK + k] += model.at(p, static_cast<int>(k));
  };
  auto case_term = [&](std::size_t i, int k, double delta) {
    std::vector<double> row(linear.begin() + static_cast<std::ptrdiff_t>(i * KK),
                            linear.begin() + static_cast<std::ptrdiff_t>((i + 1) * KK));
    row[static_cast<std::size_t>(k)] += delta;
    return detail::log_softmax_at(row.data(), K, data.response(i) - 1);
  };

  const SliceConfig coef_cfg{config.coefficient_width(prior.law), config.max_steps, false};
  const SliceConfig sigma_cfg{config.sigma_step, config.max_steps, true};

  UncompressedChain chain;
  chain.config = config;
  chain.prior = prior;
  chain.history_length = O;
  chain.classes = K;
  chain.patterns = model.patterns;
  for (int it = 1; it <= config.iterations; ++it) {
    refresh();
    for (std::size_t p = 0; p < P; ++p) {
      const double width = model.sigma[static_cast<std::size_t>(order[p])];
      for (int k = k0; k < K; ++k) {
        const double cur = model.at(p, k);
        auto logf = [&](double v) {
          double lp = stable_log_pdf(v, width, prior.law);
          for (std::size_t i : model.patterns.expressed[p]) lp += case_term(i, k, v - cur);
          return lp;
        };
        const double x1 = slice_sample(logf, cur, coef_cfg, rng);
        model.at(p, k) = x1;
        for (std::size_t i : model.patterns.expressed[p]) linear[i * KK + static_cast<std::size_t>(k)] += x1 - cur;
      }
    }
    for (int sweep = 0; sweep < config.sigma_sweeps; ++sweep) {
      for (int o = 1; o <= O; ++o) {
        auto logf = [&](double v) {
          double lp = inv_gamma_log_pdf(v, prior.shape, prior.rate(o));
          for (std::size_t p : by_order[static_cast<std::size_t>(o)])
            for (int k = k0; k < K; ++k) lp += stable_log_pdf(model.at(p, k), v, prior.law);
          return lp;
        };
        model.sigma[static_cast<std::size_t>(o)] =
            slice_sample(logf, model.sigma[static_cast<std::size_t>(o)], sigma_cfg, rng);
      }
    }
    if (config.retains(it)) chain.draws.push_back({model.beta, model.sigma});
  }
  return chain;
}

/// Predictive probabilities from the uncompressed chain. Coefficients of
/// patterns no training case expresses are drawn from their priors one by
/// one.
inline std::vector<double> oracle_predictive_probs(std::span<const int> history, const UncompressedChain& chain,
                                                   std::uint64_t seed, std::uint64_t case_index = 0) {
  if (chain.draws.empty()) throw std::invalid_argument("oracle predict: empty chain");
  const int O = chain.history_length;
  const int K = chain.classes;
  const int k0 = first_free_class(K);
  const auto& patterns = chain.patterns;

  std::vector<const std::size_t*> found(static_cast<std::size_t>(O) + 1);
  for (int t = 1; t <= O + 1; ++t) found[static_cast<std::size_t>(t - 1)] = patterns.find(Pattern::suffix_of(history, t));

  std::vector<double> avg(static_cast<std::size_t>(K), 0.0);
  std::vector<double> l(static_cast<std::size_t>(K));
  for (std::size_t d = 0; d < chain.draws.size(); ++d) {
    const auto& sigma = chain.draws[d].sigma;
    Rng rng = Rng::derive(seed ^ 0x9e3779b97f4a7c15ULL, {case_index, static_cast<std::uint64_t>(d)});
    std::fill(l.begin(), l.end(), 0.0);
    for (int k = k0; k < K; ++k) {
      double acc = 0.0;
      for (int t = 1; t <= O + 1; ++t) {
        const auto* p = found[static_cast<std::size_t>(t - 1)];
        const int o = O - t + 1;
        acc += p ? chain.beta(d, *p, k) : stable_sample(sigma[static_cast<std::size_t>(o)], chain.prior.law, rng);
      }
      l[static_cast<std::size_t>(k)] = acc;
    }
    const double mx = *std::max_element(l.begin(), l.end());
    double z = 0.0;
    for (double& v : l) z += (v = std::exp(v - mx));
    for (int k = 0; k < K; ++k) avg[static_cast<std::size_t>(k)] += l[static_cast<std::size_t>(k)] / z;
  }
  for (double& v : avg) v /= static_cast<double>(chain.draws.size());
  return avg;
}

}  // namespace seqcomp::oracle
