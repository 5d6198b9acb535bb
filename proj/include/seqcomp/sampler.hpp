// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Slice-sampling MCMC over compressed parameters and order widths.
 *
 *  The linear predictor of case i for class k is the sum of s[g][k] over the
 *  groups g expressed by that case. With K = 2 the class-1 column is pinned
 *  to zero and never sampled.
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
#include <vector>

#include "seqcomp/core.hpp"
#include "seqcomp/grouping.hpp"
#include "seqcomp/random.hpp"
#include "seqcomp/slice.hpp"
#include "seqcomp/stabledist.hpp"

namespace seqcomp {

/// First class index (0-based) that carries free parameters.
inline int first_free_class(int num_classes) { return num_classes == 2 ? 1 : 0; }

/// Compressed parameters s (groups x classes, row-major) and widths sigma_0..sigma_O.
struct ChainState {
  std::size_t groups = 0;
  int classes = 0;
  std::vector<double> s;
  std::vector<double> sigma;

  double& at(std::size_t g, int k) { return s[g * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)]; }
  double at(std::size_t g, int k) const {
    return s[g * static_cast<std::size_t>(classes) + static_cast<std::size_t>(k)];
  }

  /// s = 0 and sigma_o at the prior mode w_o; sigma_0 fixed.
  static ChainState initial(std::size_t groups, int classes, int history_length, const PriorSpec& prior) {
    ChainState st;
    st.groups = groups;
    st.classes = classes;
    st.s.assign(groups * static_cast<std::size_t>(classes), 0.0);
    st.sigma.resize(static_cast<std::size_t>(history_length) + 1);
    st.sigma[0] = prior.sigma0;
    for (int o = 1; o <= history_length; ++o) st.sigma[static_cast<std::size_t>(o)] = prior.mode(o);
    return st;
  }

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

namespace detail {

/// log softmax probability of class `y` given linear predictors `l[0..K)`.
inline double log_softmax_at(const double* l, int classes, int y) {
  double m = l[0];
  for (int k = 1; k < classes; ++k) m = std::max(m, l[k]);
  double acc = 0.0;
  for (int k = 0; k < classes; ++k) acc += std::exp(l[k] - m);
  return l[y] - m - std::log(acc);
}

}  // namespace detail

/// Full log-likelihood computed from scratch through the incidence lists.
inline double log_likelihood(const ChainState& state, const Grouping& grouping, const SequenceDataset& data) {
  const int K = state.classes;
  std::vector<double> l(static_cast<std::size_t>(K));
  double total = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::fill(l.begin(), l.end(), 0.0);
    for (std::size_t g : grouping.incidence(i))
      for (int k = 0; k < K; ++k) l[static_cast<std::size_t>(k)] += state.at(g, k);
    total += detail::log_softmax_at(l.data(), K, data.response(i) - 1);
  }
  return total;
}

/// Posterior over (s, sigma) with a cached linear predictor.
///
/// The cache holds l(i,k) for every training case; changing one s[g][k]
/// touches only the cases in E_g. Coefficient conditionals therefore cost
/// O(|E_g| K) and sigma conditionals O(#groups with that order * K).
class CompressedPosterior {
 public:
  CompressedPosterior(const SequenceDataset& data, const Grouping& grouping, const PriorSpec& prior,
                      ChainState state)
      : data_(data), grouping_(grouping), prior_(prior), state_(std::move(state)) {
    if (grouping_.num_cases() != data_.size() || grouping_.history_length() != data_.order())
      throw std::invalid_argument("posterior: grouping was not built from this dataset");
    if (state_.groups != grouping_.size() || state_.classes != data_.num_classes() ||
        state_.sigma.size() != static_cast<std::size_t>(data_.order()) + 1)
      throw std::invalid_argument("posterior: chain state does not match grouping / dataset");
    refresh();
  }

  const ChainState& state() const { return state_; }
  const Grouping& grouping() const { return grouping_; }
  const PriorSpec& prior() const { return prior_; }
  int classes() const { return state_.classes; }

  /// Recomputes the linear predictor and group widths from the state.
  void refresh() {
    const auto K = static_cast<std::size_t>(state_.classes);
    linear_.assign(data_.size() * K, 0.0);
    for (std::size_t i = 0; i < data_.size(); ++i)
      for (std::size_t g : grouping_.incidence(i))
        for (std::size_t k = 0; k < K; ++k) linear_[i * K + k] += state_.at(g, static_cast<int>(k));
    widths_.resize(grouping_.size());
    for (std::size_t g = 0; g < grouping_.size(); ++g)
      widths_[g] = group_width(grouping_.pattern(g), state_.sigma, prior_.law);
  }

  double group_prior_width(std::size_t g) const { return widths_[g]; }

  double log_likelihood() const {
    double total = 0.0;
    for (std::size_t i = 0; i < data_.size(); ++i) total += case_term(i, -1, 0.0);
    return total;
  }

  /// Likelihood factors of the cases in E_g with s[g][k] shifted by delta.
  double restricted_log_likelihood(std::size_t g, int k, double delta) const {
    double total = 0.0;
    for (std::size_t i : grouping_.expression(g).case_ids) total += case_term(i, k, delta);
    return total;
  }

  /// log P(s[g][k] = value | rest) up to a constant.
  double conditional_log_density_s(std::size_t g, int k, double value) const {
    return stable_log_pdf(value, widths_[g], prior_.law) +
           restricted_log_likelihood(g, k, value - state_.at(g, k));
  }

  void set_s(std::size_t g, int k, double value) {
    const double delta = value - state_.at(g, k);
    state_.at(g, k) = value;
    const auto K = static_cast<std::size_t>(state_.classes);
    for (std::size_t i : grouping_.expression(g).case_ids) linear_[i * K + static_cast<std::size_t>(k)] += delta;
  }

  /// Per-group stable power sums of the other member widths, for one order.
  struct SigmaContext {
    int order = 0;
    std::vector<double> rest;  // parallel to grouping.groups_with_order(order)
  };

  SigmaContext prepare_sigma(int o) const {
    check_order(o);
    const int O = data_.order();
    const auto n = static_cast<std::size_t>(O) + 2;
    // below[j] = sum_{q=j}^{o-1} sigma_q^a, above[j] = sum_{q=o+1}^{j} sigma_q^a
    std::vector<double> below(n, 0.0);
    std::vector<double> above(n, 0.0);
    for (int j = o - 1; j >= 0; --j) below[static_cast<std::size_t>(j)] = below[static_cast<std::size_t>(j) + 1] + power(j);
    for (int j = o + 1; j <= O; ++j) above[static_cast<std::size_t>(j)] = above[static_cast<std::size_t>(j) - 1] + power(j);
    SigmaContext ctx;
    ctx.order = o;
    const auto groups = grouping_.groups_with_order(o);
    ctx.rest.reserve(groups.size());
    for (std::size_t g : groups) {
      const auto& sp = grouping_.pattern(g);
      ctx.rest.push_back(below[static_cast<std::size_t>(sp.min_order())] + above[static_cast<std::size_t>(sp.max_order())]);
    }
    return ctx;
  }

  /// log P(sigma_o = value | s) up to a constant.
  double conditional_log_density_sigma(const SigmaContext& ctx, double value) const {
    if (!(value > 0.0)) throw std::invalid_argument("sigma conditional: value must be positive");
    const int o = ctx.order;
    double lp = inv_gamma_log_pdf(value, prior_.shape, prior_.rate(o));
    const double vpow = prior_.law == Law::Gaussian ? value * value : value;
    const auto groups = grouping_.groups_with_order(o);
    const int k0 = first_free_class(state_.classes);
    for (std::size_t j = 0; j < groups.size(); ++j) {
      const double p = ctx.rest[j] + vpow;
      const double w = prior_.law == Law::Gaussian ? std::sqrt(p) : p;
      for (int k = k0; k < state_.classes; ++k) lp += stable_log_pdf(state_.at(groups[j], k), w, prior_.law);
    }
    return lp;
  }

  double conditional_log_density_sigma(int o, double value) const {
    return conditional_log_density_sigma(prepare_sigma(o), value);
  }

  void set_sigma(int o, double value) {
    check_order(o);
    if (!(value > 0.0)) throw std::invalid_argument("set_sigma: value must be positive");
    state_.sigma[static_cast<std::size_t>(o)] = value;
    for (std::size_t g : grouping_.groups_with_order(o))
      widths_[g] = group_width(grouping_.pattern(g), state_.sigma, prior_.law);
  }

 private:
  double power(int o) const {
    const double w = state_.sigma[static_cast<std::size_t>(o)];
    return prior_.law == Law::Gaussian ? w * w : w;
  }

  void check_order(int o) const {
    if (o < 1 || o > data_.order())
      throw std::invalid_argument("sigma order must be in 1..O (sigma_0 is fixed)");
  }

  /// Log-likelihood factor of case i, optionally with class k shifted by delta.
  double case_term(std::size_t i, int k, double delta) const {
    constexpr int kStack = 16;
    const int K = state_.classes;
    const double* row = linear_.data() + i * static_cast<std::size_t>(K);
    const int y = data_.response(i) - 1;
    if (k < 0) return detail::log_softmax_at(row, K, y);
    if (K <= kStack) {
      double buf[kStack];
      std::copy(row, row + K, buf);
      buf[k] += delta;
      return detail::log_softmax_at(buf, K, y);
    }
    std::vector<double> buf(row, row + K);
    buf[static_cast<std::size_t>(k)] += delta;
    return detail::log_softmax_at(buf.data(), K, y);
  }

  const SequenceDataset& data_;
  const Grouping& grouping_;
  PriorSpec prior_;
  ChainState state_;
  std::vector<double> linear_;
  std::vector<double> widths_;
};

/// Free-function forms; each builds a posterior view, so they are meant
/// for tests and one-off evaluation rather than inner loops.
inline double conditional_log_density_s(std::size_t g, int k, double value, const ChainState& state,
                                        const Grouping& grouping, const SequenceDataset& data,
                                        const PriorSpec& prior) {
  return CompressedPosterior(data, grouping, prior, state).conditional_log_density_s(g, k, value);
}

inline double conditional_log_density_sigma(int o, double value, const ChainState& state,
                                            const Grouping& grouping, const SequenceDataset& data,
                                            const PriorSpec& prior) {
  return CompressedPosterior(data, grouping, prior, state).conditional_log_density_sigma(o, value);
}

// ---------------------------------------------------------------------------

struct McmcConfig {
  int iterations = 2000;
  int burn_in = 750;
  int thin = 5;
  int sigma_sweeps = 10;
  int max_steps = 50;
  double coefficient_step = 0.0;  // 0: 20 for Cauchy, 10 for Gaussian
  double sigma_step = 1.0;
  std::uint64_t seed = 1;

  double coefficient_width(Law law) const {
    if (coefficient_step > 0.0) return coefficient_step;
    return law == Law::Cauchy ? 20.0 : 10.0;
  }

  bool retains(int iteration) const {
    return iteration > burn_in && (iteration - burn_in) % thin == 0;
  }

  int retained_count() const {
    return iterations > burn_in ? (iterations - burn_in) / thin : 0;
  }

  void validate() const {
    if (iterations < 1 || burn_in < 0 || thin < 1 || sigma_sweeps < 0 || max_steps < 1 || sigma_step <= 0.0)
      throw std::invalid_argument("mcmc config: invalid iteration schedule or step sizes");
  }
};

struct ChainDraw {
  int iteration = 0;
  ChainState state;
  friend bool operator==(const ChainDraw&, const ChainDraw&) = default;
};

/// Retained posterior draws plus the settings that produced them.
struct ChainRecord {
  McmcConfig config;
  PriorSpec prior;
  int history_length = 0;
  int classes = 0;
  std::size_t groups = 0;
  std::vector<ChainDraw> draws;
  std::vector<double> log_likelihood_trace;  // one entry per iteration, not persisted
};

/// One Gibbs iteration: a sweep over every free s[g][k], then
/// `sigma_sweeps` sweeps over sigma_1..sigma_O.
inline void gibbs_iteration(CompressedPosterior& post, const McmcConfig& config, Rng& rng) {
  const auto& grouping = post.grouping();
  const int K = post.classes();
  const int k0 = first_free_class(K);
  const SliceConfig coef_cfg{config.coefficient_width(post.prior().law), config.max_steps, false};
  const SliceConfig sigma_cfg{config.sigma_step, config.max_steps, true};

  post.refresh();
  for (std::size_t g = 0; g < grouping.size(); ++g) {
    for (int k = k0; k < K; ++k) {
      const double x1 = slice_sample(
          [&](double v) { return post.conditional_log_density_s(g, k, v); }, post.state().at(g, k), coef_cfg, rng);
      post.set_s(g, k, x1);
    }
  }
  const int O = grouping.history_length();
  for (int sweep = 0; sweep < config.sigma_sweeps; ++sweep) {
    for (int o = 1; o <= O; ++o) {
      const auto ctx = post.prepare_sigma(o);
      const double x1 = slice_sample([&](double v) { return post.conditional_log_density_sigma(ctx, v); },
                                     post.state().sigma[static_cast<std::size_t>(o)], sigma_cfg, rng);
      post.set_sigma(o, x1);
    }
  }
}

inline ChainRecord run_chain(const SequenceDataset& data, const Grouping& grouping, const PriorSpec& prior,
                             const McmcConfig& config, Rng& rng) {
  prior.validate();
  config.validate();
  CompressedPosterior post(data, grouping, prior,
                           ChainState::initial(grouping.size(), data.num_classes(), data.order(), prior));
  ChainRecord rec;
  rec.config = config;
  rec.prior = prior;
  rec.history_length = data.order();
  rec.classes = data.num_classes();
  rec.groups = grouping.size();
  rec.draws.reserve(static_cast<std::size_t>(config.retained_count()));
  rec.log_likelihood_trace.reserve(static_cast<std::size_t>(config.iterations));
  for (int it = 1; it <= config.iterations; ++it) {
    gibbs_iteration(post, config, rng);
    post.refresh();
    rec.log_likelihood_trace.push_back(post.log_likelihood());
    if (config.retains(it)) rec.draws.push_back({it, post.state()});
  }
  return rec;
}

// ---------------------------------------------------------------------------
// Chain file: '#' preamble lines, a "# chain key=value ..." config line, the
// column header "# iter sigma_0 .. sigma_O s[1][1] .. s[G][K]", then one
// retained draw per line. Values use 17 significant digits, which round-trips
// doubles exactly.

inline void write_chain(std::ostream& out, const ChainRecord& rec, std::span<const std::string> preamble = {}) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  const auto& c = rec.config;
  out << "# chain O=" << rec.history_length << " K=" << rec.classes << " G=" << rec.groups
      << " prior=" << to_string(rec.prior.law) << " iters=" << c.iterations << " burnin=" << c.burn_in
      << " thin=" << c.thin << " seed=" << c.seed << '\n';
  out << "# iter";
  for (int o = 0; o <= rec.history_length; ++o) out << " sigma_" << o;
  for (std::size_t g = 1; g <= rec.groups; ++g)
    for (int k = 1; k <= rec.classes; ++k) out << " s[" << g << "][" << k << "]";
  out << '\n';
  std::ostringstream buf;
  buf << std::setprecision(17);
  for (const auto& d : rec.draws) {
    buf.str({});
    buf << d.iteration;
    for (double v : d.state.sigma) buf << ' ' << v;
    for (double v : d.state.s) buf << ' ' << v;
    buf << '\n';
    out << buf.str();
  }
}

inline ChainRecord read_chain(std::istream& in, const std::string& name = "<stream>") {
  ChainRecord rec;
  bool have_config = false;
  std::string line;
  std::size_t lineno = 0;
  auto fail = [&](const std::string& msg) {
    return std::runtime_error(name + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line.rfind("# chain ", 0) == 0) {
      std::istringstream toks(line.substr(8));
      std::string tok;
      std::string law = "cauchy";
      while (toks >> tok) {
        const auto eq = tok.find('=');
        if (eq == std::string::npos) throw fail("malformed config token '" + tok + "'");
        const std::string key = tok.substr(0, eq);
        const std::string val = tok.substr(eq + 1);
        try {
          if (key == "O") rec.history_length = std::stoi(val);
          else if (key == "K") rec.classes = std::stoi(val);
          else if (key == "G") rec.groups = std::stoull(val);
          else if (key == "prior") law = val;
          else if (key == "iters") rec.config.iterations = std::stoi(val);
          else if (key == "burnin") rec.config.burn_in = std::stoi(val);
          else if (key == "thin") rec.config.thin = std::stoi(val);
          else if (key == "seed") rec.config.seed = std::stoull(val);
        } catch (const std::exception&) {
          throw fail("malformed value in '" + tok + "'");
        }
      }
      rec.prior = PriorSpec::for_law(parse_law(law));
      have_config = true;
      continue;
    }
    if (line[0] == '#') continue;
    if (!have_config) throw fail("draw line before the '# chain' config line");
    const std::size_t ncols = 1 + static_cast<std::size_t>(rec.history_length) + 1 +
                              rec.groups * static_cast<std::size_t>(rec.classes);
    std::istringstream row(line);
    ChainDraw d;
    if (!(row >> d.iteration)) throw fail("missing iteration index");
    d.state = ChainState::initial(rec.groups, rec.classes, rec.history_length, rec.prior);
    std::vector<double> values;
    values.reserve(ncols - 1);
    std::string tok;
    while (row >> tok) {
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size()) throw fail("malformed number '" + tok + "'");
      values.push_back(v);
    }
    if (values.size() + 1 != ncols)
      throw fail("expected " + std::to_string(ncols) + " columns, found " + std::to_string(values.size() + 1));
    std::copy(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(d.state.sigma.size()), d.state.sigma.begin());
    std::copy(values.begin() + static_cast<std::ptrdiff_t>(d.state.sigma.size()), values.end(), d.state.s.begin());
    rec.draws.push_back(std::move(d));
  }
  if (!have_config) throw std::runtime_error(name + ": missing '# chain' config line");
  return rec;
}

}  // namespace seqcomp
