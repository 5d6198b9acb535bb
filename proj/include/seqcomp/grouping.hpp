// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Compression structure for sequence interaction patterns.
 *
 *  A superpattern [0..0 A_b..A_O]_f stands for the chain of sequence patterns
 *  [0..0 A_t..A_O] for t = b..f (t = O+1 is the all-zero pattern). All of its
 *  members are expressed by exactly the same training cases, so the
 *  likelihood only sees the sum of their coefficients. The member starting
 *  at position t has order O-t+1.
 */

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "seqcomp/core.hpp"

namespace seqcomp {

/// Sorted set of 0-based training-case indices.
struct Expression {
  std::vector<std::size_t> case_ids;

  std::size_t size() const { return case_ids.size(); }
  bool contains(std::size_t i) const {
    return std::binary_search(case_ids.begin(), case_ids.end(), i);
  }
  friend bool operator==(const Expression&, const Expression&) = default;
};

struct SuperPattern {
  int history_length = 0;  // O
  int b = 1;               // first fixed position of the longest member
  int f = 1;               // start position of the shortest member
  std::vector<int> suffix; // A_b..A_O

  int member_count() const { return f - b + 1; }
  int min_order() const { return history_length - f + 1; }
  int max_order() const { return history_length - b + 1; }
  bool has_order(int o) const { return o >= min_order() && o <= max_order(); }

  /// A_t for b <= t <= O.
  int value(int t) const { return suffix[static_cast<std::size_t>(t - b)]; }

  /// Member pattern starting at position t (b <= t <= f).
  Pattern member(int t) const {
    Pattern p;
    p.cells.assign(static_cast<std::size_t>(history_length), 0);
    for (int u = t; u <= history_length; ++u) p.cells[static_cast<std::size_t>(u - 1)] = value(u);
    return p;
  }

  friend bool operator==(const SuperPattern&, const SuperPattern&) = default;
};

/// Superpatterns with their expressions and, for each case, the groups it
/// expresses. Immutable once built.
class Grouping {
 public:
  Grouping(int history_length, std::size_t num_cases, std::vector<SuperPattern> patterns,
           std::vector<Expression> expressions)
      : history_length_(history_length),
        patterns_(std::move(patterns)),
        expressions_(std::move(expressions)),
        incidence_(num_cases),
        by_order_(static_cast<std::size_t>(history_length) + 1) {
    if (patterns_.size() != expressions_.size())
      throw std::invalid_argument("grouping: pattern and expression lists differ in length");
    for (std::size_t g = 0; g < patterns_.size(); ++g) {
      for (std::size_t i : expressions_[g].case_ids) incidence_.at(i).push_back(g);
      for (int o = patterns_[g].min_order(); o <= patterns_[g].max_order(); ++o)
        by_order_[static_cast<std::size_t>(o)].push_back(g);
    }
  }

  int history_length() const { return history_length_; }
  std::size_t size() const { return patterns_.size(); }
  std::size_t num_cases() const { return incidence_.size(); }

  const SuperPattern& pattern(std::size_t g) const { return patterns_[g]; }
  const Expression& expression(std::size_t g) const { return expressions_[g]; }
  std::span<const SuperPattern> patterns() const { return patterns_; }
  std::span<const Expression> expressions() const { return expressions_; }

  /// Groups expressed by training case i.
  std::span<const std::size_t> incidence(std::size_t i) const { return incidence_[i]; }

  /// Groups with a member of order o.
  std::span<const std::size_t> groups_with_order(int o) const {
    return by_order_[static_cast<std::size_t>(o)];
  }

  /// Number of training-expressed patterns, i.e. original parameters per class.
  std::size_t original_parameter_count() const {
    std::size_t n = 0;
    for (const auto& sp : patterns_) n += static_cast<std::size_t>(sp.member_count());
    return n;
  }

  double compression_ratio() const {
    return static_cast<double>(size()) / static_cast<double>(original_parameter_count());
  }

  /// Sum of |E_g|, the per-class cost of one likelihood sweep.
  std::size_t incidence_count() const {
    std::size_t n = 0;
    for (const auto& e : expressions_) n += e.size();
    return n;
  }

 private:
  int history_length_;
  std::vector<SuperPattern> patterns_;
  std::vector<Expression> expressions_;
  std::vector<std::vector<std::size_t>> incidence_;
  std::vector<std::vector<std::size_t>> by_order_;
};

/// Groups all training-expressed sequence patterns into superpatterns.
///
/// Walks the pattern tree from position O down to 1. A node whose cases all
/// share one value at the next position is merged with its only non-empty
/// child; a node whose cases disagree is emitted and each non-empty child
/// starts a new superpattern. Children are visited depth-first in ascending
/// state value, which fixes the group ids.
inline Grouping build_grouping(const SequenceDataset& data) {
  const int O = data.order();

  struct Pending {
    int b;
    int f;
    int t;                      // next position to split on
    std::vector<int> reversed;  // A_O, A_{O-1}, ..., A_b
    std::vector<std::size_t> cases;
  };

  std::vector<SuperPattern> patterns;
  std::vector<Expression> expressions;

  std::vector<Pending> stack;
  {
    Pending root{O + 1, O + 1, O, {}, {}};
    root.cases.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) root.cases[i] = i;
    stack.push_back(std::move(root));
  }

  std::vector<std::pair<int, std::size_t>> keyed;
  while (!stack.empty()) {
    Pending cur = std::move(stack.back());
    stack.pop_back();

    std::vector<Pending> children;
    while (cur.t >= 1) {
      keyed.clear();
      for (std::size_t i : cur.cases) keyed.emplace_back(data.state(i, cur.t), i);
      std::sort(keyed.begin(), keyed.end());
      if (keyed.front().first == keyed.back().first) {
        cur.reversed.push_back(keyed.front().first);
        cur.b = cur.t;
        --cur.t;
        continue;
      }
      for (std::size_t j = 0; j < keyed.size();) {
        const int v = keyed[j].first;
        Pending child{cur.t, cur.t, cur.t - 1, cur.reversed, {}};
        child.reversed.push_back(v);
        for (; j < keyed.size() && keyed[j].first == v; ++j) child.cases.push_back(keyed[j].second);
        children.push_back(std::move(child));
      }
      break;
    }

    SuperPattern sp;
    sp.history_length = O;
    sp.b = cur.b;
    sp.f = cur.f;
    sp.suffix.assign(cur.reversed.rbegin(), cur.reversed.rend());
    patterns.push_back(std::move(sp));
    expressions.push_back(Expression{std::move(cur.cases)});

    for (auto it = children.rbegin(); it != children.rend(); ++it) stack.push_back(std::move(*it));
  }

  return Grouping(O, data.size(), std::move(patterns), std::move(expressions));
}

/// Which members of a superpattern a test history expresses.
struct PatternMatch {
  int count = 0;        // t_g
  int first_position;   // b': matched members start at positions b'..f
};

/// Members of `sp` expressed by `history`: none if the history disagrees
/// with A_f..A_O, otherwise the members at positions b'..f where b' is the
/// smallest position >= b with x_{b'..O} = A_{b'..O}.
inline PatternMatch match_super_pattern(const SuperPattern& sp, std::span<const int> history) {
  const int O = sp.history_length;
  if (static_cast<int>(history.size()) != O)
    throw std::invalid_argument("match: history has length " + std::to_string(history.size()) +
                                ", expected " + std::to_string(O));
  for (int t = O; t >= sp.f; --t)
    if (history[static_cast<std::size_t>(t - 1)] != sp.value(t)) return {0, sp.f + 1};
  int first = sp.f;
  while (first > sp.b && history[static_cast<std::size_t>(first - 2)] == sp.value(first - 1))
    --first;
  return {sp.f - first + 1, first};
}

/// Stable-law aggregate of per-order widths over orders lo..hi (inclusive):
/// root-sum-square for Gaussian, plain sum for Cauchy. Empty range gives 0.
inline double order_range_width(std::span<const double> sigma, int lo, int hi, Law law) {
  double acc = 0.0;
  for (int o = lo; o <= hi; ++o) {
    const double w = sigma[static_cast<std::size_t>(o)];
    acc += law == Law::Gaussian ? w * w : w;
  }
  return law == Law::Gaussian ? std::sqrt(acc) : acc;
}

/// Prior width of the compressed parameter of `sp`.
inline double group_width(const SuperPattern& sp, std::span<const double> sigma, Law law) {
  return order_range_width(sigma, sp.min_order(), sp.max_order(), law);
}

}  // namespace seqcomp
