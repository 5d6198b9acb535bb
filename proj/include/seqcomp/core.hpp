// SPDX-License-Identifier: Apache-2.0
#pragma once

/*! \file
 *  \brief Domain types shared by the whole library.
 *
 *  Conventions:
 *  - state and class codes are 1-based, as they appear in data files;
 *  - history positions are 1-based (1..O), position O is the most recent
 *    state and O+1 is used as the "empty suffix" sentinel;
 *  - case indices are 0-based in memory and 1-based in every file format.
 */

#include <algorithm>
#include <cstddef>
#include <cstdio>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace seqcomp {

inline constexpr std::string_view kVersion = "1.0.0";

/// Symmetric stable law used for the coefficient priors.
enum class Law { Gaussian, Cauchy };

inline std::string_view to_string(Law law) {
  return law == Law::Gaussian ? "gaussian" : "cauchy";
}

inline Law parse_law(std::string_view text) {
  if (text == "gaussian") return Law::Gaussian;
  if (text == "cauchy") return Law::Cauchy;
  throw std::invalid_argument("unknown prior law '" + std::string(text) +
                              "' (expected gaussian or cauchy)");
}

/// Stable index alpha: 2 for Gaussian, 1 for Cauchy.
inline int stable_index(Law law) { return law == Law::Gaussian ? 2 : 1; }

/// Prior hierarchy for the order widths.
///
/// sigma_0 is fixed. For o >= 1, sigma_o ~ Inverse-Gamma(shape, (shape+1) w_o)
/// with mode w_o = mode_scale / o.
struct PriorSpec {
  Law law = Law::Cauchy;
  double sigma0 = 5.0;
  double shape = 0.25;
  double mode_scale = 0.1;

  static PriorSpec cauchy() { return {Law::Cauchy, 5.0, 0.25, 0.1}; }
  static PriorSpec gaussian() { return {Law::Gaussian, 10.0, 0.25, 0.1}; }
  static PriorSpec for_law(Law law) { return law == Law::Gaussian ? gaussian() : cauchy(); }

  double mode(int order) const { return mode_scale / order; }
  double rate(int order) const { return (shape + 1.0) * mode(order); }

  void validate() const {
    if (!(sigma0 > 0.0)) throw std::invalid_argument("PriorSpec: sigma0 must be positive");
    if (!(shape > 0.0)) throw std::invalid_argument("PriorSpec: shape must be positive");
    if (!(mode_scale > 0.0)) throw std::invalid_argument("PriorSpec: mode scale must be positive");
  }
};

/// N cases, each a history of O states followed by a response class.
class SequenceDataset {
 public:
  SequenceDataset() = default;

  /// `histories` is row-major N x O. `num_classes` / `cardinality` of 0 means
  /// "infer from data".
  SequenceDataset(std::vector<int> histories, std::vector<int> responses, int order,
                  int num_classes = 0, int cardinality = 0)
      : histories_(std::move(histories)), responses_(std::move(responses)), order_(order) {
    if (order_ < 1) throw std::invalid_argument("dataset: history length O must be >= 1");
    if (responses_.empty()) throw std::invalid_argument("dataset: at least one case is required");
    if (histories_.size() != responses_.size() * static_cast<std::size_t>(order_))
      throw std::invalid_argument("dataset: history matrix does not have N x O entries");

    int max_response = 0;
    for (int y : responses_) {
      if (y < 1) throw std::invalid_argument("dataset: response codes must be positive");
      max_response = std::max(max_response, y);
    }
    num_classes_ = num_classes > 0 ? num_classes : std::max(2, max_response);
    if (num_classes_ < 2) throw std::invalid_argument("dataset: K must be >= 2");
    if (max_response > num_classes_)
      throw std::invalid_argument("dataset: response code " + std::to_string(max_response) +
                                  " exceeds K=" + std::to_string(num_classes_));

    cardinality_.assign(static_cast<std::size_t>(order_), 0);
    for (std::size_t i = 0; i < responses_.size(); ++i) {
      for (int t = 0; t < order_; ++t) {
        const int v = histories_[i * order_ + t];
        if (v < 1) throw std::invalid_argument("dataset: state codes must be positive");
        cardinality_[t] = std::max(cardinality_[t], v);
      }
    }
    if (cardinality > 0) {
      for (int c : cardinality_)
        if (c > cardinality)
          throw std::invalid_argument("dataset: state code exceeds declared cardinality");
      std::fill(cardinality_.begin(), cardinality_.end(), cardinality);
    }
  }

  std::size_t size() const { return responses_.size(); }
  int order() const { return order_; }
  int num_classes() const { return num_classes_; }

  /// Cardinality K_t of history position t (1-based).
  int cardinality(int t) const { return cardinality_.at(static_cast<std::size_t>(t - 1)); }

  /// History of case i (0-based); element t-1 holds x_t.
  std::span<const int> history(std::size_t i) const {
    return {histories_.data() + i * static_cast<std::size_t>(order_),
            static_cast<std::size_t>(order_)};
  }

  /// x_t of case i, t 1-based.
  int state(std::size_t i, int t) const { return histories_[i * order_ + (t - 1)]; }

  /// Response class code (1..K) of case i.
  int response(std::size_t i) const { return responses_[i]; }

  std::span<const int> responses() const { return responses_; }

  /// Keeps only the last `order` history positions of every case.
  SequenceDataset with_order(int order) const {
    if (order < 1 || order > order_)
      throw std::invalid_argument("order " + std::to_string(order) +
                                  " exceeds the available history length " +
                                  std::to_string(order_));
    std::vector<int> h;
    h.reserve(size() * static_cast<std::size_t>(order));
    for (std::size_t i = 0; i < size(); ++i) {
      auto row = history(i);
      h.insert(h.end(), row.end() - order, row.end());
    }
    return SequenceDataset(std::move(h), responses_, order, num_classes_);
  }

  /// Cases [first, first + count).
  SequenceDataset slice(std::size_t first, std::size_t count) const {
    if (first + count > size() || count == 0)
      throw std::invalid_argument("dataset: slice out of range");
    std::vector<int> h(histories_.begin() + static_cast<std::ptrdiff_t>(first * order_),
                       histories_.begin() + static_cast<std::ptrdiff_t>((first + count) * order_));
    std::vector<int> y(responses_.begin() + static_cast<std::ptrdiff_t>(first),
                       responses_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return SequenceDataset(std::move(h), std::move(y), order_, num_classes_);
  }

  /// Same data with K forced to `k` (must cover the observed responses).
  SequenceDataset with_num_classes(int k) const {
    return SequenceDataset(histories_, responses_, order_, k);
  }

 private:
  std::vector<int> histories_;
  std::vector<int> responses_;
  int order_ = 0;
  int num_classes_ = 0;
  std::vector<int> cardinality_;
};

/// Interaction pattern over O history positions; a zero cell is a wildcard.
struct Pattern {
  std::vector<int> cells;

  /// The sequence pattern fixing positions `first..O` to the given history.
  /// first = O+1 yields the all-zero pattern.
  static Pattern suffix_of(std::span<const int> history, int first) {
    Pattern p;
    p.cells.assign(history.size(), 0);
    for (std::size_t t = static_cast<std::size_t>(first); t <= history.size(); ++t)
      p.cells[t - 1] = history[t - 1];
    return p;
  }

  int order() const {
    return static_cast<int>(std::count_if(cells.begin(), cells.end(), [](int c) { return c != 0; }));
  }

  /// True when every zero precedes every nonzero cell.
  bool is_sequence_pattern() const {
    auto first_nonzero = std::find_if(cells.begin(), cells.end(), [](int c) { return c != 0; });
    return std::all_of(first_nonzero, cells.end(), [](int c) { return c != 0; });
  }

  bool expressed_by(std::span<const int> history) const {
    for (std::size_t t = 0; t < cells.size(); ++t)
      if (cells[t] != 0 && cells[t] != history[t]) return false;
    return true;
  }

  friend bool operator==(const Pattern&, const Pattern&) = default;
  friend auto operator<=>(const Pattern&, const Pattern&) = default;
};

/// Overlapping windows of length O+1 over a single state sequence.
inline SequenceDataset windowize(std::span<const int> sequence, int order) {
  if (order < 1) throw std::invalid_argument("windowize: order must be >= 1");
  if (sequence.size() < static_cast<std::size_t>(order) + 1)
    throw std::invalid_argument("windowize: sequence of length " + std::to_string(sequence.size()) +
                                " is shorter than order+1 = " + std::to_string(order + 1));
  const std::size_t n = sequence.size() - static_cast<std::size_t>(order);
  std::vector<int> h;
  std::vector<int> y;
  h.reserve(n * static_cast<std::size_t>(order));
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    h.insert(h.end(), sequence.begin() + static_cast<std::ptrdiff_t>(i),
             sequence.begin() + static_cast<std::ptrdiff_t>(i + order));
    y.push_back(sequence[i + order]);
  }
  return SequenceDataset(std::move(h), std::move(y), order);
}

// Dataset file format: one case per line, O+1 positive integers (history then
// response). Lines starting with '#' are comments, except that a line of the
// exact form "# O=<int> K=<int>" declares the history length and K.

inline SequenceDataset read_dataset(std::istream& in, const std::string& name = "<stream>") {
  std::vector<int> h;
  std::vector<int> y;
  int width = 0;
  int declared_order = 0;
  int declared_k = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      int o = 0, k = 0;
      char tail = 0;
      if (std::sscanf(line.c_str(), "# O=%d K=%d%c", &o, &k, &tail) == 2) {
        declared_order = o;
        declared_k = k;
      }
      continue;
    }
    std::istringstream row(line);
    std::vector<int> values;
    std::string tok;
    while (row >> tok) {
      std::size_t used = 0;
      int v = 0;
      try {
        v = std::stoi(tok, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != tok.size() || v < 1)
        throw std::runtime_error(name + ":" + std::to_string(lineno) + ": malformed state code '" +
                                 tok + "'");
      values.push_back(v);
    }
    if (values.size() < 2)
      throw std::runtime_error(name + ":" + std::to_string(lineno) +
                               ": a case needs at least one history state and a response");
    if (width == 0) width = static_cast<int>(values.size());
    if (static_cast<int>(values.size()) != width)
      throw std::runtime_error(name + ":" + std::to_string(lineno) + ": expected " +
                               std::to_string(width) + " values, found " +
                               std::to_string(values.size()));
    h.insert(h.end(), values.begin(), values.end() - 1);
    y.push_back(values.back());
  }
  if (y.empty()) throw std::runtime_error(name + ": no cases found");
  if (declared_order != 0 && declared_order != width - 1)
    throw std::runtime_error(name + ": header declares O=" + std::to_string(declared_order) +
                             " but rows have " + std::to_string(width - 1) + " history states");
  return SequenceDataset(std::move(h), std::move(y), width - 1, declared_k);
}

inline SequenceDataset read_dataset_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file '" + path + "'");
  return read_dataset(in, path);
}

/// Writes the data rows preceded by the "# O= K=" header. `preamble` lines
/// are emitted first, each prefixed with "# ".
inline void write_dataset(std::ostream& out, const SequenceDataset& data,
                          std::span<const std::string> preamble = {}) {
  for (const auto& line : preamble) out << "# " << line << '\n';
  out << "# O=" << data.order() << " K=" << data.num_classes() << '\n';
  for (std::size_t i = 0; i < data.size(); ++i) {
    for (int v : data.history(i)) out << v << ' ';
    out << data.response(i) << '\n';
  }
}

}  // namespace seqcomp
