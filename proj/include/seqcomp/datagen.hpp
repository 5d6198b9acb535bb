// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "seqcomp/core.hpp"
#include "seqcomp/random.hpp"

namespace seqcomp {

/// Eight-state hidden Markov source with binary observations.
///
/// The hidden chain follows its dominant arrow with probability 0.95 and
/// otherwise jumps uniformly to one of the 7 other states. Even hidden states
/// emit 1 with probability 0.95, odd states emit 2 with probability 0.95.
///
/// Arrow map (surrogate topology): 1->2, 2->3, 3->8, 4->1, 5->4, 6->5, 7->6, 8->7,
/// a single 8-cycle 1 2 3 8 7 6 5 4 of alternating parity.
struct HiddenMarkovSource {
  static constexpr int kStates = 8;
  static constexpr std::array<int, kStates + 1> kArrow = {0, 2, 3, 8, 1, 4, 5, 6, 7};
  static constexpr double kStay = 0.95;
  static constexpr double kEmit = 0.95;

  static int next_state(int h, Rng& rng) {
    if (rng.uniform() < kStay) return kArrow[static_cast<std::size_t>(h)];
    // Uniform over the 7 states other than the arrow target.
    int j = static_cast<int>(rng.below(kStates - 1)) + 1;
    if (j >= kArrow[static_cast<std::size_t>(h)]) ++j;
    return j;
  }

  static int emit(int h, Rng& rng) {
    const bool typical = rng.uniform() < kEmit;
    const int usual = (h % 2 == 0) ? 1 : 2;
    return typical ? usual : 3 - usual;
  }

  /// One observed sequence; the hidden start state is uniform.
  static std::vector<int> sequence(std::size_t length, Rng& rng) {
    std::vector<int> x(length);
    int h = static_cast<int>(rng.below(kStates)) + 1;
    for (std::size_t t = 0; t < length; ++t) {
      if (t > 0) h = next_state(h, rng);
      x[t] = emit(h, rng);
    }
    return x;
  }
};

/// `n` independent sequences of `length` states, one case each: the first
/// length-1 states are the history, the last is the response.
inline SequenceDataset hmm_generate(std::size_t n, std::size_t length, Rng& rng) {
  if (length < 2) throw std::invalid_argument("hmm_generate: length must be >= 2");
  if (n == 0) throw std::invalid_argument("hmm_generate: at least one sequence is required");
  std::vector<int> h;
  std::vector<int> y;
  h.reserve(n * (length - 1));
  y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto x = HiddenMarkovSource::sequence(length, rng);
    h.insert(h.end(), x.begin(), x.end() - 1);
    y.push_back(x.back());
  }
  return SequenceDataset(std::move(h), std::move(y), static_cast<int>(length - 1), 2, 2);
}

/// Vowels -> 1, other letters -> 2, anything else -> 3; runs of 3 collapse.
inline std::vector<int> encode_text(std::string_view text) {
  std::vector<int> out;
  out.reserve(text.size());
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    int code = 3;
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      switch (c | 0x20) {
        case 'a': case 'e': case 'i': case 'o': case 'u': code = 1; break;
        default: code = 2;
      }
    }
    if (code == 3 && !out.empty() && out.back() == 3) continue;
    out.push_back(code);
  }
  return out;
}

}  // namespace seqcomp
