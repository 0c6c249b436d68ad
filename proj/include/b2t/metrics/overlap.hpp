// Copyright 2026 The b2t Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Unigram-overlap metrics: BLEU-1, ROUGE-1 F and a lexical-resource-free
// METEOR variant (exact then suffix-stem matching, no synonyms).

#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"

namespace b2t {

namespace overlap_detail {

inline std::vector<std::string> prepare_reference(std::span<const std::string> reference,
                                                  const char* metric) {
  auto ref = normalize_words(reference);
  if (ref.empty()) throw invalid_input_error(std::string(metric) + " needs a non-empty reference");
  return ref;
}

/// Sum over words of min(count in a, count in b).
inline std::size_t clipped_matches(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
  std::map<std::string_view, std::size_t> counts;
  for (const auto& w : a) ++counts[w];
  std::size_t m = 0;
  for (const auto& w : b) {
    auto it = counts.find(w);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++m;
    }
  }
  return m;
}

}  // namespace overlap_detail

inline double bleu1(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  const auto ref = overlap_detail::prepare_reference(reference, "bleu1");
  const auto hyp = normalize_words(hypothesis);
  if (hyp.empty()) return 0.0;
  const double precision = static_cast<double>(overlap_detail::clipped_matches(ref, hyp)) /
                           static_cast<double>(hyp.size());
  const double bp = std::exp(std::min(
      0.0, 1.0 - static_cast<double>(ref.size()) / static_cast<double>(hyp.size())));
  return precision * bp;
}

inline double rouge1f(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  const auto ref = overlap_detail::prepare_reference(reference, "rouge1f");
  const auto hyp = normalize_words(hypothesis);
  if (hyp.empty()) return 0.0;
  const auto m = static_cast<double>(overlap_detail::clipped_matches(ref, hyp));
  if (m == 0.0) return 0.0;
  const double p = m / static_cast<double>(hyp.size());
  const double r = m / static_cast<double>(ref.size());
  return 2.0 * p * r / (p + r);
}

/// Light suffix stripping for stem matching: "walked", "walking" and "walks"
/// all reduce to "walk". Stems keep at least three characters.
inline std::string strip_suffix(std::string_view w) {
  if (w.size() > 2 && w.substr(w.size() - 2) == "'s") w.remove_suffix(2);
  static constexpr std::array<std::string_view, 6> kSuffixes = {"ingly", "edly", "ing", "ed",
                                                                 "es",    "s"};
  for (auto suf : kSuffixes)
    if (w.size() >= suf.size() + 3 && w.substr(w.size() - suf.size()) == suf)
      return std::string(w.substr(0, w.size() - suf.size()));
  return std::string(w);
}

/// Greedy left-to-right alignment; -1 marks an unmatched hypothesis word.
inline std::vector<long> meteor_alignment(const std::vector<std::string>& ref,
                                          const std::vector<std::string>& hyp) {
  std::vector<long> align(hyp.size(), -1);
  std::vector<bool> used(ref.size(), false);
  auto stage = [&](auto&& key) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (align[i] >= 0) continue;
      const auto k = key(hyp[i]);
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && key(ref[j]) == k) {
          align[i] = static_cast<long>(j);
          used[j] = true;
          break;
        }
      }
    }
  };
  stage([](const std::string& w) { return w; });
  stage([](const std::string& w) { return strip_suffix(w); });
  return align;
}

inline double meteor_lite(std::span<const std::string> reference,
                          std::span<const std::string> hypothesis) {
  const auto ref = overlap_detail::prepare_reference(reference, "meteor_lite");
  const auto hyp = normalize_words(hypothesis);
  const auto align = meteor_alignment(ref, hyp);
  double matches = 0.0, chunks = 0.0;
  long prev = -2;
  for (long a : align) {
    if (a >= 0) {
      matches += 1.0;
      if (a != prev + 1) chunks += 1.0;
    }
    prev = a >= 0 ? a : -2;
  }
  if (matches == 0.0) return 0.0;
  const double p = matches / static_cast<double>(hyp.size());
  const double r = matches / static_cast<double>(ref.size());
  const double fmean = p * r / (0.9 * p + 0.1 * r);
  const double frag = chunks / matches;
  const double penalty = 0.5 * frag * frag * frag;
  return fmean * (1.0 - penalty);
}

}  // namespace b2t
