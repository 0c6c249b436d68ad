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

#pragma once

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"

namespace b2t {

/// Unit-cost Levenshtein distance with a two-row table.
template <typename T>
std::size_t edit_distance(std::span<const T> a, std::span<const T> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

/// Splits UTF-8 text into code points; invalid bytes stand alone.
inline std::vector<char32_t> utf8_code_points(std::string_view s) {
  std::vector<char32_t> out;
  for (std::size_t i = 0; i < s.size();) {
    const auto c = static_cast<unsigned char>(s[i]);
    std::size_t len = c < 0x80 ? 1 : (c >> 5) == 0x6 ? 2 : (c >> 4) == 0xE ? 3 : (c >> 3) == 0x1E ? 4 : 1;
    if (i + len > s.size()) len = 1;
    char32_t cp = len == 1 ? c : c & (0x7F >> len);
    for (std::size_t k = 1; k < len; ++k)
      cp = (cp << 6) | (static_cast<unsigned char>(s[i + k]) & 0x3F);
    out.push_back(cp);
    i += len;
  }
  return out;
}

/// Word error rate over normalized words.
inline double wer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  const auto ref = normalize_words(reference);
  const auto hyp = normalize_words(hypothesis);
  if (ref.empty()) throw invalid_input_error("wer needs a non-empty reference");
  return static_cast<double>(edit_distance<std::string>(ref, hyp)) /
         static_cast<double>(ref.size());
}

/// Character error rate over the code points of two strings.
inline double cer(std::string_view reference, std::string_view hypothesis) {
  const auto ref = utf8_code_points(reference);
  const auto hyp = utf8_code_points(hypothesis);
  if (ref.empty()) throw invalid_input_error("cer needs a non-empty reference");
  return static_cast<double>(edit_distance<char32_t>(ref, hyp)) /
         static_cast<double>(ref.size());
}

/// Character error rate of the space-joined normalized word sequences.
inline double cer(std::span<const std::string> reference, std::span<const std::string> hypothesis) {
  return cer(join_words(normalize_words(reference)), join_words(normalize_words(hypothesis)));
}

}  // namespace b2t
