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

#include <cctype>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace b2t {

/// Placeholder emitted at out-of-vocabulary positions that were not filled.
inline constexpr std::string_view kUnk = "<UNK>";

/// Spelling of the placeholder inside the instruction text of LLM prompts.
inline constexpr std::string_view kPromptUnk = "[UNK]";

namespace text_detail {

inline bool is_word_char(unsigned char c) {
  // Bytes >= 0x80 belong to multi-byte UTF-8 letters (accented words).
  return c >= 0x80 || std::isalnum(c) != 0;
}

}  // namespace text_detail

/// Lowercases ASCII, maps typographic apostrophes to `'`, and strips leading
/// and trailing punctuation. Internal apostrophes and hyphens survive, so
/// "Don't," becomes "don't". The UNK placeholder is returned unchanged.
/// An all-punctuation token normalizes to the empty string.
inline std::string normalize_word(std::string_view raw) {
  if (raw == kUnk) return std::string(kUnk);
  std::string s;
  s.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    // U+2018 / U+2019 single quotation marks.
    if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
        static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(raw[i + 2]) == 0x98 ||
         static_cast<unsigned char>(raw[i + 2]) == 0x99)) {
      s.push_back('\'');
      i += 2;
      continue;
    }
    // U+201C / U+201D double quotation marks are plain punctuation.
    if (i + 2 < raw.size() && static_cast<unsigned char>(raw[i]) == 0xE2 &&
        static_cast<unsigned char>(raw[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(raw[i + 2]) == 0x9C ||
         static_cast<unsigned char>(raw[i + 2]) == 0x9D)) {
      s.push_back('"');
      i += 2;
      continue;
    }
    s.push_back(static_cast<char>(
        std::tolower(static_cast<unsigned char>(raw[i]))));
  }
  std::size_t begin = 0;
  std::size_t end = s.size();
  while (begin < end &&
         !text_detail::is_word_char(static_cast<unsigned char>(s[begin])))
    ++begin;
  while (end > begin &&
         !text_detail::is_word_char(static_cast<unsigned char>(s[end - 1])))
    --end;
  return s.substr(begin, end - begin);
}

/// Splits running text into normalized words. Whitespace and double hyphens
/// ("--", the typewriter em-dash) separate words; tokens that normalize to
/// nothing are dropped.
inline std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> out;
  std::string current;
  auto flush = [&] {
    if (!current.empty()) {
      auto w = normalize_word(current);
      if (!w.empty()) out.push_back(std::move(w));
      current.clear();
    }
  };
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c)) != 0) {
      flush();
    } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '-') {
      flush();
      while (i + 1 < text.size() && text[i + 1] == '-') ++i;
    } else {
      current.push_back(c);
    }
  }
  flush();
  return out;
}

/// Normalizes every word of an already split sequence, dropping empties.
inline std::vector<std::string> normalize_words(
    std::span<const std::string> words) {
  std::vector<std::string> out;
  out.reserve(words.size());
  for (const auto& w : words) {
    auto n = normalize_word(w);
    if (!n.empty()) out.push_back(std::move(n));
  }
  return out;
}

inline std::string join_words(std::span<const std::string> words,
                              std::string_view sep = " ") {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out.append(sep);
    out.append(words[i]);
  }
  return out;
}

/// Whitespace split without normalization; used for transcript lines.
inline std::vector<std::string> split_whitespace(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() &&
           std::isspace(static_cast<unsigned char>(line[i])) != 0)
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           std::isspace(static_cast<unsigned char>(line[j])) == 0)
      ++j;
    if (j > i) out.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

}  // namespace b2t
