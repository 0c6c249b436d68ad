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

// Prompts for LLM in-context in-filling and transcription, and the parser for
// the enumerated-dictionary replies they request.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <functional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"
#include "b2t/decoder/beam.hpp"
#include "b2t/decoder/config.hpp"
#include "b2t/lattice/lattice.hpp"
#include "b2t/lattice/softmax.hpp"
#include "b2t/lm/scorer.hpp"

namespace b2t {

inline constexpr int kPromptTemplateVersion = 1;

/// Placeholders: ${N} sequence length, ${LAST} last index, ${PREDICTIONS}
/// one line per position.
inline constexpr std::string_view kIcFillTemplate =
    R"(I have a noisy speech recognition system which predicts ${N} words at a time. I am going to give you its predictions in an ordered list. [UNK] indicates that the target word for that position is out-of-vocabulary.

I want you to fill in any [UNK] positions with words that you think fit well in the sequence. Do not replace anything that is not [UNK]. Your output should be formatted as a Python dictionary mapping all ${N} positions (0-indexed) to words, preserving the system's predictions and replacing any [UNK] with your suggestions. Do not output anything else.

Output example:
{0: "don't", 1: "the", 2: "scowl", ..., ${LAST}: "if"}

Predictions from speech recognition system:

${PREDICTIONS})";

inline constexpr std::string_view kIcTranscribeTemplate =
    R"(I have a noisy speech recognition system which predicts ${N} words at a time. I am going to give you its predictions in an ordered list of pairs (word, probability). For each position, I give you the top-5 word predictions ordered from most likely to least likely along with their probabilities. [UNK] indicates that the target word for that position is out-of-vocabulary.

I want you to predict the most likely sequence from this information, picking the words from the predictions for each position that go best together. Where there is an [UNK] I want you to replace it with your own prediction for a word that fits well. In places with no [UNK], your job is to just pick the best fitting word from the predictions list (do not use any other word). Your output should be formatted as a Python dictionary mapping all ${N} positions (0-indexed) to words. Do not output anything else.

Output example:
{0: "don't", 1: "the", 2: "scowl", ..., ${LAST}: "if"}

Predictions from speech recognition system:

${PREDICTIONS})";

/// Text-in, text-out LLM call.
using ChatFn = std::function<std::string(const std::string& prompt)>;

namespace prompt_detail {

inline void replace_all(std::string& s, std::string_view from, std::string_view to) {
  for (std::size_t pos = s.find(from); pos != std::string::npos;
       pos = s.find(from, pos + to.size()))
    s.replace(pos, from.size(), to);
}

inline std::string instantiate(std::string_view tmpl, std::size_t n,
                               const std::string& predictions) {
  std::string out(tmpl);
  replace_all(out, "${N}", std::to_string(n));
  replace_all(out, "${LAST}", std::to_string(n == 0 ? 0 : n - 1));
  replace_all(out, "${PREDICTIONS}", predictions);
  return out;
}

inline std::string format_prob(double p) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", p);
  return buf;
}

}  // namespace prompt_detail

/// Box-style fill prompt; `<UNK>` entries mark positions to fill.
inline std::string build_ic_fill_prompt(std::span<const std::string> sequence, std::size_t n) {
  if (sequence.size() != n)
    throw invalid_input_error("sequence length " + std::to_string(sequence.size()) +
                              " differs from n = " + std::to_string(n));
  std::string lines;
  for (std::size_t i = 0; i < n; ++i)
    lines += std::to_string(i) + ": " + sequence[i] + "\n";
  return prompt_detail::instantiate(kIcFillTemplate, n, lines);
}

/// The five most probable vocabulary ids at a position, ties to the lower id.
inline std::vector<std::size_t> top5_ids(const PositionDistribution& p) {
  std::vector<std::size_t> idx(p.probs.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  const std::size_t k = std::min<std::size_t>(5, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return p.probs[a] != p.probs[b] ? p.probs[a] > p.probs[b] : a < b;
                    });
  idx.resize(k);
  return idx;
}

/// Transcription prompt: sharpened top-5 pairs for each position, <UNK> for
/// positions flagged by `config.oov_source`.
inline std::string build_ic_transcribe_prompt(const Lattice& lat,
                                              const DecoderConfig& config = {}) {
  if (lat.empty()) throw invalid_input_error("cannot build a prompt for an empty lattice");
  const auto flags = resolve_oov_flags(lat, config.oov_source);
  std::string lines;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    lines += std::to_string(i) + ": ";
    if (flags[i]) {
      lines += std::string(kUnk) + "\n";
      continue;
    }
    const auto ids = top5_ids(lat[i]);
    std::vector<double> raw;
    for (std::size_t id : ids) raw.push_back(lat[i].probs[id]);
    const auto sharp = softmax(raw, kSharpenTemperature);
    for (std::size_t j = 0; j < ids.size(); ++j) {
      if (j > 0) lines += ", ";
      lines += "(" + lat.vocab().word_at(ids[j]) + ", " +
               prompt_detail::format_prob(sharp[j]) + ")";
    }
    lines += "\n";
  }
  return prompt_detail::instantiate(kIcTranscribeTemplate, lat.size(), lines);
}

/// Serializes words as `{0: "w0", 1: "w1", ...}`.
inline std::string format_enumerated(std::span<const std::string> words) {
  std::string out = "{";
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i > 0) out += ", ";
    out += std::to_string(i) + ": \"";
    for (char c : words[i]) {
      if (c == '"' || c == '\\') out += '\\';
      out += c;
    }
    out += '"';
  }
  return out + "}";
}

/// Parses the first `{k: v, ...}` mapping in `text`. Keys may be quoted;
/// values may be quoted with either quote character or bare. Keys must be
/// exactly 0..n-1; values are word-normalized and must not be empty.
inline std::vector<std::string> parse_enumerated_response(std::string_view text, std::size_t n) {
  const std::size_t open = text.find('{');
  if (open == std::string_view::npos) throw parse_error("reply has no '{'");
  std::size_t i = open + 1;
  auto skip_ws = [&] {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
  };
  std::vector<std::string> words(n);
  std::set<std::size_t> seen;
  skip_ws();
  if (i < text.size() && text[i] == '}') ++i;
  else {
    while (true) {
      skip_ws();
      if (i < text.size() && text[i] == '}') break;  // trailing comma
      const char key_quote = i < text.size() && (text[i] == '"' || text[i] == '\'') ? text[i++] : 0;
      std::size_t key_start = i;
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      if (i == key_start || i - key_start > 9) throw parse_error("expected an integer key");
      const std::size_t key = std::stoul(std::string(text.substr(key_start, i - key_start)));
      if (key_quote != 0) {
        if (i >= text.size() || text[i] != key_quote) throw parse_error("unterminated key");
        ++i;
      }
      skip_ws();
      if (i >= text.size() || text[i] != ':') throw parse_error("expected ':' after key");
      ++i;
      skip_ws();
      if (i >= text.size()) throw parse_error("unterminated mapping");
      std::string value;
      if (text[i] == '"' || text[i] == '\'') {
        const char q = text[i++];
        while (i < text.size() && text[i] != q) {
          if (text[i] == '\\' && i + 1 < text.size()) ++i;
          value += text[i++];
        }
        if (i >= text.size()) throw parse_error("unterminated string value");
        ++i;
      } else {
        while (i < text.size() && text[i] != ',' && text[i] != '}') value += text[i++];
        while (!value.empty() && std::isspace(static_cast<unsigned char>(value.back())))
          value.pop_back();
      }
      if (key >= n) throw parse_error("key " + std::to_string(key) + " out of range");
      if (!seen.insert(key).second)
        throw parse_error("duplicate key " + std::to_string(key));
      words[key] = normalize_word(value);
      if (words[key].empty())
        throw parse_error("empty word at key " + std::to_string(key));
      skip_ws();
      if (i >= text.size()) throw parse_error("unterminated mapping");
      if (text[i] == ',') {
        ++i;
        continue;
      }
      if (text[i] == '}') break;
      throw parse_error("expected ',' or '}'");
    }
  }
  if (seen.size() != n)
    throw parse_error("expected " + std::to_string(n) + " entries, got " +
                      std::to_string(seen.size()));
  return words;
}

/// Keeps the LLM's words only where the input holds <UNK>.
inline std::vector<std::string> merge_fill(std::span<const std::string> input,
                                           std::vector<std::string> parsed) {
  for (std::size_t i = 0; i < input.size(); ++i)
    if (input[i] != kUnk) parsed[i] = input[i];
  return parsed;
}

namespace prompt_detail {

template <typename Parse>
auto ask(const ChatFn& chat, const std::string& prompt, std::size_t parse_retries,
         Parse parse) {
  for (std::size_t attempt = 0;; ++attempt) {
    try {
      return parse(chat(prompt));
    } catch (const parse_error&) {
      if (attempt >= parse_retries) throw;
    }
  }
}

}  // namespace prompt_detail

/// Beam search with <UNK> at flagged positions, then LLM in-filling of those
/// positions. No call is made when nothing is flagged.
inline std::vector<std::string> decode_ic_fill(const Lattice& lat, const LmScorer& scorer,
                                               const ChatFn& chat, DecoderConfig config = {},
                                               std::size_t parse_retries = 2) {
  config.fill_mode = FillMode::unk_sentinel;
  const auto best = decode_beam(lat, scorer, config);
  if (std::find(best.begin(), best.end(), kUnk) == best.end()) return best;
  const auto prompt = build_ic_fill_prompt(best, best.size());
  return prompt_detail::ask(chat, prompt, parse_retries, [&](const std::string& reply) {
    return merge_fill(best, parse_enumerated_response(reply, best.size()));
  });
}

/// LLM transcription from top-5 lists. A reply word outside its position's
/// top-5 list is replaced by the top-1 word; flagged positions take the reply.
inline std::vector<std::string> decode_ic_transcribe(const Lattice& lat, const ChatFn& chat,
                                                     const DecoderConfig& config = {},
                                                     std::size_t parse_retries = 2) {
  const auto prompt = build_ic_transcribe_prompt(lat, config);
  const auto flags = resolve_oov_flags(lat, config.oov_source);
  return prompt_detail::ask(chat, prompt, parse_retries, [&](const std::string& reply) {
    auto words = parse_enumerated_response(reply, lat.size());
    for (std::size_t i = 0; i < lat.size(); ++i) {
      if (flags[i]) continue;
      const auto ids = top5_ids(lat[i]);
      const bool listed = std::any_of(ids.begin(), ids.end(), [&](std::size_t id) {
        return lat.vocab().word_at(id) == words[i];
      });
      if (!listed) words[i] = lat.vocab().word_at(ids.front());
    }
    return words;
  });
}

}  // namespace b2t
