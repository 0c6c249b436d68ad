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
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/lm/scorer.hpp"

namespace b2t {

/// Word n-gram model with additive smoothing.
///
/// For a context, the model uses the longest suffix (at most order-1 words)
/// that was observed as a context in training and returns
///
///   P(w | ctx) = (c(ctx, w) + alpha) / (c(ctx) + alpha * |V|)
///
/// over the training vocabulary V, which sums to one. Words outside V get the
/// zero-count value alpha / (c(ctx) + alpha * |V|) as a floor.
class NGramModel final : public LmScorer {
 public:
  static constexpr int kFileVersion = 1;

  static NGramModel train(std::span<const std::string> corpus,
                          std::size_t order, double smoothing_alpha) {
    if (order < 1) throw invalid_input_error("n-gram order must be >= 1");
    if (!(smoothing_alpha > 0.0) || !std::isfinite(smoothing_alpha))
      throw invalid_input_error("smoothing_alpha must be positive");
    if (corpus.size() < order)
      throw invalid_input_error("corpus is shorter than the n-gram order");

    NGramModel m;
    m.order_ = order;
    m.alpha_ = smoothing_alpha;
    std::vector<char32_t> ids;
    ids.reserve(corpus.size());
    for (const auto& w : corpus) ids.push_back(m.intern(w));
    for (std::size_t i = 0; i < ids.size(); ++i) {
      for (std::size_t k = 1; k <= order && i + k <= ids.size(); ++k) {
        std::u32string ctx(ids.begin() + static_cast<std::ptrdiff_t>(i),
                           ids.begin() + static_cast<std::ptrdiff_t>(i + k - 1));
        m.add(ctx, ids[i + k - 1], 1);
      }
    }
    m.finalize();
    return m;
  }

  std::size_t order() const noexcept { return order_; }
  double smoothing_alpha() const noexcept { return alpha_; }
  std::size_t vocab_size() const noexcept { return words_.size(); }
  const std::vector<std::string>& words() const noexcept { return words_; }
  bool knows(std::string_view w) const { return ids_.count(std::string(w)) != 0; }

  /// P(word | context) under the backoff rule; the floor for unknown words.
  double probability(std::span<const std::string> context,
                     std::string_view word) const {
    const Counts& c = lookup(context);
    const double denom =
        static_cast<double>(c.total) + alpha_ * static_cast<double>(words_.size());
    auto it = ids_.find(std::string(word));
    double count = 0.0;
    if (it != ids_.end()) {
      auto hit = c.next.find(it->second);
      if (hit != c.next.end()) count = static_cast<double>(hit->second);
    }
    return (count + alpha_) / denom;
  }

  double score_continuation(std::span<const std::string> context,
                            std::string_view word) const override {
    return std::log(probability(context, word));
  }

  /// Ties go to the word seen first in training.
  std::vector<WordProb> next_word_distribution(
      std::span<const std::string> context, std::size_t top_k) const override {
    if (top_k == 0) throw invalid_input_error("top_k must be >= 1");
    const Counts& c = lookup(context);
    const double denom =
        static_cast<double>(c.total) + alpha_ * static_cast<double>(words_.size());
    const std::size_t k = std::min(top_k, words_.size());

    // Observed continuations first, then zero-count words in id order.
    std::vector<std::pair<char32_t, std::uint64_t>> seen(c.next.begin(),
                                                         c.next.end());
    std::sort(seen.begin(), seen.end(), [](const auto& a, const auto& b) {
      return a.second != b.second ? a.second > b.second : a.first < b.first;
    });
    std::vector<WordProb> out;
    out.reserve(k);
    for (const auto& [id, count] : seen) {
      if (out.size() == k) break;
      out.push_back({words_[id], (static_cast<double>(count) + alpha_) / denom});
    }
    for (char32_t id = 0; out.size() < k && id < words_.size(); ++id) {
      if (c.next.count(id) != 0) continue;
      out.push_back({words_[id], alpha_ / denom});
    }
    return out;
  }

  void save(std::ostream& out) const {
    char alpha[64];
    std::snprintf(alpha, sizeof alpha, "%.17g", alpha_);
    out << "b2t-ngram " << kFileVersion << '\n'
        << "order " << order_ << '\n'
        << "smoothing_alpha " << alpha << '\n'
        << "vocab_size " << words_.size() << '\n';
    for (const auto& w : words_) out << w << '\n';
    std::size_t entries = 0;
    for (const auto& [ctx, c] : contexts_) entries += c.next.size();
    out << "ngrams " << entries << '\n';
    // Sorted so that saving is deterministic.
    std::vector<const std::u32string*> keys;
    keys.reserve(contexts_.size());
    for (const auto& kv : contexts_) keys.push_back(&kv.first);
    std::sort(keys.begin(), keys.end(),
              [](const auto* a, const auto* b) { return *a < *b; });
    for (const auto* key : keys) {
      const auto& c = contexts_.at(*key);
      std::vector<std::pair<char32_t, std::uint64_t>> next(c.next.begin(),
                                                           c.next.end());
      std::sort(next.begin(), next.end());
      for (const auto& [id, count] : next) {
        out << count;
        for (char32_t w : *key) out << ' ' << static_cast<std::uint32_t>(w);
        out << ' ' << static_cast<std::uint32_t>(id) << '\n';
      }
    }
  }

  static NGramModel load(std::istream& in) {
    NGramModel m;
    std::size_t line_no = 0;
    std::string line;
    auto next_line = [&]() -> std::string& {
      if (!std::getline(in, line))
        throw parse_error("unexpected end of n-gram file", line_no + 1);
      ++line_no;
      return line;
    };
    auto keyed = [&](const char* key) {
      std::istringstream ss(next_line());
      std::string k;
      std::string v;
      if (!(ss >> k >> v) || k != key)
        throw parse_error(std::string("expected '") + key + "'", line_no);
      return v;
    };
    try {
      if (keyed("b2t-ngram") != std::to_string(kFileVersion))
        throw parse_error("unsupported n-gram file version", line_no);
      m.order_ = std::stoul(keyed("order"));
      m.alpha_ = std::stod(keyed("smoothing_alpha"));
      const std::size_t vocab = std::stoul(keyed("vocab_size"));
      if (m.order_ < 1 || !(m.alpha_ > 0.0))
        throw parse_error("invalid order or smoothing_alpha", line_no);
      for (std::size_t i = 0; i < vocab; ++i) {
        const std::string& w = next_line();
        if (w.empty() || !m.ids_.emplace(w, static_cast<char32_t>(i)).second)
          throw parse_error("bad vocabulary entry", line_no);
        m.words_.push_back(w);
      }
      const std::size_t entries = std::stoul(keyed("ngrams"));
      for (std::size_t e = 0; e < entries; ++e) {
        std::istringstream ss(next_line());
        std::uint64_t count = 0;
        if (!(ss >> count) || count == 0)
          throw parse_error("bad n-gram count", line_no);
        std::u32string gram;
        std::uint64_t id = 0;
        while (ss >> id) {
          if (id >= vocab) throw parse_error("word id out of range", line_no);
          gram.push_back(static_cast<char32_t>(id));
        }
        if (gram.empty() || gram.size() > m.order_)
          throw parse_error("bad n-gram length", line_no);
        const char32_t last = gram.back();
        gram.pop_back();
        m.add(gram, last, count);
      }
    } catch (const std::logic_error&) {
      throw parse_error("malformed number", line_no);
    }
    if (m.contexts_.count(std::u32string()) == 0)
      throw parse_error("n-gram file has no unigram counts", line_no);
    m.finalize();
    return m;
  }

  friend bool operator==(const NGramModel& a, const NGramModel& b) {
    if (a.order_ != b.order_ || a.alpha_ != b.alpha_ || a.words_ != b.words_ ||
        a.contexts_.size() != b.contexts_.size())
      return false;
    for (const auto& [key, c] : a.contexts_) {
      auto it = b.contexts_.find(key);
      if (it == b.contexts_.end() || it->second.total != c.total ||
          it->second.next != c.next)
        return false;
    }
    return true;
  }

 private:
  struct Counts {
    std::uint64_t total = 0;
    std::unordered_map<char32_t, std::uint64_t> next;
  };

  NGramModel() = default;

  char32_t intern(const std::string& w) {
    auto [it, inserted] =
        ids_.try_emplace(w, static_cast<char32_t>(words_.size()));
    if (inserted) words_.push_back(w);
    return it->second;
  }

  void add(const std::u32string& ctx, char32_t next, std::uint64_t count) {
    auto& c = contexts_[ctx];
    c.total += count;
    c.next[next] += count;
  }

  void finalize() {
    if (contexts_.count(std::u32string()) == 0)
      throw invalid_input_error("n-gram model has no unigram counts");
  }

  const Counts& lookup(std::span<const std::string> context) const {
    // Longest suffix of known words, capped at order - 1.
    const std::size_t cap = std::min(context.size(), order_ - 1);
    std::u32string key;
    key.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) {
      auto it = ids_.find(context[context.size() - 1 - i]);
      if (it == ids_.end()) break;
      key.insert(key.begin(), it->second);
    }
    while (!key.empty()) {
      auto it = contexts_.find(key);
      if (it != contexts_.end() && it->second.total > 0) return it->second;
      key.erase(key.begin());
    }
    return contexts_.at(std::u32string());
  }

  std::size_t order_ = 1;
  double alpha_ = 1.0;
  std::vector<std::string> words_;
  std::unordered_map<std::string, char32_t> ids_;
  std::unordered_map<std::u32string, Counts> contexts_;
};

}  // namespace b2t
