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
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "b2t/core/error.hpp"

namespace b2t {

/// The closed retrieval set a word predictor scores, plus the pool of corpus
/// words outside it. Word ids are positions in `words()`.
class Vocabulary {
 public:
  Vocabulary() = default;

  Vocabulary(std::vector<std::string> words,
             std::vector<std::string> oov_pool = {})
      : words_(std::move(words)), oov_pool_(std::move(oov_pool)) {
    index_.reserve(words_.size());
    for (std::size_t i = 0; i < words_.size(); ++i) {
      if (words_[i].empty())
        throw invalid_input_error("vocabulary contains an empty word");
      if (!index_.emplace(words_[i], i).second)
        throw invalid_input_error("duplicate vocabulary word '" + words_[i] +
                                  "'");
    }
    oov_set_.reserve(oov_pool_.size());
    for (const auto& w : oov_pool_) {
      if (index_.count(w) != 0)
        throw invalid_input_error("oov pool word '" + w +
                                  "' is also in the vocabulary");
      if (!oov_set_.insert(w).second)
        throw invalid_input_error("duplicate oov pool word '" + w + "'");
    }
  }

  std::size_t size() const noexcept { return words_.size(); }
  bool empty() const noexcept { return words_.empty(); }

  const std::vector<std::string>& words() const noexcept { return words_; }
  const std::vector<std::string>& oov_pool() const noexcept {
    return oov_pool_;
  }

  const std::string& word_at(std::size_t id) const { return words_.at(id); }

  std::optional<std::size_t> index_of(const std::string& word) const {
    auto it = index_.find(word);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  bool contains(const std::string& word) const {
    return index_.count(word) != 0;
  }
  bool in_oov_pool(const std::string& word) const {
    return oov_set_.count(word) != 0;
  }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.words_ == b.words_ && a.oov_pool_ == b.oov_pool_;
  }

 private:
  std::vector<std::string> words_;
  std::vector<std::string> oov_pool_;
  std::unordered_map<std::string, std::size_t> index_;
  std::unordered_set<std::string> oov_set_;
};

/// Keeps the `size` most frequent corpus words; frequency ties go to the word
/// that occurs first. Every other distinct word lands in the oov pool, in
/// order of first occurrence.
inline Vocabulary build_vocabulary(std::span<const std::string> corpus,
                                   std::size_t size) {
  if (corpus.empty()) throw invalid_input_error("corpus is empty");
  if (size == 0) throw invalid_input_error("vocabulary size must be >= 1");

  struct Entry {
    std::size_t first = 0;
    std::size_t count = 0;
  };
  std::unordered_map<std::string, Entry> stats;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto [it, inserted] = stats.try_emplace(corpus[i], Entry{i, 0});
    if (inserted) order.push_back(corpus[i]);
    ++it->second.count;
  }

  std::vector<std::string> ranked = order;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [&](const std::string& a, const std::string& b) {
                     return stats[a].count > stats[b].count;
                   });
  const std::size_t keep = std::min(size, ranked.size());
  std::vector<std::string> words(ranked.begin(), ranked.begin() + keep);

  std::unordered_set<std::string> kept(words.begin(), words.end());
  std::vector<std::string> pool;
  for (const auto& w : order)
    if (kept.count(w) == 0) pool.push_back(w);
  return Vocabulary(std::move(words), std::move(pool));
}

/// Fraction of corpus tokens that are vocabulary words.
inline double vocabulary_coverage(std::span<const std::string> corpus,
                                  const Vocabulary& vocab) {
  if (corpus.empty()) throw invalid_input_error("corpus is empty");
  std::size_t hits = 0;
  for (const auto& w : corpus)
    if (vocab.contains(w)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(corpus.size());
}

}  // namespace b2t
