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

// Embedding-based similarity in the style of BERTScore: each token is matched
// to its most similar token on the other side, and precision and recall of
// those similarities combine into an F1.
//
// The bundled embedder hashes character trigrams into seeded random
// directions. It is deterministic and needs no model download, but its scores
// are not comparable with published BERTScore values.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "b2t/core/text.hpp"

namespace b2t {

class WordEmbedder {
 public:
  virtual ~WordEmbedder() = default;
  virtual std::size_t dim() const = 0;
  /// Unit-norm embedding; the same word always maps to the same vector.
  virtual std::vector<double> embed(std::string_view word) const = 0;
};

class HashTrigramEmbedder final : public WordEmbedder {
 public:
  explicit HashTrigramEmbedder(std::size_t dim = 64, std::uint64_t seed = 0x5eed)
      : dim_(dim), seed_(seed) {}

  std::size_t dim() const override { return dim_; }

  std::vector<double> embed(std::string_view word) const override {
    const std::string padded = "#" + std::string(word) + "#";
    std::vector<double> v(dim_, 0.0);
    for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
      std::uint64_t state = fnv1a(std::string_view(padded).substr(i, 3)) ^ seed_;
      for (double& x : v) x += to_unit(splitmix64(state));
    }
    if (padded.size() < 3) {
      std::uint64_t state = fnv1a(padded) ^ seed_;
      for (double& x : v) x += to_unit(splitmix64(state));
    }
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm > 0.0)
      for (double& x : v) x /= norm;
    return v;
  }

 private:
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    return h;
  }
  static std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  /// Uniform in [-1, 1).
  static double to_unit(std::uint64_t r) {
    return static_cast<double>(r >> 11) * 0x1.0p-52 - 1.0;
  }

  std::size_t dim_;
  std::uint64_t seed_;
};

inline double cosine(std::span<const double> a, std::span<const double> b) {
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    na += a[i] * a[i];
    nb += b[i] * b[i];
  }
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / std::sqrt(na * nb);
}

/// Greedy-matching F1 with per-token similarities clamped to [0, 1].
/// Identical sequences score 1; an empty side scores 0.
inline double semantic_score(std::span<const std::string> reference,
                             std::span<const std::string> hypothesis,
                             const WordEmbedder& embedder) {
  const auto ref = normalize_words(reference);
  const auto hyp = normalize_words(hypothesis);
  if (ref.empty() || hyp.empty()) return 0.0;
  std::vector<std::vector<double>> er, eh;
  for (const auto& w : ref) er.push_back(embedder.embed(w));
  for (const auto& w : hyp) eh.push_back(embedder.embed(w));
  std::vector<std::vector<double>> sim(ref.size(), std::vector<double>(hyp.size()));
  for (std::size_t i = 0; i < ref.size(); ++i)
    for (std::size_t j = 0; j < hyp.size(); ++j)
      sim[i][j] = ref[i] == hyp[j] ? 1.0 : std::clamp(cosine(er[i], eh[j]), 0.0, 1.0);
  double recall = 0.0, precision = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i)
    recall += *std::max_element(sim[i].begin(), sim[i].end());
  for (std::size_t j = 0; j < hyp.size(); ++j) {
    double best = 0.0;
    for (std::size_t i = 0; i < ref.size(); ++i) best = std::max(best, sim[i][j]);
    precision += best;
  }
  recall /= static_cast<double>(ref.size());
  precision /= static_cast<double>(hyp.size());
  if (precision + recall == 0.0) return 0.0;
  return 2.0 * precision * recall / (precision + recall);
}

inline double semantic_score(std::span<const std::string> reference,
                             std::span<const std::string> hypothesis) {
  static const HashTrigramEmbedder kDefault;
  return semantic_score(reference, hypothesis, kDefault);
}

}  // namespace b2t
