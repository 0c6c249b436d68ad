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

#include <cstdlib>
#include <fstream>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"
#include "b2t/lm/ngram.hpp"

#ifndef B2T_DATA_DIR
#define B2T_DATA_DIR "data"
#endif

namespace b2t {

inline constexpr const char* kBundledCorpusFile = "sherlock_adventures.txt";

/// Directory of bundled assets; the B2T_DATA_DIR environment variable
/// overrides the build-time location.
inline std::string data_dir() {
  if (const char* env = std::getenv("B2T_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return B2T_DATA_DIR;
}

inline std::string bundled_corpus_path() { return data_dir() + "/" + kBundledCorpusFile; }

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

/// Normalized word stream of a source text.
inline std::vector<std::string> generate_synthetic_corpus(std::string_view source_text) {
  auto words = tokenize(source_text);
  if (words.empty()) throw invalid_input_error("source text holds no words");
  return words;
}

/// `length` words sampled from an n-gram model, each conditioned on the
/// words generated so far.
inline std::vector<std::string> generate_synthetic_corpus(const NGramModel& model,
                                                          std::size_t length,
                                                          std::mt19937_64& rng) {
  if (length == 0) throw invalid_input_error("requested an empty corpus");
  std::vector<std::string> out;
  out.reserve(length);
  const std::size_t window = model.order() - 1;
  for (std::size_t i = 0; i < length; ++i) {
    const std::size_t n = std::min(window, out.size());
    const auto dist = model.next_word_distribution(
        std::span<const std::string>(out).last(n), model.vocab_size());
    std::vector<double> weights;
    weights.reserve(dist.size());
    for (const auto& wp : dist) weights.push_back(wp.prob);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    out.push_back(dist[pick(rng)].word);
  }
  return out;
}

inline std::vector<std::string> load_bundled_corpus() {
  return generate_synthetic_corpus(read_text_file(bundled_corpus_path()));
}

/// Head and tail of a corpus: LM training text and held-out reference text.
struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> heldout;
};

inline CorpusSplit split_corpus(std::span<const std::string> corpus, double heldout_fraction = 0.2) {
  if (!(heldout_fraction > 0.0 && heldout_fraction < 1.0))
    throw invalid_input_error("heldout fraction must lie in (0, 1)");
  const auto cut = static_cast<std::size_t>(
      static_cast<double>(corpus.size()) * (1.0 - heldout_fraction));
  return {std::vector<std::string>(corpus.begin(), corpus.begin() + static_cast<std::ptrdiff_t>(cut)),
          std::vector<std::string>(corpus.begin() + static_cast<std::ptrdiff_t>(cut), corpus.end())};
}

}  // namespace b2t
