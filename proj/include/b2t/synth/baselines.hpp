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

#include <random>
#include <span>
#include <string>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/lattice/vocabulary.hpp"

namespace b2t {

/// Uniform vocabulary word at in-vocabulary reference positions, uniform
/// oov-pool word elsewhere; draws are with replacement.
inline std::vector<std::string> random_selection_baseline(std::span<const std::string> reference,
                                                          const Vocabulary& vocab,
                                                          std::mt19937_64& rng) {
  if (vocab.empty()) throw invalid_input_error("vocabulary is empty");
  std::uniform_int_distribution<std::size_t> pick_vocab(0, vocab.size() - 1);
  const auto& pool = vocab.oov_pool();
  std::vector<std::string> out;
  out.reserve(reference.size());
  for (const auto& w : reference) {
    if (vocab.contains(w)) {
      out.push_back(vocab.word_at(pick_vocab(rng)));
    } else {
      if (pool.empty())
        throw invalid_input_error("reference has out-of-vocabulary words but the oov pool is empty");
      std::uniform_int_distribution<std::size_t> pick_pool(0, pool.size() - 1);
      out.push_back(pool[pick_pool(rng)]);
    }
  }
  return out;
}

}  // namespace b2t
