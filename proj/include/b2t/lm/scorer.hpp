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

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace b2t {

struct WordProb {
  std::string word;
  double prob = 0.0;

  friend bool operator==(const WordProb&, const WordProb&) = default;
};

/// Word-level language model used for rescoring and in-filling.
///
/// Implementations must be deterministic for a fixed state and safe to call
/// from several threads at once.
class LmScorer {
 public:
  virtual ~LmScorer() = default;

  /// log P(word | context), natural log. Finite and <= 0 for every word,
  /// including words the model never saw. Scorers may look at only the tail
  /// of `context`.
  virtual double score_continuation(std::span<const std::string> context,
                                    std::string_view word) const = 0;

  /// The `top_k` most likely next words, descending by probability.
  virtual std::vector<WordProb> next_word_distribution(
      std::span<const std::string> context, std::size_t top_k) const = 0;
};

}  // namespace b2t
