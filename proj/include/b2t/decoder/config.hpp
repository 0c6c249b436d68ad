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
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/lattice/lattice.hpp"

namespace b2t {

/// What happens at positions flagged out-of-vocabulary.
enum class FillMode {
  none,          // decode them like any other position
  during_beam,   // extend each hypothesis with the filler LM's best word
  random,        // a uniform draw from the oov pool
  unk_sentinel,  // the literal <UNK>
};

/// Where out-of-vocabulary flags come from.
struct OovSource {
  enum class Kind { none, ground_truth, detector };
  Kind kind = Kind::none;
  double threshold = 0.5;

  static OovSource none() { return {}; }
  static OovSource ground_truth() { return {Kind::ground_truth, 0.5}; }
  static OovSource detector(double threshold) {
    return {Kind::detector, threshold};
  }
};

/// How the rescorer enters the fused score at each step.
enum class RescorerMode {
  /// lambda * log P(w_i | last context_limit words); sums to the sequence
  /// log-probability.
  incremental,
  /// lambda * log P(w_1..w_i), re-added at every step.
  whole_prefix,
};

struct DecoderConfig {
  std::size_t beam_width = 5;
  double lambda = 1.5;
  std::size_t context_limit = 8;
  FillMode fill_mode = FillMode::none;
  OovSource oov_source = OovSource::none();
  std::size_t candidates_per_step = 5;
  RescorerMode rescorer_mode = RescorerMode::incremental;
  /// Seeds random in-filling.
  std::uint64_t seed = 0;

  void validate() const {
    if (beam_width < 1) throw invalid_input_error("beam_width must be >= 1");
    if (context_limit < 1)
      throw invalid_input_error("context_limit must be >= 1");
    if (candidates_per_step < 1)
      throw invalid_input_error("candidates_per_step must be >= 1");
    if (!(oov_source.threshold >= 0.0 && oov_source.threshold <= 1.0))
      throw invalid_input_error("detector threshold must lie in [0, 1]");
  }
};

/// Per-position out-of-vocabulary flags under `source`. Missing ground truth
/// counts as in-vocabulary; a detector source needs detector outputs.
inline std::vector<bool> resolve_oov_flags(const Lattice& lat,
                                           const OovSource& source) {
  std::vector<bool> flags(lat.size(), false);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto& p = lat[i];
    switch (source.kind) {
      case OovSource::Kind::none:
        break;
      case OovSource::Kind::ground_truth:
        flags[i] = p.oov_truth.value_or(false);
        break;
      case OovSource::Kind::detector:
        if (!p.oov_detected)
          throw invalid_input_error("position " + std::to_string(i) +
                                    " has no detector output");
        flags[i] = *p.oov_detected >= source.threshold;
        break;
    }
  }
  return flags;
}

namespace decoder_detail {

/// Random in-fill words, drawn in position order so that every decoder
/// consumes the same stream for the same seed.
inline std::vector<std::string> random_fill_words(const Lattice& lat,
                                                  const std::vector<bool>& flags,
                                                  std::uint64_t seed) {
  std::vector<std::string> out(lat.size());
  const auto& pool = lat.vocab().oov_pool();
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (!flags[i]) continue;
    if (pool.empty())
      throw invalid_input_error("random fill needs a non-empty oov pool");
    std::uniform_int_distribution<std::size_t> pick(0, pool.size() - 1);
    out[i] = pool[pick(rng)];
  }
  return out;
}

}  // namespace decoder_detail

}  // namespace b2t
