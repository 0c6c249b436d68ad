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

// Beam search over a lattice with language-model shallow fusion.
//
// A hypothesis w_1..w_i carries the fused score
//
//   sum_j log P_model(w_j | x) + lambda * R_j
//
// where R_j is the rescorer term of step j (see RescorerMode). At positions
// flagged out-of-vocabulary the model has no distribution over the true word;
// those steps contribute no model term, and in fill mode each hypothesis is
// extended by the filler LM's most likely next word.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "b2t/core/text.hpp"
#include "b2t/decoder/config.hpp"
#include "b2t/lm/scorer.hpp"

namespace b2t {

struct BeamHypothesis {
  std::vector<std::string> words;
  /// Vocabulary id per word, or kNoId for words from outside the vocabulary;
  /// the tie-break key.
  std::vector<std::size_t> ids;
  double fused_score = 0.0;
  /// log P_rescorer(w_1..w_i) accumulated from incremental terms.
  double lm_logprob = 0.0;

  static constexpr std::size_t kNoId = std::numeric_limits<std::size_t>::max();

  /// The last `limit` words, the rescorer's view of the hypothesis.
  std::span<const std::string> rescorer_context(std::size_t limit) const {
    const std::size_t n = std::min(limit, words.size());
    return std::span<const std::string>(words).last(n);
  }
};

namespace beam_detail {

/// Higher score first; equal scores fall back to the lexicographically
/// smaller id sequence (the lowest-index rule of greedy decoding), then the
/// word strings.
inline bool better(const BeamHypothesis& a, const BeamHypothesis& b) {
  if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
  if (a.ids != b.ids) return a.ids < b.ids;
  return a.words < b.words;
}

/// Indices of the `k` most probable nonzero entries, ties to the lower index.
inline std::vector<std::size_t> top_candidates(std::span<const double> probs,
                                               std::size_t k) {
  std::vector<std::size_t> idx;
  idx.reserve(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    if (probs[i] > 0.0) idx.push_back(i);
  k = std::min(k, idx.size());
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k),
                    idx.end(), [&](std::size_t a, std::size_t b) {
                      return probs[a] != probs[b] ? probs[a] > probs[b] : a < b;
                    });
  idx.resize(k);
  return idx;
}

class Search {
 public:
  Search(const Lattice& lat, const LmScorer& scorer, const LmScorer* filler,
         const DecoderConfig& config, bool fill_all_flagged)
      : lat_(lat), scorer_(scorer), filler_(filler), config_(config) {
    config_.validate();
    if (lat_.empty()) throw invalid_input_error("cannot decode an empty lattice");
    flags_ = resolve_oov_flags(lat_, config_.oov_source);
    mode_ = fill_all_flagged ? FillMode::during_beam : config_.fill_mode;
    if (mode_ == FillMode::during_beam && filler_ == nullptr)
      throw invalid_input_error("in-filling during beam search needs a filler LM");
    if (mode_ == FillMode::random)
      random_words_ = decoder_detail::random_fill_words(lat_, flags_, config_.seed);
  }

  std::vector<std::string> run() {
    std::vector<BeamHypothesis> beam(1);
    for (std::size_t i = 0; i < lat_.size(); ++i) {
      std::vector<BeamHypothesis> next;
      const bool flagged = flags_[i] && mode_ != FillMode::none;
      for (const auto& hyp : beam) {
        if (flagged)
          extend_flagged(hyp, i, next);
        else
          extend_model(hyp, i, next);
      }
      const std::size_t keep = std::min(config_.beam_width, next.size());
      std::partial_sort(next.begin(), next.begin() + static_cast<std::ptrdiff_t>(keep),
                        next.end(), better);
      next.resize(keep);
      beam = std::move(next);
    }
    return std::move(beam.front().words);
  }

 private:
  /// lambda-weighted rescorer term for appending `word` to `hyp`; also
  /// returns the updated sequence log-probability through `lm_logprob`.
  double rescorer_term(const BeamHypothesis& hyp, const std::string& word,
                       double& lm_logprob) const {
    lm_logprob = hyp.lm_logprob;
    if (config_.lambda == 0.0) return 0.0;
    const double inc =
        scorer_.score_continuation(hyp.rescorer_context(config_.context_limit), word);
    lm_logprob += inc;
    const double term =
        config_.rescorer_mode == RescorerMode::incremental ? inc : lm_logprob;
    return config_.lambda * term;
  }

  void push(const BeamHypothesis& hyp, std::string word, std::size_t id,
            double model_term, bool rescore, std::vector<BeamHypothesis>& out) const {
    BeamHypothesis h;
    double lm = hyp.lm_logprob;
    const double lm_term = rescore ? rescorer_term(hyp, word, lm) : 0.0;
    h.words = hyp.words;
    h.words.push_back(std::move(word));
    h.ids = hyp.ids;
    h.ids.push_back(id);
    h.fused_score = hyp.fused_score + model_term + lm_term;
    h.lm_logprob = lm;
    out.push_back(std::move(h));
  }

  void extend_model(const BeamHypothesis& hyp, std::size_t i,
                    std::vector<BeamHypothesis>& out) const {
    const auto& probs = lat_[i].probs;
    for (std::size_t id : top_candidates(probs, config_.candidates_per_step))
      push(hyp, lat_.vocab().word_at(id), id, std::log(probs[id]), true, out);
  }

  void extend_flagged(const BeamHypothesis& hyp, std::size_t i,
                      std::vector<BeamHypothesis>& out) const {
    switch (mode_) {
      case FillMode::unk_sentinel:
        push(hyp, std::string(kUnk), BeamHypothesis::kNoId, 0.0, false, out);
        return;
      case FillMode::random:
        push(hyp, random_words_[i], BeamHypothesis::kNoId, 0.0, true, out);
        return;
      case FillMode::during_beam: {
        const auto best =
            filler_->next_word_distribution(hyp.rescorer_context(config_.context_limit), 1);
        if (best.empty()) {
          push(hyp, std::string(kUnk), BeamHypothesis::kNoId, 0.0, false, out);
        } else {
          const auto id = lat_.vocab().index_of(best.front().word);
          push(hyp, best.front().word, id.value_or(BeamHypothesis::kNoId), 0.0,
               true, out);
        }
        return;
      }
      case FillMode::none:
        extend_model(hyp, i, out);
        return;
    }
  }

  const Lattice& lat_;
  const LmScorer& scorer_;
  const LmScorer* filler_;
  DecoderConfig config_;
  FillMode mode_ = FillMode::none;
  std::vector<bool> flags_;
  std::vector<std::string> random_words_;
};

}  // namespace beam_detail

/// LM-rescored beam search. Flagged positions follow `config.fill_mode`
/// (<UNK> or random words); in-filling needs decode_beam_fill.
inline std::vector<std::string> decode_beam(const Lattice& lat,
                                            const LmScorer& scorer,
                                            const DecoderConfig& config = {}) {
  return beam_detail::Search(lat, scorer, nullptr, config, false).run();
}

/// Beam search that in-fills every flagged position with the filler's most
/// likely continuation of each hypothesis.
inline std::vector<std::string> decode_beam_fill(const Lattice& lat,
                                                 const LmScorer& scorer,
                                                 const LmScorer& filler,
                                                 const DecoderConfig& config = {}) {
  return beam_detail::Search(lat, scorer, &filler, config, true).run();
}

}  // namespace b2t
