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

// Synthetic word-predictor output with a controlled top-1 accuracy.
//
// An in-vocabulary position with true word t gets
//
//   p = (g + s * e_t) / (1 + s),    g ~ Dirichlet(concentration, ..., concentration)
//
// with s = s0 * X and X a mean-one gamma draw (or X = 1), so t is the argmax
// exactly when g_t + s exceeds every other g_j. The scale s0 is the
// top1_accuracy quantile of (max_{j != t} g_j - g_t) / X, estimated once per
// setting by Monte Carlo. Out-of-vocabulary positions get g alone, optionally
// drawn at a different concentration.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <tuple>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/lattice/lattice.hpp"
#include "b2t/lattice/vocabulary.hpp"

namespace b2t {

struct SynthConfig {
  std::size_t sequence_length = 64;
  double top1_accuracy = 0.3;
  double concentration = 1.0;
  /// Concentration of out-of-vocabulary noise; defaults to `concentration`.
  /// Larger values make those positions flatter.
  std::optional<double> oov_concentration;
  /// Fraction of reference positions forced out of vocabulary when sampling
  /// ground truth; unset keeps the text's own coverage.
  std::optional<double> oov_rate;
  /// Gamma shape of a per-position random boost multiplier with mean one;
  /// the default 1 is an exponential. Unset gives every position the same
  /// boost, which keeps the true word near the top of nearly every list.
  std::optional<double> boost_shape = 1.0;
  std::uint64_t seed = 0;

  void validate() const {
    if (sequence_length < 1) throw invalid_input_error("sequence_length must be >= 1");
    if (!(top1_accuracy >= 0.0 && top1_accuracy <= 1.0))
      throw invalid_input_error("top1_accuracy must lie in [0, 1]");
    if (!(concentration > 0.0)) throw invalid_input_error("concentration must be > 0");
    if (oov_concentration && !(*oov_concentration > 0.0))
      throw invalid_input_error("oov_concentration must be > 0");
    if (oov_rate && !(*oov_rate >= 0.0 && *oov_rate <= 1.0))
      throw invalid_input_error("oov_rate must lie in [0, 1]");
    if (boost_shape && !(*boost_shape > 0.0))
      throw invalid_input_error("boost_shape must be > 0");
  }
};

inline std::vector<double> sample_dirichlet(std::size_t dim, double concentration,
                                            std::mt19937_64& rng) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> g(dim);
  double total = 0.0;
  do {
    total = 0.0;
    for (double& v : g) {
      v = gamma(rng);
      total += v;
    }
  } while (total <= 0.0);
  for (double& v : g) v /= total;
  return g;
}

namespace synth_detail {

inline constexpr std::size_t kCalibrationSamples = 20000;
inline constexpr std::uint64_t kCalibrationSeed = 0xC0FFEE;

/// Multiplier of the boost at one position: 1, or a mean-one gamma draw.
inline double boost_factor(std::optional<double> shape, std::mt19937_64& rng) {
  if (!shape) return 1.0;
  std::gamma_distribution<double> gamma(*shape, 1.0 / *shape);
  return gamma(rng);
}

inline double estimate_boost(std::size_t dim, double concentration, double accuracy,
                             std::optional<double> shape) {
  if (dim == 1 || accuracy <= 1.0 / static_cast<double>(dim)) return 0.0;
  // Noise lies on the simplex, so a fixed boost above 1 always wins.
  if (accuracy >= 1.0) return 1.0 + 1e-9;
  std::mt19937_64 rng(kCalibrationSeed);
  std::vector<double> gaps(kCalibrationSamples);
  for (double& gap : gaps) {
    const auto g = sample_dirichlet(dim, concentration, rng);
    gap = (*std::max_element(g.begin() + 1, g.end()) - g[0]) / boost_factor(shape, rng);
  }
  const auto k = static_cast<std::size_t>(
      std::ceil(accuracy * static_cast<double>(kCalibrationSamples))) - 1;
  std::nth_element(gaps.begin(), gaps.begin() + static_cast<std::ptrdiff_t>(k), gaps.end());
  return std::max(0.0, gaps[k]);
}

}  // namespace synth_detail

/// Boost scale that yields `accuracy` top-1 accuracy; memoized.
inline double calibrated_boost(std::size_t dim, double concentration, double accuracy,
                               std::optional<double> shape = std::nullopt) {
  static std::mutex mu;
  static std::map<std::tuple<std::size_t, double, double, double>, double> cache;
  const auto key = std::make_tuple(dim, concentration, accuracy, shape.value_or(0.0));
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double s = synth_detail::estimate_boost(dim, concentration, accuracy, shape);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(key, s);
  return s;
}

/// Distribution for one position; `truth` is a vocabulary id or nullopt for
/// an out-of-vocabulary word.
inline PositionDistribution synth_position(std::size_t dim, std::optional<std::size_t> truth,
                                           const SynthConfig& config, std::mt19937_64& rng) {
  PositionDistribution p;
  if (!truth) {
    p.probs = sample_dirichlet(dim, config.oov_concentration.value_or(config.concentration), rng);
    p.oov_truth = true;
    return p;
  }
  // Perfect accuracy takes the fixed boost: a random multiplier could dip
  // below the winning margin.
  const auto shape = config.top1_accuracy >= 1.0 ? std::nullopt : config.boost_shape;
  const double s = calibrated_boost(dim, config.concentration, config.top1_accuracy, shape) *
                   synth_detail::boost_factor(shape, rng);
  p.probs = sample_dirichlet(dim, config.concentration, rng);
  p.probs[*truth] += s;
  for (double& v : p.probs) v /= 1.0 + s;
  p.oov_truth = false;
  return p;
}

inline Lattice generate_lattice(std::span<const std::string> ground_truth,
                                std::shared_ptr<const Vocabulary> vocab,
                                const SynthConfig& config, std::mt19937_64& rng) {
  config.validate();
  if (ground_truth.size() > config.sequence_length)
    throw invalid_input_error("ground truth has " + std::to_string(ground_truth.size()) +
                              " words, more than the requested length " +
                              std::to_string(config.sequence_length));
  std::vector<PositionDistribution> positions;
  positions.reserve(ground_truth.size());
  for (const auto& w : ground_truth) {
    const auto id = vocab->index_of(w);
    if (!id && !vocab->in_oov_pool(w))
      throw invalid_input_error("ground-truth word '" + w + "' is in neither the vocabulary nor the oov pool");
    positions.push_back(synth_position(vocab->size(), id, config, rng));
  }
  return Lattice(vocab, std::move(positions),
                 std::vector<std::string>(ground_truth.begin(), ground_truth.end()));
}

/// A random window of `text` of config.sequence_length words. With
/// config.oov_rate set, each position is independently made
/// out-of-vocabulary with that probability, replacing words whose status
/// disagrees by uniform draws from the vocabulary or the oov pool.
inline std::vector<std::string> sample_ground_truth(std::span<const std::string> text,
                                                    const Vocabulary& vocab,
                                                    const SynthConfig& config,
                                                    std::mt19937_64& rng) {
  config.validate();
  if (text.size() < config.sequence_length)
    throw invalid_input_error("text is shorter than the sequence length");
  std::uniform_int_distribution<std::size_t> start_dist(0, text.size() - config.sequence_length);
  const std::size_t start = start_dist(rng);
  std::vector<std::string> out(text.begin() + static_cast<std::ptrdiff_t>(start),
                               text.begin() + static_cast<std::ptrdiff_t>(start + config.sequence_length));
  if (!config.oov_rate) return out;
  const auto& pool = vocab.oov_pool();
  std::bernoulli_distribution is_oov(*config.oov_rate);
  std::uniform_int_distribution<std::size_t> pick_vocab(0, vocab.size() - 1);
  for (auto& w : out) {
    const bool want_oov = is_oov(rng);
    const bool in_vocab = vocab.contains(w);
    if (want_oov && in_vocab) {
      if (pool.empty()) throw invalid_input_error("oov_rate > 0 needs a non-empty oov pool");
      std::uniform_int_distribution<std::size_t> pick_pool(0, pool.size() - 1);
      w = pool[pick_pool(rng)];
    } else if (!want_oov && !in_vocab) {
      w = vocab.word_at(pick_vocab(rng));
    }
  }
  return out;
}

/// Options for overdense (alignment-free) lattices.
struct OverdenseConfig {
  double spacing_seconds = 0.3;
  /// Time slots (of spacing / 2 each) covered by one word.
  std::size_t slots_per_word = 6;
  /// Overlapping predictions per time slot.
  std::size_t predictions_per_slot = 2;
};

/// Every slot of every word carries `predictions_per_slot` noisy
/// predictions of that word, time-stamped at the slot.
inline Lattice generate_overdense_lattice(std::span<const std::string> ground_truth,
                                          std::shared_ptr<const Vocabulary> vocab,
                                          const SynthConfig& config,
                                          const OverdenseConfig& dense, std::mt19937_64& rng) {
  config.validate();
  if (!(dense.spacing_seconds > 0.0) || dense.slots_per_word < 1 || dense.predictions_per_slot < 1)
    throw invalid_input_error("invalid overdense configuration");
  if (ground_truth.size() > config.sequence_length)
    throw invalid_input_error("ground truth longer than the requested length");
  const double slide = dense.spacing_seconds / 2.0;
  std::vector<PositionDistribution> positions;
  std::size_t slot = 0;
  for (const auto& w : ground_truth) {
    const auto id = vocab->index_of(w);
    if (!id && !vocab->in_oov_pool(w))
      throw invalid_input_error("ground-truth word '" + w + "' is in neither the vocabulary nor the oov pool");
    for (std::size_t k = 0; k < dense.slots_per_word; ++k, ++slot) {
      for (std::size_t r = 0; r < dense.predictions_per_slot; ++r) {
        auto p = synth_position(vocab->size(), id, config, rng);
        p.time = static_cast<double>(slot) * slide;
        positions.push_back(std::move(p));
      }
    }
  }
  return Lattice(vocab, std::move(positions),
                 std::vector<std::string>(ground_truth.begin(), ground_truth.end()),
                 dense.spacing_seconds);
}

}  // namespace b2t
