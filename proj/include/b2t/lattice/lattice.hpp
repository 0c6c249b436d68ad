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
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/lattice/vocabulary.hpp"

namespace b2t {

/// Tolerance on the sum of a position's probabilities.
inline constexpr double kNormTolerance = 1e-6;

/// One predicted word slot: a distribution over the vocabulary plus optional
/// out-of-vocabulary annotations.
struct PositionDistribution {
  std::vector<double> probs;
  std::optional<bool> oov_truth;
  std::optional<double> oov_detected;
  /// Time stamp in seconds; only meaningful for overdense lattices.
  std::optional<double> time;

  /// Lowest index wins ties.
  std::size_t argmax() const {
    return static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
  }

  friend bool operator==(const PositionDistribution&,
                         const PositionDistribution&) = default;
};

/// Throws invalid_input_error unless `probs` is a distribution.
inline void check_distribution(std::span<const double> probs,
                               double tolerance = kNormTolerance) {
  double total = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p))
      throw invalid_input_error("probabilities must be finite and >= 0");
    total += p;
  }
  if (std::abs(total - 1.0) > tolerance)
    throw invalid_input_error("probabilities sum to " + std::to_string(total) +
                              ", not 1");
}

/// One decoding instance. Immutable once built; copies share the vocabulary.
class Lattice {
 public:
  Lattice(std::shared_ptr<const Vocabulary> vocab,
          std::vector<PositionDistribution> positions,
          std::optional<std::vector<std::string>> reference = std::nullopt,
          std::optional<double> spacing_seconds = std::nullopt)
      : vocab_(std::move(vocab)),
        positions_(std::move(positions)),
        reference_(std::move(reference)),
        spacing_seconds_(spacing_seconds) {
    if (!vocab_) throw invalid_input_error("lattice needs a vocabulary");
    for (std::size_t i = 0; i < positions_.size(); ++i) {
      const auto& p = positions_[i];
      if (p.probs.size() != vocab_->size())
        throw invalid_input_error(
            "position " + std::to_string(i) + " has " +
            std::to_string(p.probs.size()) + " probabilities, vocabulary has " +
            std::to_string(vocab_->size()));
      check_distribution(p.probs);
      if (p.oov_detected && !(*p.oov_detected >= 0.0 && *p.oov_detected <= 1.0))
        throw invalid_input_error("oov_detected must lie in [0, 1]");
    }
    if (spacing_seconds_ && !(*spacing_seconds_ > 0.0))
      throw invalid_input_error("spacing_seconds must be positive");
    if (reference_ && !spacing_seconds_ &&
        reference_->size() != positions_.size())
      throw invalid_input_error("reference has " +
                                std::to_string(reference_->size()) +
                                " words but lattice has " +
                                std::to_string(positions_.size()) +
                                " positions");
  }

  const Vocabulary& vocab() const noexcept { return *vocab_; }
  const std::shared_ptr<const Vocabulary>& vocab_ptr() const noexcept {
    return vocab_;
  }
  const std::vector<PositionDistribution>& positions() const noexcept {
    return positions_;
  }
  const PositionDistribution& operator[](std::size_t i) const {
    return positions_[i];
  }
  std::size_t size() const noexcept { return positions_.size(); }
  bool empty() const noexcept { return positions_.empty(); }

  const std::optional<std::vector<std::string>>& reference() const noexcept {
    return reference_;
  }
  std::optional<double> spacing_seconds() const noexcept {
    return spacing_seconds_;
  }

  /// Copy with detector probabilities attached; distributions are untouched.
  Lattice with_oov_detected(std::span<const double> detected) const {
    if (detected.size() != positions_.size())
      throw invalid_input_error("one detector output per position required");
    auto positions = positions_;
    for (std::size_t i = 0; i < positions.size(); ++i)
      positions[i].oov_detected = detected[i];
    return Lattice(vocab_, std::move(positions), reference_, spacing_seconds_);
  }

  friend bool operator==(const Lattice& a, const Lattice& b) {
    return *a.vocab_ == *b.vocab_ && a.positions_ == b.positions_ &&
           a.reference_ == b.reference_ &&
           a.spacing_seconds_ == b.spacing_seconds_;
  }

 private:
  std::shared_ptr<const Vocabulary> vocab_;
  std::vector<PositionDistribution> positions_;
  std::optional<std::vector<std::string>> reference_;
  std::optional<double> spacing_seconds_;
};

}  // namespace b2t
