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
#include <array>
#include <cmath>
#include <span>
#include <string_view>
#include <vector>

#include "b2t/core/error.hpp"

namespace b2t {

inline constexpr std::size_t kNumOovStats = 19;

inline constexpr std::array<std::string_view, kNumOovStats> kOovStatNames = {
    "entropy", "variance", "mean",     "median",   "max",
    "min",     "skew",     "kurtosis", "gini",     "top1_prob",
    "top2_prob", "top1_ratio", "peaks", "zeros",   "nonzeros",
    "p90",     "p10",      "p90_p10_ratio", "top5_sum"};

/// Values below this count as zero.
inline constexpr double kZeroCut = 1e-10;

struct OovFeatureVector {
  std::vector<double> probs;
  std::array<double, kNumOovStats> stats{};

  double stat(std::string_view name) const {
    for (std::size_t i = 0; i < kNumOovStats; ++i)
      if (kOovStatNames[i] == name) return stats[i];
    throw invalid_input_error("unknown statistic " + std::string(name));
  }

  /// probs followed by stats: the classifier input.
  std::vector<double> flattened() const {
    std::vector<double> out(probs);
    out.insert(out.end(), stats.begin(), stats.end());
    return out;
  }
};

/// Linear-interpolation percentile of sorted values, q in [0, 100].
inline double percentile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw invalid_input_error("percentile of an empty vector");
  const double pos = q / 100.0 * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline OovFeatureVector extract_oov_features(std::span<const double> probs) {
  if (probs.empty()) throw invalid_input_error("empty probability vector");
  const auto n = static_cast<double>(probs.size());
  std::vector<double> sorted(probs.begin(), probs.end());
  std::sort(sorted.begin(), sorted.end());

  double mean = 0.0;
  for (double p : probs) mean += p;
  mean /= n;

  // Deviations below this are rounding noise, e.g. in 1/n - mean for a
  // uniform vector; without it skew and kurtosis of a flat vector swing
  // between arbitrary values.
  const double flat = 1e-12 * std::abs(mean);

  double entropy = 0.0, sq = 0.0, m2 = 0.0, m3 = 0.0, m4 = 0.0;
  double peaks = 0.0, zeros = 0.0;
  for (double p : probs) {
    if (p > 0.0) entropy -= p * std::log2(p);
    sq += p * p;
    const double d = p - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
    if (p > mean + flat) peaks += 1.0;
    if (p < kZeroCut) zeros += 1.0;
  }
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const bool spread = std::sqrt(m2) > flat;
  const double skew = spread ? m3 / std::pow(m2, 1.5) : 0.0;
  const double kurtosis = spread ? m4 / (m2 * m2) - 3.0 : 0.0;

  const double top1 = sorted.back();
  const double top2 = sorted.size() > 1 ? sorted[sorted.size() - 2] : 0.0;
  double top5 = 0.0;
  for (std::size_t i = 0; i < std::min<std::size_t>(5, sorted.size()); ++i)
    top5 += sorted[sorted.size() - 1 - i];
  const double p90 = percentile_sorted(sorted, 90.0);
  const double p10 = percentile_sorted(sorted, 10.0);

  OovFeatureVector f;
  f.probs.assign(probs.begin(), probs.end());
  f.stats = {entropy,
             m2,
             mean,
             percentile_sorted(sorted, 50.0),
             top1,
             sorted.front(),
             skew,
             kurtosis,
             1.0 - sq,
             top1,
             top2,
             top1 / std::max(top2, 1e-12),
             peaks,
             zeros,
             n - zeros,
             p90,
             p10,
             p90 / (p10 + 1e-12),
             top5};
  return f;
}

}  // namespace b2t
