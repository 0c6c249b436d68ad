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

// Alignment-free decoding of overdense lattices.
//
// An overdense lattice holds predictions from windows spaced
// `spacing_seconds` apart and slid by half that spacing, so one time slot can
// carry several predictions. Decoding averages the predictions of a slot,
// average-pools the slot sequence over time, takes the argmax of each pooled
// step and collapses runs of equal words.

#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "b2t/decoder/beam.hpp"
#include "b2t/decoder/config.hpp"
#include "b2t/lattice/lattice.hpp"
#include "b2t/lm/scorer.hpp"

namespace b2t {

using Distribution = std::vector<double>;

struct PoolingWindow {
  std::size_t kernel = 5;
  std::size_t stride = 3;
};

/// Averages predictions that share a time slot; slots come back in time
/// order. Slot k covers time k * spacing / 2; records without a time stamp
/// occupy consecutive slots.
inline std::vector<Distribution> merge_time_slots(const Lattice& lat) {
  const double slide = lat.spacing_seconds().value_or(1.0) / 2.0;
  std::map<long long, std::pair<Distribution, std::size_t>> slots;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto& p = lat[i];
    const long long slot =
        p.time ? std::llround(*p.time / slide) : static_cast<long long>(i);
    auto& [sum, count] = slots[slot];
    if (sum.empty()) sum.assign(p.probs.size(), 0.0);
    for (std::size_t j = 0; j < p.probs.size(); ++j) sum[j] += p.probs[j];
    ++count;
  }
  std::vector<Distribution> out;
  out.reserve(slots.size());
  for (auto& [slot, entry] : slots) {
    auto& [sum, count] = entry;
    for (double& v : sum) v /= static_cast<double>(count);
    out.push_back(std::move(sum));
  }
  return out;
}

/// 1-D average pooling over time with renormalized outputs. Inputs shorter
/// than the kernel are returned unchanged.
inline std::vector<Distribution> average_pool(std::span<const Distribution> steps,
                                              PoolingWindow window = {}) {
  if (window.kernel == 0 || window.stride == 0)
    throw invalid_input_error("pooling kernel and stride must be positive");
  if (steps.size() < window.kernel)
    return std::vector<Distribution>(steps.begin(), steps.end());
  std::vector<Distribution> out;
  for (std::size_t start = 0; start + window.kernel <= steps.size();
       start += window.stride) {
    Distribution avg(steps[start].size(), 0.0);
    for (std::size_t t = start; t < start + window.kernel; ++t)
      for (std::size_t j = 0; j < avg.size(); ++j) avg[j] += steps[t][j];
    double total = 0.0;
    for (double& v : avg) {
      v /= static_cast<double>(window.kernel);
      total += v;
    }
    if (total > 0.0)
      for (double& v : avg) v /= total;
    out.push_back(std::move(avg));
  }
  return out;
}

/// Collapses each run of equal consecutive values to one value.
template <typename T>
std::vector<T> collapse_repeats(std::span<const T> seq) {
  std::vector<T> out;
  for (const auto& v : seq)
    if (out.empty() || !(out.back() == v)) out.push_back(v);
  return out;
}

template <typename T>
std::vector<T> collapse_repeats(const std::vector<T>& seq) {
  return collapse_repeats(std::span<const T>(seq));
}

namespace ctc_detail {

inline std::size_t argmax(const Distribution& d) {
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

}  // namespace ctc_detail

/// Merged, pooled and collapsed distributions: one per output word. Each run
/// of pooled steps with the same argmax is averaged into one distribution.
inline Lattice ctc_collapsed_lattice(const Lattice& lat, PoolingWindow window = {}) {
  const auto merged = merge_time_slots(lat);
  const auto pooled = average_pool(merged, window);
  std::vector<PositionDistribution> runs;
  std::size_t run_word = 0;
  std::size_t run_len = 0;
  for (const auto& step : pooled) {
    const std::size_t w = ctc_detail::argmax(step);
    if (run_len > 0 && w == run_word) {
      auto& probs = runs.back().probs;
      for (std::size_t j = 0; j < probs.size(); ++j) probs[j] += step[j];
      ++run_len;
      continue;
    }
    if (run_len > 0)
      for (double& v : runs.back().probs) v /= static_cast<double>(run_len);
    runs.push_back({step, std::nullopt, std::nullopt, std::nullopt});
    run_word = w;
    run_len = 1;
  }
  if (run_len > 0)
    for (double& v : runs.back().probs) v /= static_cast<double>(run_len);
  for (auto& r : runs) {
    double total = 0.0;
    for (double v : r.probs) total += v;
    for (double& v : r.probs) v /= total;
  }
  return Lattice(lat.vocab_ptr(), std::move(runs), lat.reference(),
                 lat.spacing_seconds());
}

/// CTC-greedy when `scorer` is null, otherwise CTC-beam: beam search over the
/// collapsed distributions.
inline std::vector<std::string> ctc_merge_decode(const Lattice& lat,
                                                 const LmScorer* scorer,
                                                 DecoderConfig config = {},
                                                 PoolingWindow window = {}) {
  if (!lat.spacing_seconds())
    throw invalid_input_error("CTC decoding needs an overdense lattice");
  if (lat.empty()) throw invalid_input_error("cannot decode an empty lattice");
  const Lattice collapsed = ctc_collapsed_lattice(lat, window);
  if (scorer == nullptr) {
    std::vector<std::string> out;
    out.reserve(collapsed.size());
    for (const auto& p : collapsed.positions())
      out.push_back(lat.vocab().word_at(p.argmax()));
    return out;
  }
  config.oov_source = OovSource::none();
  config.fill_mode = FillMode::none;
  return decode_beam(collapsed, *scorer, config);
}

}  // namespace b2t
