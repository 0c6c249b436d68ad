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

#include <array>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"
#include "b2t/metrics/edit_distance.hpp"
#include "b2t/metrics/overlap.hpp"
#include "b2t/metrics/semantic.hpp"

namespace b2t {

inline constexpr std::size_t kNumMetrics = 6;

inline constexpr std::array<std::string_view, kNumMetrics> kMetricNames = {
    "wer", "cer", "bleu1", "rouge1f", "meteor_lite", "semantic"};

/// Column headers of the printed table.
inline constexpr std::array<std::string_view, kNumMetrics> kMetricHeaders = {
    "WER", "CER", "BLEU", "ROUGE", "METEOR*", "BERT*"};

using MetricScores = std::array<double, kNumMetrics>;

inline MetricScores score_sequence(std::span<const std::string> reference,
                                   std::span<const std::string> hypothesis,
                                   const WordEmbedder& embedder) {
  return {wer(reference, hypothesis),      cer(reference, hypothesis),
          bleu1(reference, hypothesis),    rouge1f(reference, hypothesis),
          meteor_lite(reference, hypothesis), semantic_score(reference, hypothesis, embedder)};
}

struct MetricSummary {
  double mean = 0.0;
  double sem = 0.0;  // sample standard deviation / sqrt(n); 0 when n < 2
  std::size_t n = 0;
};

inline MetricSummary summarize(std::span<const double> values) {
  MetricSummary s;
  s.n = values.size();
  if (s.n == 0) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(s.n);
  if (s.n > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.sem = std::sqrt(ss / static_cast<double>(s.n - 1)) / std::sqrt(static_cast<double>(s.n));
  }
  return s;
}

class EvalReport {
 public:
  void add(const MetricScores& scores) { per_sequence_.push_back(scores); }
  void add(std::span<const std::string> reference, std::span<const std::string> hypothesis,
           const WordEmbedder& embedder) {
    add(score_sequence(reference, hypothesis, embedder));
  }

  const std::vector<MetricScores>& per_sequence() const { return per_sequence_; }
  std::size_t size() const { return per_sequence_.size(); }

  MetricSummary summary(std::size_t metric) const {
    std::vector<double> v;
    v.reserve(per_sequence_.size());
    for (const auto& s : per_sequence_) v.push_back(s.at(metric));
    return summarize(v);
  }
  MetricSummary summary(std::string_view name) const {
    for (std::size_t m = 0; m < kNumMetrics; ++m)
      if (kMetricNames[m] == name) return summary(m);
    throw invalid_input_error("unknown metric " + std::string(name));
  }

  /// {metric: {mean, sem, n}}
  nlohmann::json summary_json() const {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      const auto s = summary(m);
      j[std::string(kMetricNames[m])] = {{"mean", s.mean}, {"sem", s.sem}, {"n", s.n}};
    }
    return j;
  }

  /// Header line of metric names, then one tab-separated line per sequence.
  void write_lines(std::ostream& out) const {
    out << "index";
    for (auto name : kMetricNames) out << '\t' << name;
    out << '\n';
    char buf[32];
    for (std::size_t i = 0; i < per_sequence_.size(); ++i) {
      out << i;
      for (double v : per_sequence_[i]) {
        std::snprintf(buf, sizeof buf, "%.6f", v);
        out << '\t' << buf;
      }
      out << '\n';
    }
  }

  /// Fixed-width mean and standard-error table. Starred columns are the
  /// resource-free stand-ins for METEOR and BERTScore.
  void write_table(std::ostream& out, std::string_view label = "") const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-16s", "method");
    out << buf;
    for (auto h : kMetricHeaders) {
      std::snprintf(buf, sizeof buf, "%14s", std::string(h).c_str());
      out << buf;
    }
    out << '\n';
    std::snprintf(buf, sizeof buf, "%-16s", std::string(label).c_str());
    out << buf;
    for (std::size_t m = 0; m < kNumMetrics; ++m) {
      const auto s = summary(m);
      std::snprintf(buf, sizeof buf, "%8.3f+-%.3f", s.mean, s.sem);
      std::string cell = buf;
      std::snprintf(buf, sizeof buf, "%14s", cell.c_str());
      out << buf;
    }
    out << '\n';
  }

 private:
  std::vector<MetricScores> per_sequence_;
};

}  // namespace b2t
