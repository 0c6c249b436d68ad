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
#include <span>
#include <vector>

#include "b2t/core/error.hpp"

namespace b2t {

/// Temperature used to sharpen top-5 probabilities shown to an LLM.
inline constexpr double kSharpenTemperature = 0.01;

/// Tempered softmax, exp(s_i / T) / sum_j exp(s_j / T), evaluated after
/// subtracting the maximum score.
inline std::vector<double> softmax(std::span<const double> scores,
                                   double temperature = 1.0) {
  if (!(temperature > 0.0))
    throw invalid_input_error("softmax temperature must be positive");
  std::vector<double> out(scores.size());
  if (scores.empty()) return out;
  for (double s : scores)
    if (!std::isfinite(s))
      throw invalid_input_error("softmax scores must be finite");
  const double top = *std::max_element(scores.begin(), scores.end());
  double total = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    out[i] = std::exp((scores[i] - top) / temperature);
    total += out[i];
  }
  for (double& v : out) v /= total;
  return out;
}

}  // namespace b2t
