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

#include <cmath>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"

namespace b2t {

/// Row-major design matrix.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(data).subspan(r * cols, cols);
  }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  void push_row(std::span<const double> x) {
    if (rows == 0 && cols == 0) cols = x.size();
    if (x.size() != cols) throw invalid_input_error("feature rows differ in length");
    data.insert(data.end(), x.begin(), x.end());
    ++rows;
  }
};

/// A fitted binary classifier: maps a feature row to P(label = true).
class BinaryClassifier {
 public:
  virtual ~BinaryClassifier() = default;
  virtual double predict(std::span<const double> x) const = 0;
  virtual std::size_t input_dim() const = 0;
  virtual std::string kind() const = 0;
  virtual nlohmann::json hyperparameters() const = 0;
  virtual nlohmann::json parameters() const = 0;
};

inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

inline void check_training_set(const FeatureMatrix& x, const std::vector<bool>& y) {
  if (x.rows != y.size()) throw invalid_input_error("feature and label counts differ");
  bool pos = false, neg = false;
  for (bool l : y) (l ? pos : neg) = true;
  if (!pos || !neg)
    throw invalid_input_error("training labels must contain both classes");
}

}  // namespace b2t
