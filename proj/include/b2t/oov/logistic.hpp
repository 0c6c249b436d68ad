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
#include <vector>

#include "b2t/oov/classifier.hpp"

namespace b2t {

struct LogisticParams {
  double l2 = 1e-3;
  double learning_rate = 0.5;
  std::size_t epochs = 300;
};

/// L2-regularized logistic regression on standardized features, fitted by
/// full-batch gradient descent.
class LogisticRegression final : public BinaryClassifier {
 public:
  LogisticRegression(std::vector<double> mean, std::vector<double> scale,
                     std::vector<double> weights, double bias, LogisticParams params)
      : mean_(std::move(mean)), scale_(std::move(scale)), w_(std::move(weights)),
        b_(bias), params_(params) {
    if (mean_.size() != w_.size() || scale_.size() != w_.size())
      throw invalid_input_error("logistic parameter sizes differ");
  }

  static LogisticRegression fit(const FeatureMatrix& x, const std::vector<bool>& y,
                                LogisticParams params = {}) {
    check_training_set(x, y);
    const std::size_t d = x.cols;
    const auto n = static_cast<double>(x.rows);
    std::vector<double> mean(d, 0.0), scale(d, 0.0);
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < d; ++c) mean[c] += x.at(r, c);
    for (double& m : mean) m /= n;
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < d; ++c) {
        const double v = x.at(r, c) - mean[c];
        scale[c] += v * v;
      }
    for (double& s : scale) {
      s = std::sqrt(s / n);
      if (s < 1e-12) s = 1.0;
    }

    FeatureMatrix z = x;
    for (std::size_t r = 0; r < z.rows; ++r)
      for (std::size_t c = 0; c < d; ++c)
        z.data[r * d + c] = (z.data[r * d + c] - mean[c]) / scale[c];

    std::vector<double> w(d, 0.0), grad(d);
    double b = 0.0;
    for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
      std::fill(grad.begin(), grad.end(), 0.0);
      double gb = 0.0;
      for (std::size_t r = 0; r < z.rows; ++r) {
        const auto row = z.row(r);
        double s = b;
        for (std::size_t c = 0; c < d; ++c) s += w[c] * row[c];
        const double err = sigmoid(s) - (y[r] ? 1.0 : 0.0);
        for (std::size_t c = 0; c < d; ++c) grad[c] += err * row[c];
        gb += err;
      }
      for (std::size_t c = 0; c < d; ++c)
        w[c] -= params.learning_rate * (grad[c] / n + params.l2 * w[c]);
      b -= params.learning_rate * gb / n;
    }
    return LogisticRegression(std::move(mean), std::move(scale), std::move(w), b, params);
  }

  double predict(std::span<const double> x) const override {
    if (x.size() != w_.size()) throw invalid_input_error("feature dimension mismatch");
    double s = b_;
    for (std::size_t c = 0; c < w_.size(); ++c) s += w_[c] * (x[c] - mean_[c]) / scale_[c];
    return sigmoid(s);
  }
  std::size_t input_dim() const override { return w_.size(); }
  std::string kind() const override { return "logistic"; }
  nlohmann::json hyperparameters() const override {
    return {{"l2", params_.l2},
            {"learning_rate", params_.learning_rate},
            {"epochs", params_.epochs}};
  }
  nlohmann::json parameters() const override {
    return {{"mean", mean_}, {"scale", scale_}, {"weights", w_}, {"bias", b_}};
  }

  static LogisticRegression from_json(const nlohmann::json& hyper, const nlohmann::json& p) {
    LogisticParams params;
    params.l2 = hyper.at("l2").get<double>();
    params.learning_rate = hyper.at("learning_rate").get<double>();
    params.epochs = hyper.at("epochs").get<std::size_t>();
    return LogisticRegression(p.at("mean").get<std::vector<double>>(),
                              p.at("scale").get<std::vector<double>>(),
                              p.at("weights").get<std::vector<double>>(),
                              p.at("bias").get<double>(), params);
  }

 private:
  std::vector<double> mean_, scale_, w_;
  double b_;
  LogisticParams params_;
};

}  // namespace b2t
