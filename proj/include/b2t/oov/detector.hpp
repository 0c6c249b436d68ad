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

#include <cstdint>
#include <istream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/lattice/lattice.hpp"
#include "b2t/oov/boosted_trees.hpp"
#include "b2t/oov/features.hpp"
#include "b2t/oov/logistic.hpp"

namespace b2t {

inline constexpr int kDetectorFormatVersion = 1;

enum class ClassifierKind { logistic, boosted_trees };

inline std::string to_string(ClassifierKind k) {
  return k == ClassifierKind::logistic ? "logistic" : "boosted_trees";
}

inline ClassifierKind classifier_kind_from_string(const std::string& s) {
  if (s == "logistic") return ClassifierKind::logistic;
  if (s == "boosted_trees" || s == "gbdt") return ClassifierKind::boosted_trees;
  throw invalid_input_error("unknown classifier kind '" + s + "'");
}

/// FNV-1a over the feature layout: probability dimension then stat names.
inline std::uint64_t feature_schema_hash(std::size_t prob_dim) {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&](std::string_view s) {
    for (unsigned char c : s) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= 0xff;
    h *= 1099511628211ULL;
  };
  mix("probs:" + std::to_string(prob_dim));
  for (auto name : kOovStatNames) mix(name);
  return h;
}

struct DetectorOptions {
  ClassifierKind kind = ClassifierKind::boosted_trees;
  LogisticParams logistic;
  BoostedTreesParams trees;
  double threshold = 0.5;
};

class OovDetector {
 public:
  OovDetector(std::shared_ptr<const BinaryClassifier> model, std::size_t prob_dim,
              double threshold)
      : model_(std::move(model)), prob_dim_(prob_dim), threshold_(threshold) {
    if (!(threshold_ >= 0.0 && threshold_ <= 1.0))
      throw invalid_input_error("detector threshold must lie in [0, 1]");
    if (model_->input_dim() != prob_dim_ + kNumOovStats)
      throw invalid_input_error("classifier input dimension does not match the feature layout");
  }

  double threshold() const { return threshold_; }
  std::size_t prob_dim() const { return prob_dim_; }
  const BinaryClassifier& model() const { return *model_; }
  OovDetector with_threshold(double t) const { return OovDetector(model_, prob_dim_, t); }

  double predict(const OovFeatureVector& f) const {
    if (f.probs.size() != prob_dim_)
      throw invalid_input_error("feature dimension " + std::to_string(f.probs.size()) +
                                " differs from the trained dimension " +
                                std::to_string(prob_dim_));
    return model_->predict(f.flattened());
  }

  bool flag(double probability) const { return probability >= threshold_; }

  void save(std::ostream& out) const {
    const nlohmann::json j = {{"format_version", kDetectorFormatVersion},
                              {"classifier_kind", model_->kind()},
                              {"feature_schema_hash", feature_schema_hash(prob_dim_)},
                              {"prob_dim", prob_dim_},
                              {"threshold", threshold_},
                              {"hyperparameters", model_->hyperparameters()},
                              {"parameters", model_->parameters()}};
    out << j.dump() << '\n';
  }

  static OovDetector load(std::istream& in) {
    nlohmann::json j;
    try {
      in >> j;
      if (j.at("format_version").get<int>() != kDetectorFormatVersion)
        throw parse_error("unsupported detector format version");
      const auto dim = j.at("prob_dim").get<std::size_t>();
      if (j.at("feature_schema_hash").get<std::uint64_t>() != feature_schema_hash(dim))
        throw parse_error("detector feature schema does not match this build");
      const auto kind = classifier_kind_from_string(j.at("classifier_kind").get<std::string>());
      std::shared_ptr<const BinaryClassifier> model;
      if (kind == ClassifierKind::logistic)
        model = std::make_shared<LogisticRegression>(
            LogisticRegression::from_json(j.at("hyperparameters"), j.at("parameters")));
      else
        model = std::make_shared<BoostedTrees>(BoostedTrees::from_json(
            j.at("hyperparameters"), j.at("parameters"), dim + kNumOovStats));
      return OovDetector(std::move(model), dim, j.at("threshold").get<double>());
    } catch (const nlohmann::json::exception& e) {
      throw parse_error(std::string("malformed detector file: ") + e.what());
    } catch (const invalid_input_error& e) {
      throw parse_error(std::string("malformed detector file: ") + e.what());
    }
  }

 private:
  std::shared_ptr<const BinaryClassifier> model_;
  std::size_t prob_dim_;
  double threshold_;
};

inline FeatureMatrix feature_matrix(std::span<const OovFeatureVector> features) {
  FeatureMatrix x;
  for (const auto& f : features) x.push_row(f.flattened());
  return x;
}

inline OovDetector train_oov_detector(std::span<const OovFeatureVector> features,
                                      const std::vector<bool>& labels,
                                      const DetectorOptions& options = {}) {
  if (features.empty()) throw invalid_input_error("no training features");
  const std::size_t dim = features.front().probs.size();
  const FeatureMatrix x = feature_matrix(features);
  std::shared_ptr<const BinaryClassifier> model;
  if (options.kind == ClassifierKind::logistic)
    model = std::make_shared<LogisticRegression>(LogisticRegression::fit(x, labels, options.logistic));
  else
    model = std::make_shared<BoostedTrees>(BoostedTrees::fit(x, labels, options.trees));
  return OovDetector(std::move(model), dim, options.threshold);
}

/// Features and ground-truth labels of every annotated position.
inline void collect_training_positions(const Lattice& lat, std::vector<OovFeatureVector>& features,
                                       std::vector<bool>& labels) {
  for (const auto& p : lat.positions()) {
    if (!p.oov_truth) continue;
    features.push_back(extract_oov_features(p.probs));
    labels.push_back(*p.oov_truth);
  }
}

inline std::vector<double> predict_oov(const OovDetector& detector, const Lattice& lat) {
  std::vector<double> out;
  out.reserve(lat.size());
  for (const auto& p : lat.positions())
    out.push_back(detector.predict(extract_oov_features(p.probs)));
  return out;
}

/// The lattice with `oov_detected` filled in, plus the resulting flags.
struct FlaggedLattice {
  Lattice lattice;
  std::vector<bool> flags;
};

inline FlaggedLattice flag_positions(const OovDetector& detector, const Lattice& lat) {
  const auto probs = predict_oov(detector, lat);
  std::vector<bool> flags;
  flags.reserve(probs.size());
  for (double p : probs) flags.push_back(detector.flag(p));
  return {lat.with_oov_detected(probs), std::move(flags)};
}

}  // namespace b2t
