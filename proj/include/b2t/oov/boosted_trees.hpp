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

// Gradient-boosted regression trees for binary classification.
//
// Second-order boosting of the logistic loss with histogram split finding.
// Regularization follows the usual form: a split must gain more than `gamma`,
// leaf weights are -soft(G, alpha) / (H + lambda), and every child must carry
// hessian mass of at least `min_child_weight`.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "b2t/oov/classifier.hpp"

namespace b2t {

struct BoostedTreesParams {
  double learning_rate = 0.05;
  std::size_t n_estimators = 200;
  std::size_t max_depth = 4;
  double min_child_weight = 2.0;
  double subsample = 0.8;
  double colsample = 0.8;
  double gamma = 1.0;
  double alpha = 0.1;
  double lambda = 1.0;
  std::size_t max_bins = 32;
  std::uint64_t seed = 0;

  void validate() const {
    if (!(learning_rate > 0.0)) throw invalid_input_error("learning_rate must be > 0");
    if (n_estimators < 1) throw invalid_input_error("n_estimators must be >= 1");
    if (!(subsample > 0.0 && subsample <= 1.0))
      throw invalid_input_error("subsample must lie in (0, 1]");
    if (!(colsample > 0.0 && colsample <= 1.0))
      throw invalid_input_error("colsample must lie in (0, 1]");
    if (gamma < 0.0 || alpha < 0.0 || lambda < 0.0 || min_child_weight < 0.0)
      throw invalid_input_error("regularization terms must be >= 0");
    if (max_bins < 2 || max_bins > 65535)
      throw invalid_input_error("max_bins must lie in [2, 65535]");
  }
};

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;
};

using Tree = std::vector<TreeNode>;

namespace gbdt_detail {

inline double soft_threshold(double g, double alpha) {
  if (g > alpha) return g - alpha;
  if (g < -alpha) return g + alpha;
  return 0.0;
}

/// Cut points per feature; value v falls in bin upper_bound(cuts, v).
inline std::vector<std::vector<double>> make_cuts(const FeatureMatrix& x, std::size_t max_bins) {
  std::vector<std::vector<double>> cuts(x.cols);
  std::vector<double> col(x.rows);
  for (std::size_t c = 0; c < x.cols; ++c) {
    for (std::size_t r = 0; r < x.rows; ++r) col[r] = x.at(r, c);
    std::sort(col.begin(), col.end());
    std::vector<double> distinct;
    std::unique_copy(col.begin(), col.end(), std::back_inserter(distinct));
    auto& out = cuts[c];
    if (distinct.size() <= max_bins) {
      out.assign(distinct.begin() + 1, distinct.end());
    } else {
      for (std::size_t b = 1; b < max_bins; ++b) {
        const double v = col[b * col.size() / max_bins];
        if (out.empty() || v > out.back()) out.push_back(v);
      }
      if (!out.empty() && out.front() <= col.front()) out.erase(out.begin());
    }
  }
  return cuts;
}

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<std::uint16_t>>& bins,
              const std::vector<std::vector<double>>& cuts, const std::vector<double>& grad,
              const std::vector<double>& hess, const std::vector<std::size_t>& features,
              const BoostedTreesParams& p)
      : bins_(bins), cuts_(cuts), g_(grad), h_(hess), features_(features), p_(p) {}

  Tree build(std::vector<std::size_t> rows) {
    tree_.clear();
    grow(std::move(rows), 0);
    return std::move(tree_);
  }

 private:
  double leaf_weight(double g, double h) const {
    return -soft_threshold(g, p_.alpha) / (h + p_.lambda) * p_.learning_rate;
  }
  double score(double g, double h) const {
    const double t = soft_threshold(g, p_.alpha);
    return t * t / (h + p_.lambda);
  }

  int grow(std::vector<std::size_t> rows, std::size_t depth) {
    const int id = static_cast<int>(tree_.size());
    tree_.emplace_back();
    double g = 0.0, h = 0.0;
    for (std::size_t r : rows) {
      g += g_[r];
      h += h_[r];
    }
    tree_[id].value = leaf_weight(g, h);
    if (depth >= p_.max_depth || rows.size() < 2) return id;

    double best_gain = 0.0;
    int best_feature = -1;
    std::size_t best_bin = 0;
    std::vector<double> hg, hh;
    for (std::size_t f : features_) {
      const auto& cut = cuts_[f];
      if (cut.empty()) continue;
      hg.assign(cut.size() + 1, 0.0);
      hh.assign(cut.size() + 1, 0.0);
      const auto& fb = bins_[f];
      for (std::size_t r : rows) {
        hg[fb[r]] += g_[r];
        hh[fb[r]] += h_[r];
      }
      double gl = 0.0, hl = 0.0;
      for (std::size_t b = 0; b < cut.size(); ++b) {
        gl += hg[b];
        hl += hh[b];
        const double gr = g - gl, hr = h - hl;
        if (hl < p_.min_child_weight || hr < p_.min_child_weight) continue;
        const double gain =
            0.5 * (score(gl, hl) + score(gr, hr) - score(g, h)) - p_.gamma;
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = static_cast<int>(f);
          best_bin = b;
        }
      }
    }
    if (best_feature < 0) return id;

    std::vector<std::size_t> left, right;
    const auto& fb = bins_[static_cast<std::size_t>(best_feature)];
    for (std::size_t r : rows) (fb[r] <= best_bin ? left : right).push_back(r);
    rows.clear();
    rows.shrink_to_fit();
    tree_[id].feature = best_feature;
    tree_[id].threshold = cuts_[static_cast<std::size_t>(best_feature)][best_bin];
    const int l = grow(std::move(left), depth + 1);
    const int r = grow(std::move(right), depth + 1);
    tree_[id].left = l;
    tree_[id].right = r;
    return id;
  }

  const std::vector<std::vector<std::uint16_t>>& bins_;
  const std::vector<std::vector<double>>& cuts_;
  const std::vector<double>& g_;
  const std::vector<double>& h_;
  const std::vector<std::size_t>& features_;
  const BoostedTreesParams& p_;
  Tree tree_;
};

inline double eval_tree(const Tree& t, std::span<const double> x) {
  int n = 0;
  while (t[n].feature >= 0)
    n = x[static_cast<std::size_t>(t[n].feature)] < t[n].threshold ? t[n].left : t[n].right;
  return t[n].value;
}

}  // namespace gbdt_detail

class BoostedTrees final : public BinaryClassifier {
 public:
  BoostedTrees(std::vector<Tree> trees, std::size_t dim, BoostedTreesParams params)
      : trees_(std::move(trees)), dim_(dim), params_(params) {}

  static BoostedTrees fit(const FeatureMatrix& x, const std::vector<bool>& y,
                          BoostedTreesParams params = {}) {
    params.validate();
    check_training_set(x, y);
    const auto cuts = gbdt_detail::make_cuts(x, params.max_bins);
    std::vector<std::vector<std::uint16_t>> bins(x.cols, std::vector<std::uint16_t>(x.rows));
    for (std::size_t c = 0; c < x.cols; ++c)
      for (std::size_t r = 0; r < x.rows; ++r)
        bins[c][r] = static_cast<std::uint16_t>(
            std::upper_bound(cuts[c].begin(), cuts[c].end(), x.at(r, c)) - cuts[c].begin());

    std::mt19937_64 rng(params.seed);
    std::vector<double> margin(x.rows, 0.0), grad(x.rows), hess(x.rows);
    std::vector<std::size_t> all_rows(x.rows), all_cols(x.cols);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const auto n_rows = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params.subsample * static_cast<double>(x.rows))));
    const auto n_cols = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params.colsample * static_cast<double>(x.cols))));

    std::vector<Tree> trees;
    trees.reserve(params.n_estimators);
    for (std::size_t t = 0; t < params.n_estimators; ++t) {
      for (std::size_t r = 0; r < x.rows; ++r) {
        const double p = sigmoid(margin[r]);
        grad[r] = p - (y[r] ? 1.0 : 0.0);
        hess[r] = std::max(p * (1.0 - p), 1e-16);
      }
      std::vector<std::size_t> rows = sample(all_rows, n_rows, rng);
      std::vector<std::size_t> cols = sample(all_cols, n_cols, rng);
      gbdt_detail::TreeBuilder builder(bins, cuts, grad, hess, cols, params);
      Tree tree = builder.build(std::move(rows));
      for (std::size_t r = 0; r < x.rows; ++r)
        margin[r] += gbdt_detail::eval_tree(tree, x.row(r));
      trees.push_back(std::move(tree));
    }
    return BoostedTrees(std::move(trees), x.cols, params);
  }

  double margin(std::span<const double> x) const {
    if (x.size() != dim_) throw invalid_input_error("feature dimension mismatch");
    double m = 0.0;
    for (const auto& t : trees_) m += gbdt_detail::eval_tree(t, x);
    return m;
  }
  double predict(std::span<const double> x) const override { return sigmoid(margin(x)); }
  std::size_t input_dim() const override { return dim_; }
  std::string kind() const override { return "boosted_trees"; }
  const std::vector<Tree>& trees() const { return trees_; }

  nlohmann::json hyperparameters() const override {
    const auto& p = params_;
    return {{"learning_rate", p.learning_rate}, {"n_estimators", p.n_estimators},
            {"max_depth", p.max_depth},         {"min_child_weight", p.min_child_weight},
            {"subsample", p.subsample},         {"colsample", p.colsample},
            {"gamma", p.gamma},                 {"alpha", p.alpha},
            {"lambda", p.lambda},               {"max_bins", p.max_bins},
            {"seed", p.seed}};
  }

  nlohmann::json parameters() const override {
    nlohmann::json trees = nlohmann::json::array();
    for (const auto& t : trees_) {
      nlohmann::json nodes = nlohmann::json::array();
      for (const auto& n : t)
        nodes.push_back({n.feature, n.threshold, n.left, n.right, n.value});
      trees.push_back(std::move(nodes));
    }
    return {{"trees", std::move(trees)}};
  }

  static BoostedTrees from_json(const nlohmann::json& hyper, const nlohmann::json& p,
                                std::size_t dim) {
    BoostedTreesParams params;
    params.learning_rate = hyper.at("learning_rate").get<double>();
    params.n_estimators = hyper.at("n_estimators").get<std::size_t>();
    params.max_depth = hyper.at("max_depth").get<std::size_t>();
    params.min_child_weight = hyper.at("min_child_weight").get<double>();
    params.subsample = hyper.at("subsample").get<double>();
    params.colsample = hyper.at("colsample").get<double>();
    params.gamma = hyper.at("gamma").get<double>();
    params.alpha = hyper.at("alpha").get<double>();
    params.lambda = hyper.at("lambda").get<double>();
    params.max_bins = hyper.at("max_bins").get<std::size_t>();
    params.seed = hyper.at("seed").get<std::uint64_t>();
    std::vector<Tree> trees;
    for (const auto& jt : p.at("trees")) {
      Tree t;
      for (const auto& jn : jt) {
        TreeNode n{jn.at(0).get<int>(), jn.at(1).get<double>(), jn.at(2).get<int>(),
                   jn.at(3).get<int>(), jn.at(4).get<double>()};
        const int size = static_cast<int>(jt.size());
        const int self = static_cast<int>(t.size());
        if (n.feature >= static_cast<int>(dim) ||
            (n.feature >= 0 && (n.left <= self || n.left >= size || n.right <= self ||
                                n.right >= size)))
          throw parse_error("malformed tree node");
        t.push_back(n);
      }
      if (t.empty()) throw parse_error("empty tree");
      trees.push_back(std::move(t));
    }
    return BoostedTrees(std::move(trees), dim, params);
  }

 private:
  static std::vector<std::size_t> sample(const std::vector<std::size_t>& all, std::size_t k,
                                         std::mt19937_64& rng) {
    if (k >= all.size()) return all;
    std::vector<std::size_t> out;
    out.reserve(k);
    std::sample(all.begin(), all.end(), std::back_inserter(out), k, rng);
    return out;
  }

  std::vector<Tree> trees_;
  std::size_t dim_;
  BoostedTreesParams params_;
};

}  // namespace b2t
