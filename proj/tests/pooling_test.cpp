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

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "b2t/pooling/pooling.hpp"

namespace b2t {
namespace {

constexpr const char* kFourDatasets = R"(# standalone top-10 accuracy
datasets    LibriBrain Armeni Gwilliams Broderick
standalone  .42        .31    .27       .12
LibriBrain  -          .44    .41       .42
Armeni      .36        -      .33       .30
Gwilliams   .31        .30    -         .26
Broderick   .14        .13    .12       -
chance      .004       .004   .004      .004
)";

AccuracyTable parse(const std::string& text) {
  std::istringstream in(text);
  return load_accuracy_table(in);
}

// Pearson as E[(x - mx)(y - my)] / (sd_x sd_y) with population moments.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += x[i] / n, my += y[i] / n;
  double cov = 0, vx = 0, vy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    cov += (x[i] - mx) * (y[i] - my) / n;
    vx += (x[i] - mx) * (x[i] - mx) / n;
    vy += (y[i] - my) * (y[i] - my) / n;
  }
  return cov / std::sqrt(vx * vy);
}

TEST(AccuracyTable, ParsesTheTextFormat) {
  const auto t = parse(kFourDatasets);
  EXPECT_EQ(t.datasets, (std::vector<std::string>{"LibriBrain", "Armeni", "Gwilliams", "Broderick"}));
  EXPECT_EQ(t.standalone.at("Armeni"), 0.31);
  EXPECT_EQ(t.joint.at({"Armeni", "LibriBrain"}), 0.36);
  EXPECT_EQ(t.joint.size(), 12u);
  EXPECT_EQ(t.chance.at("Broderick"), 0.004);
}

TEST(AccuracyTable, RejectsMalformedTables) {
  EXPECT_THROW(parse(""), parse_error);
  EXPECT_THROW(parse("standalone .1\n"), parse_error);
  EXPECT_THROW(parse("datasets A B\nstandalone .1\n"), parse_error);
  EXPECT_THROW(parse("datasets A B\nstandalone .1 x\n"), parse_error);
  EXPECT_THROW(parse("datasets A B\nZ .1 .2\n"), parse_error);
  EXPECT_THROW(parse("datasets A B\nstandalone .1 1.5\n"), parse_error);
  EXPECT_THROW(parse("datasets A A\nstandalone .1 .2\n"), parse_error);
  EXPECT_THROW(parse("datasets A B\nstandalone .1 .2\nA .3 .4\n"), parse_error);  // diagonal
  try {
    parse("datasets A B\n\nstandalone .1 ,2\n");
    FAIL();
  } catch (const parse_error& e) {
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
  }
}

TEST(Improvement, MatrixAndMeans) {
  const auto t = parse(kFourDatasets);
  const auto m = improvement_matrix(t);
  EXPECT_NEAR(m.delta[1][0], 0.36 - 0.31, 1e-15);
  EXPECT_EQ(m.delta[2][2], 0.0);
  const auto conferred = mean_improvements(m, ImprovementAxis::conferred);
  EXPECT_NEAR(conferred[0], ((0.36 - 0.31) + (0.31 - 0.27) + (0.14 - 0.12)) / 3.0, 1e-15);
  const auto received = mean_improvements(m, ImprovementAxis::received);
  EXPECT_NEAR(received[0], ((0.44 - 0.42) + (0.41 - 0.42) + 0.0) / 3.0, 1e-15);
  auto missing = t;
  missing.joint.erase({"Armeni", "Gwilliams"});
  EXPECT_THROW(improvement_matrix(missing), invalid_input_error);
}

TEST(Improvement, QualityCorrelationMatchesOracle) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.05, 0.6);
  for (int trial = 0; trial < 200; ++trial) {
    AccuracyTable t;
    const std::size_t n = 3 + static_cast<std::size_t>(trial % 5);
    for (std::size_t i = 0; i < n; ++i) {
      t.datasets.push_back("d" + std::to_string(i));
      t.standalone[t.datasets.back()] = u(rng);
    }
    for (const auto& e : t.datasets)
      for (const auto& p : t.datasets)
        if (e != p) t.joint[{e, p}] = u(rng);
    for (auto axis : {ImprovementAxis::conferred, ImprovementAxis::received}) {
      std::vector<double> q, g;
      for (const auto& d : t.datasets) {
        q.push_back(t.standalone.at(d));
        double sum = 0.0;
        for (const auto& o : t.datasets) {
          if (o == d) continue;
          sum += axis == ImprovementAxis::conferred ? t.joint.at({o, d}) - t.standalone.at(o)
                                                    : t.joint.at({d, o}) - t.standalone.at(d);
        }
        g.push_back(sum / static_cast<double>(n - 1));
      }
      EXPECT_NEAR(quality_correlation(t, axis).r, pearson_oracle(q, g), 1e-12);
    }
  }
}

TEST(SelectPool, PrefersHighStandaloneQuality) {
  const auto t = parse(kFourDatasets);
  EXPECT_EQ(select_pool(t, "Gwilliams", 2), (std::vector<std::string>{"LibriBrain", "Armeni"}));
  EXPECT_EQ(select_pool(t, "LibriBrain", 1), (std::vector<std::string>{"Armeni"}));
  EXPECT_EQ(select_pool(t, "Broderick", 3),
            (std::vector<std::string>{"LibriBrain", "Armeni", "Gwilliams"}));
  EXPECT_THROW(select_pool(t, "Nope", 1), invalid_input_error);
  EXPECT_THROW(select_pool(t, "Armeni", 4), invalid_input_error);
  EXPECT_THROW(select_pool(t, "Armeni", 0), invalid_input_error);
}

TEST(SelectPool, InvariantToDatasetOrder) {
  const auto t = parse(kFourDatasets);
  auto shuffled = t;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(shuffled.datasets.begin(), shuffled.datasets.end(), rng);
    for (const auto& d : t.datasets)
      for (std::size_t k = 1; k < 4; ++k) EXPECT_EQ(select_pool(shuffled, d, k), select_pool(t, d, k));
    EXPECT_NEAR(quality_correlation(shuffled).r, quality_correlation(t).r, 1e-12);
  }
  auto tied = t;
  tied.standalone["Armeni"] = 0.42;
  EXPECT_EQ(select_pool(tied, "Gwilliams", 1), (std::vector<std::string>{"Armeni"}));
}

// Reference p-values from scipy.stats.
TEST(Stats, MatchesReferenceValues) {
  const std::vector<double> a = {1, 2, 3, 4, 5}, b = {2, 2.5, 2.8, 3.1};
  const auto w = welch_t_test(a, b);
  EXPECT_NEAR(w.t, 0.5369248441712193, 1e-12);
  EXPECT_NEAR(w.p_two_sided, 0.6150222072023425, 1e-10);
  EXPECT_NEAR(w.p_greater, 0.30751110360117123, 1e-10);
  const std::vector<double> x = {.42, .31, .27, .12}, y = {.05, .03, .035, -.01};
  const auto c = pearson(x, y);
  EXPECT_NEAR(c.r, 0.9594112810386859, 1e-12);
  EXPECT_NEAR(c.p_value, 0.04058871896131411, 1e-10);
}

TEST(Stats, DegenerateInputs) {
  const std::vector<double> flat = {1, 1, 1}, up = {1, 2, 3};
  EXPECT_THROW(pearson(flat, up), undefined_correlation_error);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}), invalid_input_error);
  EXPECT_EQ(pearson(up, up).r, 1.0);
  EXPECT_EQ(pearson(up, up).p_value, 0.0);
  EXPECT_THROW(welch_t_test(flat, flat), undefined_correlation_error);
  EXPECT_EQ(welch_t_test(std::vector<double>{2, 2}, flat).p_greater, 0.0);
  EXPECT_THROW(welch_t_test(std::vector<double>{1}, flat), invalid_input_error);
  AccuracyTable two;
  two.datasets = {"A", "B"};
  EXPECT_THROW(quality_correlation(two), invalid_input_error);
}

}  // namespace
}  // namespace b2t
