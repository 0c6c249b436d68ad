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

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "b2t/core/text.hpp"
#include "b2t/lattice/lattice_io.hpp"
#include "b2t/lattice/softmax.hpp"
#include "b2t/lattice/vocabulary_io.hpp"
#include "test_util.hpp"

namespace b2t {
namespace {

using testing::dist;
using testing::letter_vocab;

TEST(Text, NormalizeWord) {
  EXPECT_EQ(normalize_word("Don't,"), "don't");
  EXPECT_EQ(normalize_word("\"Holmes!\""), "holmes");
  EXPECT_EQ(normalize_word("Don\xE2\x80\x99t"), "don't");
  EXPECT_EQ(normalize_word("\xE2\x80\x9CWell"), "well");
  EXPECT_EQ(normalize_word("well-known."), "well-known");
  EXPECT_EQ(normalize_word("..."), "");
  EXPECT_EQ(normalize_word("<UNK>"), "<UNK>");
  EXPECT_EQ(normalize_word("caf\xC3\xA9"), "caf\xC3\xA9");
}

TEST(Text, TokenizeSplitsDoubleHyphens) {
  const auto w = tokenize("It was--I think--the  Baker Street\n \"boy\". --");
  const std::vector<std::string> want = {"it", "was", "i", "think", "the", "baker", "street", "boy"};
  EXPECT_EQ(w, want);
}

TEST(Text, SplitWhitespaceKeepsTokens) {
  const std::vector<std::string> want = {"a", "<UNK>", "B,"};
  EXPECT_EQ(split_whitespace("  a <UNK>\tB, "), want);
}

TEST(Vocabulary, RanksByFrequencyThenFirstOccurrence) {
  const std::vector<std::string> corpus = {"b", "a", "c", "a", "b", "d", "e"};
  const auto v = build_vocabulary(corpus, 3);
  const std::vector<std::string> words = {"b", "a", "c"};
  const std::vector<std::string> pool = {"d", "e"};
  EXPECT_EQ(v.words(), words);
  EXPECT_EQ(v.oov_pool(), pool);
  EXPECT_EQ(v.index_of("a"), 1u);
  EXPECT_FALSE(v.index_of("d"));
  EXPECT_TRUE(v.in_oov_pool("e"));
  EXPECT_DOUBLE_EQ(vocabulary_coverage(corpus, v), 5.0 / 7.0);
}

TEST(Vocabulary, OversizedRequestKeepsEverything) {
  const std::vector<std::string> corpus = {"x", "y", "x"};
  const auto v = build_vocabulary(corpus, 10);
  EXPECT_EQ(v.size(), 2u);
  EXPECT_TRUE(v.oov_pool().empty());
  EXPECT_DOUBLE_EQ(vocabulary_coverage(corpus, v), 1.0);
}

TEST(Vocabulary, RejectsBadInput) {
  EXPECT_THROW(Vocabulary({"a", "a"}), invalid_input_error);
  EXPECT_THROW(Vocabulary({"a"}, {"a"}), invalid_input_error);
  EXPECT_THROW(Vocabulary({""}), invalid_input_error);
  EXPECT_THROW(build_vocabulary({}, 5), invalid_input_error);
  const std::vector<std::string> c = {"a"};
  EXPECT_THROW(build_vocabulary(c, 0), invalid_input_error);
}

TEST(Vocabulary, FileRoundTrip) {
  const Vocabulary v({"the", "of", "and"}, {"holmes", "watson"});
  std::stringstream ss;
  save_vocabulary(v, ss);
  EXPECT_EQ(load_vocabulary(ss), v);
  std::istringstream bad(R"({"format_version":2,"words":["a"],"oov_pool":[]})");
  EXPECT_THROW(load_vocabulary(bad), parse_error);
  std::istringstream dup(R"({"format_version":1,"words":["a","a"],"oov_pool":[]})");
  EXPECT_THROW(load_vocabulary(dup), parse_error);
}

TEST(Softmax, SharpeningPeaksTheTopEntry) {
  const std::vector<double> p = {0.45, 0.23, 0.15, 0.11, 0.09};
  const auto s = softmax(p, kSharpenTemperature);
  EXPECT_GT(s[0], 0.999);
  // exp(-22) / (1 + exp(-22) + ...) for the runner-up.
  EXPECT_NEAR(s[1], std::exp(-22.0), 1e-12);
}

TEST(Softmax, SumsToOneAndIsShiftInvariant) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0.0, 3.0);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> x(1 + t % 17);
    for (double& v : x) v = n(rng);
    const auto a = softmax(x, 0.5);
    EXPECT_NEAR(std::accumulate(a.begin(), a.end(), 0.0), 1.0, 1e-12);
    for (double& v : x) v += 100.0;
    const auto b = softmax(x, 0.5);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
  }
}

TEST(Softmax, RejectsBadInput) {
  const std::vector<double> x = {1.0, 2.0};
  EXPECT_THROW(softmax(x, 0.0), invalid_input_error);
  const std::vector<double> inf = {1.0, INFINITY};
  EXPECT_THROW(softmax(inf), invalid_input_error);
  EXPECT_TRUE(softmax(std::vector<double>{}).empty());
}

TEST(Lattice, ValidatesPositions) {
  auto v = letter_vocab(3);
  EXPECT_THROW(Lattice(v, {dist({0.5, 0.5})}), invalid_input_error);
  EXPECT_THROW(Lattice(v, {dist({0.5, 0.3, 0.3})}), invalid_input_error);
  EXPECT_THROW(Lattice(v, {dist({1.5, -0.5, 0.0})}), invalid_input_error);
  EXPECT_THROW(Lattice(v, {dist({1.0, 0.0, 0.0})}, std::vector<std::string>{"a", "b"}),
               invalid_input_error);
  EXPECT_THROW(Lattice(nullptr, {}), invalid_input_error);
  const Lattice ok(v, {dist({0.2, 0.5, 0.3})});
  EXPECT_EQ(ok[0].argmax(), 1u);
  EXPECT_THROW(ok.with_oov_detected(std::vector<double>{1.5}), invalid_input_error);
  EXPECT_EQ(*ok.with_oov_detected(std::vector<double>{0.25})[0].oov_detected, 0.25);
}

TEST(Lattice, ArgmaxTiesGoToLowestIndex) {
  EXPECT_EQ(dist({0.25, 0.375, 0.375}).argmax(), 1u);
}

TEST(LatticeIo, RoundTripIsExact) {
  std::mt19937_64 rng(11);
  auto v = letter_vocab(6, {"zed"});
  std::vector<Lattice> lats;
  for (int i = 0; i < 4; ++i) {
    auto base = testing::random_lattice(v, 3 + i, rng, 0.3);
    std::vector<std::string> ref(base.size(), "w1");
    std::vector<PositionDistribution> pos = base.positions();
    pos[0].oov_detected = 0.125;
    lats.emplace_back(v, pos, ref);
  }
  std::stringstream ss;
  save_lattices(lats, ss);
  const auto back = load_lattices(ss);
  ASSERT_EQ(back.size(), lats.size());
  for (std::size_t i = 0; i < lats.size(); ++i) EXPECT_EQ(back[i], lats[i]);
}

TEST(LatticeIo, OverdenseRoundTrip) {
  auto v = letter_vocab(2);
  auto p0 = dist({0.75, 0.25});
  p0.time = 0.0;
  auto p1 = dist({0.25, 0.75});
  p1.time = 0.15;
  const Lattice lat(v, {p0, p1, p1}, std::vector<std::string>{"w0", "w1"}, 0.3);
  std::stringstream ss;
  save_lattice(lat, ss);
  EXPECT_EQ(load_lattice(ss), lat);
}

TEST(LatticeIo, SparseAndCosineRecords) {
  std::istringstream in(
      R"({"format_version":1,"vocab":["a","b","c"],"score_kind":"prob"}
{"probs":{"0":0.8,"2":0.2004}}

{"format_version":1,"vocab":["a","b"],"score_kind":"cosine","temperature":0.5}
{"probs":[0.5,0.0]}
)");
  const auto lats = load_lattices(in);
  ASSERT_EQ(lats.size(), 2u);
  EXPECT_NEAR(lats[0][0].probs[0], 0.8 / 1.0004, 1e-15);
  EXPECT_EQ(lats[0][0].probs[1], 0.0);
  const double e = std::exp(1.0);
  EXPECT_NEAR(lats[1][0].probs[0], e / (e + 1.0), 1e-15);
}

TEST(LatticeIo, CosineTemperatureOption) {
  std::istringstream in(R"({"format_version":1,"vocab":["a","b"],"score_kind":"cosine"}
{"probs":[0.5,0.0]}
)");
  LatticeReadOptions opts;
  opts.cosine_temperature = 0.25;
  const auto lat = load_lattice(in, opts);
  const double e = std::exp(2.0);
  EXPECT_NEAR(lat[0].probs[0], e / (e + 1.0), 1e-15);
}

std::size_t error_line(const std::string& text) {
  std::istringstream in(text);
  try {
    load_lattices(in);
  } catch (const parse_error& e) {
    return e.line();
  }
  return 0;
}

TEST(LatticeIo, ErrorsCarryLineNumbers) {
  const std::string h = R"({"format_version":1,"vocab":["a","b"]})";
  EXPECT_EQ(error_line(h + "\n{\"probs\":[0.5,0.5]}\n{\"probs\":[0.5]}\n"), 3u);
  EXPECT_EQ(error_line(h + "\n{\"probs\":[0.5,0.6]}\n"), 2u);
  EXPECT_EQ(error_line(h + "\nnot json\n"), 2u);
  EXPECT_EQ(error_line(h + "\n{\"probs\":{\"7\":1.0}}\n"), 2u);
  EXPECT_EQ(error_line(h + "\n{\"probs\":{\"0\":0.5}}\n"), 2u);
  EXPECT_EQ(error_line("{\"format_version\":9,\"vocab\":[\"a\"]}\n"), 1u);
  EXPECT_EQ(error_line(h + "\n{\"probs\":[1,0],\"ref\":\"a\"}\n{\"probs\":[1,0]}\n"), 1u);
  std::istringstream empty("");
  EXPECT_THROW(load_lattice(empty), parse_error);
}

}  // namespace
}  // namespace b2t
