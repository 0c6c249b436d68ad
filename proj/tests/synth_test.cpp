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
#include <random>

#include <gtest/gtest.h>

#include "b2t/lm/ngram.hpp"
#include "b2t/metrics/edit_distance.hpp"
#include "b2t/oov/features.hpp"
#include "b2t/synth/baselines.hpp"
#include "b2t/synth/corpus.hpp"
#include "b2t/synth/generator.hpp"
#include "test_util.hpp"

namespace b2t {
namespace {

double observed_accuracy(std::size_t dim, const SynthConfig& cfg, std::size_t n,
                         std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, dim - 1);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto truth = pick(rng);
    auto p = synth_position(dim, truth, cfg, rng);
    if (testing::dist(p.probs).argmax() == truth) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(n);
}

// 6000 draws: a binomial standard error below 0.0065 at any accuracy.
TEST(Synth, TopOneAccuracyIsCalibrated) {
  for (double acc : {0.1, 0.3, 0.6, 0.9}) {
    SynthConfig cfg;
    cfg.top1_accuracy = acc;
    EXPECT_NEAR(observed_accuracy(250, cfg, 6000, 1), acc, 0.025) << acc;
    cfg.boost_shape.reset();
    EXPECT_NEAR(observed_accuracy(250, cfg, 6000, 2), acc, 0.025) << acc << " fixed boost";
  }
  SynthConfig perfect;
  perfect.top1_accuracy = 1.0;
  EXPECT_EQ(observed_accuracy(250, perfect, 2000, 3), 1.0);
  SynthConfig chance;
  chance.top1_accuracy = 1.0 / 250.0;
  EXPECT_NEAR(observed_accuracy(250, chance, 6000, 4), 1.0 / 250.0, 0.005);
}

TEST(Synth, PositionsAreDistributions) {
  std::mt19937_64 rng(5);
  SynthConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const auto p = synth_position(40, i % 3 == 0 ? std::nullopt : std::optional<std::size_t>(i % 40),
                                  cfg, rng);
    double total = 0.0;
    for (double v : p.probs) {
      EXPECT_GE(v, 0.0);
      total += v;
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
    EXPECT_EQ(*p.oov_truth, i % 3 == 0);
  }
}

TEST(Synth, OovPositionsCanBeMadeFlatter) {
  std::mt19937_64 rng(6);
  SynthConfig cfg;
  cfg.oov_concentration = 20.0;
  double oov_entropy = 0.0, iv_entropy = 0.0;
  for (int i = 0; i < 300; ++i) {
    oov_entropy += extract_oov_features(synth_position(250, std::nullopt, cfg, rng).probs).stat("entropy");
    iv_entropy += extract_oov_features(synth_position(250, 7, cfg, rng).probs).stat("entropy");
  }
  EXPECT_GT(oov_entropy / 300.0, iv_entropy / 300.0 + 0.3);
}

TEST(Synth, GeneratedLatticesAreDeterministic) {
  auto v = std::make_shared<const Vocabulary>(build_vocabulary(split_whitespace("a b c a b a d e"), 3));
  const std::vector<std::string> truth = {"a", "d", "b", "c", "e"};
  SynthConfig cfg;
  std::mt19937_64 r1(11), r2(11), r3(12);
  const auto a = generate_lattice(truth, v, cfg, r1);
  const auto b = generate_lattice(truth, v, cfg, r2);
  const auto c = generate_lattice(truth, v, cfg, r3);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].probs, b[i].probs);
  EXPECT_NE(a[0].probs, c[0].probs);
  EXPECT_EQ(*a.reference(), truth);
  EXPECT_TRUE(*a[1].oov_truth);
  EXPECT_FALSE(*a[0].oov_truth);
  EXPECT_THROW(generate_lattice(std::vector<std::string>{"zzz"}, v, cfg, r1), invalid_input_error);
  cfg.sequence_length = 2;
  EXPECT_THROW(generate_lattice(truth, v, cfg, r1), invalid_input_error);
}

TEST(Synth, ConfigValidation) {
  SynthConfig c;
  c.top1_accuracy = 1.5;
  EXPECT_THROW(c.validate(), invalid_input_error);
  c = {};
  c.concentration = 0.0;
  EXPECT_THROW(c.validate(), invalid_input_error);
  c = {};
  c.oov_rate = -0.1;
  EXPECT_THROW(c.validate(), invalid_input_error);
  c = {};
  c.boost_shape = 0.0;
  EXPECT_THROW(c.validate(), invalid_input_error);
}

TEST(Synth, GroundTruthWindowsAndForcedOovRate) {
  const auto corpus = load_bundled_corpus();
  const auto vocab = build_vocabulary(corpus, 250);
  SynthConfig cfg;
  std::mt19937_64 rng(13);
  const auto plain = sample_ground_truth(corpus, vocab, cfg, rng);
  ASSERT_EQ(plain.size(), 64u);
  const auto it = std::search(corpus.begin(), corpus.end(), plain.begin(), plain.end());
  EXPECT_NE(it, corpus.end());
  cfg.oov_rate = 0.25;
  std::size_t oov = 0, total = 0;
  for (int i = 0; i < 100; ++i)
    for (const auto& w : sample_ground_truth(corpus, vocab, cfg, rng)) {
      ++total;
      if (!vocab.contains(w)) {
        ++oov;
        EXPECT_TRUE(vocab.in_oov_pool(w));
      }
    }
  EXPECT_NEAR(static_cast<double>(oov) / static_cast<double>(total), 0.25, 0.02);
  cfg.sequence_length = corpus.size() + 1;
  EXPECT_THROW(sample_ground_truth(corpus, vocab, cfg, rng), invalid_input_error);
}

TEST(Synth, OverdenseLatticeLayout) {
  auto v = testing::letter_vocab(3);
  std::mt19937_64 rng(14);
  OverdenseConfig dense;
  dense.slots_per_word = 3;
  dense.predictions_per_slot = 2;
  const auto lat = generate_overdense_lattice(std::vector<std::string>{"w0", "w2"}, v, {}, dense, rng);
  ASSERT_EQ(lat.size(), 12u);
  EXPECT_EQ(*lat[0].time, 0.0);
  EXPECT_EQ(*lat[1].time, 0.0);
  EXPECT_DOUBLE_EQ(*lat[11].time, 5 * 0.15);
  dense.predictions_per_slot = 0;
  EXPECT_THROW(generate_overdense_lattice(std::vector<std::string>{"w0"}, v, {}, dense, rng),
               invalid_input_error);
}

TEST(Corpus, BundledTextCoverage) {
  const auto corpus = load_bundled_corpus();
  EXPECT_GT(corpus.size(), 50000u);
  const double c50 = vocabulary_coverage(corpus, build_vocabulary(corpus, 50));
  const double c250 = vocabulary_coverage(corpus, build_vocabulary(corpus, 250));
  const double c1000 = vocabulary_coverage(corpus, build_vocabulary(corpus, 1000));
  EXPECT_NEAR(c50, 0.48, 0.06);
  EXPECT_NEAR(c250, 0.68, 0.06);
  EXPECT_NEAR(c1000, 0.82, 0.06);
  const auto split = split_corpus(corpus, 0.2);
  EXPECT_EQ(split.train.size() + split.heldout.size(), corpus.size());
  EXPECT_NEAR(static_cast<double>(split.heldout.size()) / static_cast<double>(corpus.size()), 0.2, 1e-4);
  EXPECT_THROW(split_corpus(corpus, 1.0), invalid_input_error);
}

TEST(Corpus, SampledFromAnNgramModel) {
  const auto lm = NGramModel::train(split_whitespace("a b c a b d a b c"), 2, 0.1);
  std::mt19937_64 r1(15), r2(15);
  const auto a = generate_synthetic_corpus(lm, 200, r1);
  EXPECT_EQ(a, generate_synthetic_corpus(lm, 200, r2));
  ASSERT_EQ(a.size(), 200u);
  std::size_t ab = 0, a_count = 0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    EXPECT_TRUE(a[i] == "a" || a[i] == "b" || a[i] == "c" || a[i] == "d");
    if (a[i] == "a") {
      ++a_count;
      if (a[i + 1] == "b") ++ab;
    }
  }
  // P(b | a) = 3.1 / 3.4 under the model.
  EXPECT_GT(static_cast<double>(ab) / static_cast<double>(a_count), 0.75);
  EXPECT_THROW(generate_synthetic_corpus(lm, 0, r1), invalid_input_error);
}

TEST(RandomBaseline, DrawsFromTheRightSet) {
  const auto vocab = build_vocabulary(split_whitespace("a b c a b a d e f"), 3);
  std::mt19937_64 rng(16);
  const std::vector<std::string> ref = {"a", "d", "b", "f"};
  for (int t = 0; t < 50; ++t) {
    const auto out = random_selection_baseline(ref, vocab, rng);
    ASSERT_EQ(out.size(), ref.size());
    EXPECT_TRUE(vocab.contains(out[0]));
    EXPECT_TRUE(vocab.in_oov_pool(out[1]));
    EXPECT_TRUE(vocab.in_oov_pool(out[3]));
  }
  const Vocabulary no_pool({"a"});
  EXPECT_THROW(random_selection_baseline(ref, no_pool, rng), invalid_input_error);
}

TEST(RandomBaseline, ScoresChanceLevelWer) {
  const auto corpus = load_bundled_corpus();
  const auto vocab = build_vocabulary(corpus, 250);
  SynthConfig cfg;
  std::mt19937_64 rng(17);
  double total = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto ref = sample_ground_truth(corpus, vocab, cfg, rng);
    total += wer(ref, random_selection_baseline(ref, vocab, rng));
  }
  EXPECT_NEAR(total / 100.0, 1.0, 0.02);
}

}  // namespace
}  // namespace b2t
