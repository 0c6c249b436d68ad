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

#include <atomic>
#include <cmath>
#include <functional>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "b2t/core/text.hpp"
#include "b2t/lm/ngram.hpp"
#include "b2t/lm/remote.hpp"

namespace b2t {
namespace {

std::vector<std::string> words(std::string_view s) { return split_whitespace(s); }

TEST(NGram, HandComputedBigramProbabilities) {
  // Counts: a->b twice, b->a once; unigrams a:2 b:2.
  const auto m = NGramModel::train(words("a b a b"), 2, 0.1);
  const std::vector<std::string> a = {"a"}, b = {"b"}, z = {"z"};
  EXPECT_DOUBLE_EQ(m.probability(a, "b"), 2.1 / 2.2);
  EXPECT_DOUBLE_EQ(m.probability(a, "a"), 0.1 / 2.2);
  EXPECT_DOUBLE_EQ(m.probability(b, "a"), 1.1 / 1.2);
  // Unknown context word backs off to unigrams.
  EXPECT_DOUBLE_EQ(m.probability(z, "a"), 2.1 / 4.2);
  // Unknown next word gets the smoothing floor.
  EXPECT_DOUBLE_EQ(m.probability(a, "zebra"), 0.1 / 2.2);
  EXPECT_GT(m.score_continuation(a, "b"), m.score_continuation(a, "a"));
  const auto top = m.next_word_distribution(a, 1);
  ASSERT_EQ(top.size(), 1u);
  EXPECT_EQ(top[0].word, "b");
  EXPECT_DOUBLE_EQ(top[0].prob, 2.1 / 2.2);
}

TEST(NGram, ContextWithoutContinuationsBacksOff) {
  // "c" only ends the corpus, so it has no bigram continuations.
  const auto m = NGramModel::train(words("a b c"), 2, 1.0);
  const std::vector<std::string> c = {"c"};
  EXPECT_DOUBLE_EQ(m.probability(c, "a"), 2.0 / 6.0);
}

TEST(NGram, TrigramUsesLongestKnownSuffix) {
  const auto m = NGramModel::train(words("x a b x a c x a b"), 3, 0.5);
  // Context (x, a): b twice, c once; vocabulary {x, a, b, c}.
  const std::vector<std::string> xa = {"x", "a"};
  EXPECT_DOUBLE_EQ(m.probability(xa, "b"), 2.5 / 5.0);
  // (q, a) has an unknown word, so only (a) is used: b twice, c once.
  const std::vector<std::string> qa = {"q", "a"};
  EXPECT_DOUBLE_EQ(m.probability(qa, "c"), 1.5 / 5.0);
  // Contexts longer than order - 1 are truncated.
  const std::vector<std::string> long_ctx = {"b", "c", "x", "a"};
  EXPECT_DOUBLE_EQ(m.probability(long_ctx, "b"), m.probability(xa, "b"));
}

TEST(NGram, UnigramIgnoresContext) {
  const auto m = NGramModel::train(words("a b a c a"), 1, 0.5);
  const std::vector<std::string> x = {"b"}, y = {"c"};
  EXPECT_EQ(m.score_continuation(x, "a"), m.score_continuation(y, "a"));
}

class NGramProperties : public ::testing::Test {
 protected:
  void SetUp() override {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> pick(0, 11);
    for (int i = 0; i < 400; ++i) corpus_.push_back("t" + std::to_string(pick(rng) * pick(rng) % 12));
  }
  std::vector<std::string> corpus_;
};

TEST_F(NGramProperties, DistributionsAreNormalizedAndConsistent) {
  for (std::size_t order : {1u, 2u, 3u}) {
    const auto m = NGramModel::train(corpus_, order, 0.3);
    for (const auto& ctx : {words(""), words("t0"), words("t4 t6"), words("nope t2")}) {
      const auto full = m.next_word_distribution(ctx, m.vocab_size() + 5);
      ASSERT_EQ(full.size(), m.vocab_size());
      double total = 0.0;
      for (std::size_t i = 0; i < full.size(); ++i) {
        total += full[i].prob;
        if (i > 0) {
          EXPECT_GE(full[i - 1].prob, full[i].prob);
        }
        EXPECT_NEAR(std::log(full[i].prob), m.score_continuation(ctx, full[i].word), 1e-12);
      }
      EXPECT_NEAR(total, 1.0, 1e-9);
      const double unseen = m.score_continuation(ctx, "never-seen");
      EXPECT_TRUE(std::isfinite(unseen));
      EXPECT_LT(unseen, 0.0);
    }
  }
}

TEST_F(NGramProperties, MoreSmoothingLowersTheTopContinuation) {
  const std::vector<std::string> ctx = {"t0"};
  double prev = 1.0;
  for (double alpha : {0.01, 0.1, 1.0, 10.0}) {
    const auto m = NGramModel::train(corpus_, 2, alpha);
    const double top = m.next_word_distribution(ctx, 1).front().prob;
    EXPECT_LT(top, prev);
    prev = top;
  }
}

TEST_F(NGramProperties, SaveLoadRoundTrip) {
  const auto m = NGramModel::train(corpus_, 3, 0.25);
  std::stringstream ss;
  m.save(ss);
  const auto back = NGramModel::load(ss);
  EXPECT_EQ(back, m);
  EXPECT_EQ(back.order(), 3u);
  EXPECT_EQ(back.smoothing_alpha(), 0.25);
  const std::vector<std::string> ctx = {"t1", "t0"};
  EXPECT_EQ(back.score_continuation(ctx, "t0"), m.score_continuation(ctx, "t0"));
}

// "a" occurs once as a context (followed by "b"), so c(a) = 1.
TEST(NGram, SeenContextUsesItsCount) {
  const auto m = NGramModel::train(words("a b"), 2, 1.0);
  const std::vector<std::string> ctx = {"a"};
  EXPECT_NEAR(m.probability(ctx, "a"), 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(m.probability(ctx, "b"), 2.0 / 3.0, 1e-12);
}

TEST(NGram, RejectsBadInput) {
  EXPECT_THROW(NGramModel::train(words("a"), 2, 0.1), invalid_input_error);
  EXPECT_THROW(NGramModel::train(words("a b"), 0, 0.1), invalid_input_error);
  EXPECT_THROW(NGramModel::train(words("a b"), 1, 0.0), invalid_input_error);
  const auto m = NGramModel::train(words("a b"), 1, 0.1);
  EXPECT_THROW(m.next_word_distribution({}, 0), invalid_input_error);
  std::istringstream junk("not a model");
  EXPECT_THROW(NGramModel::load(junk), parse_error);
}

// A local HTTP server whose handler the test supplies.
class MockServer {
 public:
  using Handler = std::function<void(const nlohmann::json&, httplib::Response&)>;

  explicit MockServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post(R"(/.*)", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      {
        std::lock_guard<std::mutex> lock(mu_);
        last_body_ = req.body;
        last_auth_ = req.get_header_value("Authorization");
      }
      handler_(nlohmann::json::parse(req.body), res);
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockServer() {
    server_.stop();
    thread_.join();
  }

  std::string url(const std::string& path = "/v1/chat") const {
    return "http://127.0.0.1:" + std::to_string(port_) + path;
  }
  int requests() const { return requests_; }
  nlohmann::json last_body() const {
    std::lock_guard<std::mutex> lock(mu_);
    return nlohmann::json::parse(last_body_);
  }
  std::string last_auth() const {
    std::lock_guard<std::mutex> lock(mu_);
    return last_auth_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
  std::atomic<int> requests_{0};
  mutable std::mutex mu_;
  std::string last_body_, last_auth_;
};

void reply_text(httplib::Response& res, const std::string& text) {
  const nlohmann::json j = {{"choices", {{{"message", {{"role", "assistant"}, {"content", text}}}}}}};
  res.set_content(j.dump(), "application/json");
}

RemoteLmConfig config_for(const MockServer& s, int retries = 3) {
  RemoteLmConfig c;
  c.endpoint_url = s.url();
  c.api_key = "k3y";
  c.model_name = "mock-model";
  c.retry_limit = retries;
  c.backoff_base_seconds = 0.0;
  c.timeout_seconds = 10.0;
  return c;
}

TEST(RemoteChat, SendsTheDocumentedBody) {
  MockServer s([](const nlohmann::json&, httplib::Response& res) { reply_text(res, "{0: \"x\"}"); });
  const RemoteLmClient client(config_for(s));
  EXPECT_EQ(client.complete_chat("hello", 512), "{0: \"x\"}");
  const auto body = s.last_body();
  EXPECT_EQ(body["model"], "mock-model");
  EXPECT_EQ(body["messages"][0]["role"], "user");
  EXPECT_EQ(body["messages"][0]["content"], "hello");
  EXPECT_EQ(body["max_tokens"], 8192);
  EXPECT_EQ(body["thinking_budget"], 512);
  EXPECT_EQ(s.last_auth(), "Bearer k3y");
  client.complete_chat("again");
  EXPECT_FALSE(s.last_body().contains("thinking_budget"));
}

TEST(RemoteChat, AcceptsContentBlockReplies) {
  MockServer s([](const nlohmann::json&, httplib::Response& res) {
    const nlohmann::json j = {
        {"content", {{{"type", "thinking"}, {"thinking", "hmm"}}, {{"type", "text"}, {"text", "ok"}}}}};
    res.set_content(j.dump(), "application/json");
  });
  EXPECT_EQ(RemoteLmClient(config_for(s)).complete_chat("p"), "ok");
}

TEST(RemoteChat, RetriesServerErrorsThenSucceeds) {
  std::atomic<int> calls{0};
  MockServer s([&](const nlohmann::json&, httplib::Response& res) {
    if (++calls < 3) {
      res.status = calls == 1 ? 503 : 429;
      return;
    }
    reply_text(res, "done");
  });
  EXPECT_EQ(RemoteLmClient(config_for(s, 3)).complete_chat("p"), "done");
  EXPECT_EQ(s.requests(), 3);
}

TEST(RemoteChat, MalformedRepliesAreRetried) {
  std::atomic<int> calls{0};
  MockServer s([&](const nlohmann::json&, httplib::Response& res) {
    if (++calls == 1) {
      res.set_content("{\"choices\": []}", "application/json");
      return;
    }
    reply_text(res, "fine");
  });
  EXPECT_EQ(RemoteLmClient(config_for(s, 1)).complete_chat("p"), "fine");
}

TEST(RemoteChat, ExhaustedRetriesRaiseServiceError) {
  MockServer s([](const nlohmann::json&, httplib::Response& res) { res.status = 500; });
  try {
    RemoteLmClient(config_for(s, 2)).complete_chat("p");
    FAIL() << "expected service_error";
  } catch (const service_error& e) {
    EXPECT_EQ(e.status(), 500);
    EXPECT_EQ(e.attempts(), 3);
  }
  EXPECT_EQ(s.requests(), 3);
}

TEST(RemoteChat, ClientErrorsAreNotRetried) {
  MockServer s([](const nlohmann::json&, httplib::Response& res) { res.status = 401; });
  try {
    RemoteLmClient(config_for(s, 5)).complete_chat("p");
    FAIL() << "expected service_error";
  } catch (const service_error& e) {
    EXPECT_EQ(e.status(), 401);
    EXPECT_EQ(e.attempts(), 1);
  }
  EXPECT_EQ(s.requests(), 1);
}

TEST(RemoteChat, TransportFailureIsServiceError) {
  RemoteLmConfig c;
  c.endpoint_url = "http://127.0.0.1:1/v1/chat";
  c.retry_limit = 1;
  c.backoff_base_seconds = 0.0;
  c.timeout_seconds = 2.0;
  try {
    RemoteLmClient(c).complete_chat("p");
    FAIL() << "expected service_error";
  } catch (const service_error& e) {
    EXPECT_EQ(e.status(), -1);
    EXPECT_EQ(e.attempts(), 2);
  }
}

TEST(RemoteChat, InflightBoundHolds) {
  std::atomic<int> inflight{0}, peak{0};
  MockServer s([&](const nlohmann::json&, httplib::Response& res) {
    const int now = ++inflight;
    int p = peak.load();
    while (now > p && !peak.compare_exchange_weak(p, now)) {
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(40));
    --inflight;
    reply_text(res, "x");
  });
  auto cfg = config_for(s);
  cfg.max_concurrent_requests = 2;
  const RemoteLmClient client(cfg);
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i)
    threads.emplace_back([copy = client] { copy.complete_chat("p"); });
  for (auto& t : threads) t.join();
  EXPECT_EQ(s.requests(), 8);
  EXPECT_LE(peak.load(), 2);
  EXPECT_GE(peak.load(), 1);
}

TEST(RemoteChat, ConfigValidationAndEnv) {
  EXPECT_THROW(RemoteLmClient(RemoteLmConfig{}), invalid_input_error);
  RemoteLmConfig bad;
  bad.endpoint_url = "no-scheme";
  EXPECT_THROW(RemoteLmClient(bad).complete_chat("p"), invalid_input_error);
  setenv("B2T_LLM_ENDPOINT", "http://env.example/v1", 1);
  setenv("B2T_LLM_MODEL", "env-model", 1);
  unsetenv("B2T_LLM_API_KEY");
  RemoteLmConfig base;
  base.api_key = "keep";
  const auto c = remote_config_from_env(base);
  EXPECT_EQ(c.endpoint_url, "http://env.example/v1");
  EXPECT_EQ(c.model_name, "env-model");
  EXPECT_EQ(c.api_key, "keep");
  unsetenv("B2T_LLM_ENDPOINT");
  unsetenv("B2T_LLM_MODEL");
}

// Completions endpoint with a fixed next-token table; echo requests get
// one token per space-separated piece, each with logprob -0.25.
void completions(const nlohmann::json& body, httplib::Response& res) {
  const std::string prompt = body["prompt"];
  nlohmann::json logprobs;
  if (body.value("echo", false)) {
    std::vector<std::size_t> offsets;
    nlohmann::json values = nlohmann::json::array();
    for (std::size_t i = 0; i < prompt.size(); ++i) {
      if (i == 0 || prompt[i] == ' ') {
        offsets.push_back(i);
        values.push_back(i == 0 ? nlohmann::json(nullptr) : nlohmann::json(-0.25));
      }
    }
    logprobs = {{"text_offset", offsets}, {"token_logprobs", values}};
  } else {
    static const std::map<std::string, nlohmann::json> table = {
        {"\nthe", {{" cat", std::log(0.6)}, {" ca", std::log(0.3)}, {".", std::log(0.1)}}},
        {"\nthe cat", {{" sat", std::log(0.9)}, {"s", std::log(0.1)}}},
        {"\nthe ca", {{"r", 0.0}}},
    };
    auto it = table.find(prompt);
    const nlohmann::json top = it != table.end() ? it->second : nlohmann::json{{" is", 0.0}};
    logprobs = {{"top_logprobs", nlohmann::json::array({top})}};
  }
  const nlohmann::json j = {{"choices", {{{"text", ""}, {"logprobs", logprobs}}}}};
  res.set_content(j.dump(), "application/json");
}

TEST(RemoteTokenScorer, AssemblesWordsFromTokens) {
  MockServer s(completions);
  const RemoteTokenScorer scorer(RemoteLmClient(config_for(s)));
  const std::vector<std::string> ctx = {"the"};
  const auto dist = scorer.next_word_distribution(ctx, 5);
  // cat: 0.6 * 0.9 boundary; car: 0.3 * 1; cats: 0.6 * 0.1 * 1.
  ASSERT_EQ(dist.size(), 3u);
  EXPECT_EQ(dist[0].word, "cat");
  EXPECT_NEAR(dist[0].prob, 0.54, 1e-12);
  EXPECT_EQ(dist[1].word, "car");
  EXPECT_NEAR(dist[1].prob, 0.3, 1e-12);
  EXPECT_EQ(dist[2].word, "cats");
  EXPECT_NEAR(dist[2].prob, 0.06, 1e-12);
  EXPECT_EQ(scorer.next_word_distribution(ctx, 1).size(), 1u);
}

TEST(RemoteTokenScorer, ShortcutTakesSingleTokens) {
  MockServer s(completions);
  TokenScorerOptions opts;
  opts.single_token_shortcut = true;
  const RemoteTokenScorer shortcut(RemoteLmClient(config_for(s)), opts);
  opts.token_beam_width = 1;
  const RemoteTokenScorer narrow(RemoteLmClient(config_for(s)), opts);
  const std::vector<std::string> ctx = {"the"};
  const auto d = shortcut.next_word_distribution(ctx, 5);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_EQ(d[0].word, "cat");
  EXPECT_NEAR(d[0].prob, 0.6, 1e-12);
  EXPECT_EQ(d[1].word, "ca");
  EXPECT_EQ(narrow.next_word_distribution(ctx, 5), d);
}

TEST(RemoteTokenScorer, ScoresOnlyTheWordTokens) {
  MockServer s(completions);
  const RemoteTokenScorer scorer(RemoteLmClient(config_for(s)));
  const std::vector<std::string> ctx = {"the", "big"};
  EXPECT_DOUBLE_EQ(scorer.score_continuation(ctx, "cat"), -0.25);
  const auto body = s.last_body();
  EXPECT_EQ(body["prompt"], "\nthe big cat");
  EXPECT_EQ(body["echo"], true);
}

}  // namespace
}  // namespace b2t
