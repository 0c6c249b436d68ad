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

// HTTP client for hosted language models.
//
// Chat requests are POSTed as
//   {"model": ..., "messages": [{"role": "user", "content": ...}],
//    "max_tokens": ..., "thinking_budget": ...}
// and the reply is the first text block of the first choice
// (`choices[0].message.content`, either a string or a list of
// {"type": "text", "text": ...} blocks).
//
// Token log-probabilities come from an OpenAI-style completions endpoint
// (`prompt`, `max_tokens`, `logprobs`, `echo`), which most self-hosted
// inference servers expose.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdlib>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"
#include "b2t/lm/scorer.hpp"

namespace b2t {

struct RemoteLmConfig {
  std::string endpoint_url;
  std::string api_key;
  std::string model_name;
  int max_concurrent_requests = 4;
  int retry_limit = 3;
  double timeout_seconds = 120.0;
  /// First retry waits this long; each further retry doubles it.
  double backoff_base_seconds = 1.0;
  double backoff_max_seconds = 30.0;
  int max_tokens = 8192;

  void validate() const {
    if (endpoint_url.empty())
      throw invalid_input_error("remote LM endpoint_url is empty");
    if (max_concurrent_requests < 1)
      throw invalid_input_error("max_concurrent_requests must be >= 1");
    if (retry_limit < 0) throw invalid_input_error("retry_limit must be >= 0");
    if (!(timeout_seconds > 0.0))
      throw invalid_input_error("timeout_seconds must be positive");
    if (backoff_base_seconds < 0.0)
      throw invalid_input_error("backoff_base_seconds must be >= 0");
  }
};

/// Reads B2T_LLM_ENDPOINT, B2T_LLM_API_KEY and B2T_LLM_MODEL over `base`.
inline RemoteLmConfig remote_config_from_env(RemoteLmConfig base = {}) {
  if (const char* v = std::getenv("B2T_LLM_ENDPOINT")) base.endpoint_url = v;
  if (const char* v = std::getenv("B2T_LLM_API_KEY")) base.api_key = v;
  if (const char* v = std::getenv("B2T_LLM_MODEL")) base.model_name = v;
  return base;
}

namespace remote_detail {

struct Url {
  std::string origin;  // scheme://host[:port]
  std::string path;
};

inline Url split_url(const std::string& url) {
  const auto scheme = url.find("://");
  if (scheme == std::string::npos)
    throw invalid_input_error("endpoint url needs a scheme: " + url);
  const auto slash = url.find('/', scheme + 3);
  if (slash == std::string::npos) return {url, "/"};
  return {url.substr(0, slash), url.substr(slash)};
}

/// Blocks while `limit` requests are already running.
class InflightLimiter {
 public:
  explicit InflightLimiter(int limit) : limit_(limit) {}

  void acquire() {
    std::unique_lock lock(mu_);
    cv_.wait(lock, [&] { return running_ < limit_; });
    ++running_;
  }
  void release() {
    {
      std::lock_guard lock(mu_);
      --running_;
    }
    cv_.notify_one();
  }

 private:
  std::mutex mu_;
  std::condition_variable cv_;
  int limit_;
  int running_ = 0;
};

inline bool retryable_status(int status) {
  return status == 408 || status == 429 || status >= 500;
}

}  // namespace remote_detail

/// Thread-safe client; copies share the in-flight bound.
class RemoteLmClient {
 public:
  explicit RemoteLmClient(RemoteLmConfig config)
      : config_(std::move(config)),
        limiter_(std::make_shared<remote_detail::InflightLimiter>(
            std::max(1, config_.max_concurrent_requests))) {
    config_.validate();
  }

  const RemoteLmConfig& config() const noexcept { return config_; }

  /// POSTs `body` to the endpoint and returns the parsed JSON reply.
  /// `extract` turns the reply into the value of interest and throws
  /// parse_error when the reply is malformed; malformed replies are retried
  /// like server errors.
  template <typename Extract>
  auto post(const nlohmann::json& body, Extract&& extract) const
      -> decltype(extract(std::declval<const nlohmann::json&>())) {
    const auto url = remote_detail::split_url(config_.endpoint_url);
    const std::string payload = body.dump();
    httplib::Headers headers;
    if (!config_.api_key.empty())
      headers.emplace("Authorization", "Bearer " + config_.api_key);

    int last_status = -1;
    std::string last_error;
    const int attempts_allowed = config_.retry_limit + 1;
    for (int attempt = 1; attempt <= attempts_allowed; ++attempt) {
      bool retry = true;
      {
        limiter_->acquire();
        struct Release {
          remote_detail::InflightLimiter* l;
          ~Release() { l->release(); }
        } release{limiter_.get()};

        httplib::Client client(url.origin);
        const auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
        client.set_connection_timeout(
            std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_read_timeout(
            std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        client.set_write_timeout(
            std::chrono::duration_cast<std::chrono::microseconds>(timeout));
        auto res = client.Post(url.path, headers, payload, "application/json");
        if (!res) {
          last_status = -1;
          last_error = "transport failure: " + httplib::to_string(res.error());
        } else if (res->status < 200 || res->status >= 300) {
          last_status = res->status;
          last_error = "remote LM returned HTTP " + std::to_string(res->status);
          retry = remote_detail::retryable_status(res->status);
        } else {
          last_status = res->status;
          try {
            return extract(nlohmann::json::parse(res->body));
          } catch (const nlohmann::json::exception& e) {
            last_error = std::string("malformed response: ") + e.what();
          } catch (const parse_error& e) {
            last_error = std::string("malformed response: ") + e.what();
          }
        }
      }
      if (!retry || attempt == attempts_allowed)
        throw service_error(last_error, last_status, attempt);
      const double delay =
          std::min(config_.backoff_max_seconds,
                   config_.backoff_base_seconds * std::ldexp(1.0, attempt - 1));
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    throw service_error(last_error, last_status, attempts_allowed);
  }

  /// One user turn in, the model's text out, verbatim.
  std::string complete_chat(const std::string& prompt,
                            std::optional<int> thinking_budget = std::nullopt) const {
    nlohmann::json body = {
        {"model", config_.model_name},
        {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
        {"max_tokens", config_.max_tokens}};
    if (thinking_budget) body["thinking_budget"] = *thinking_budget;
    return post(body, &RemoteLmClient::first_text_block);
  }

  static std::string first_text_block(const nlohmann::json& reply) {
    const nlohmann::json* content = nullptr;
    if (reply.contains("choices") && reply["choices"].is_array() &&
        !reply["choices"].empty()) {
      const auto& choice = reply["choices"][0];
      if (choice.contains("message") && choice["message"].contains("content"))
        content = &choice["message"]["content"];
      else if (choice.contains("text"))
        content = &choice["text"];
    } else if (reply.contains("content")) {
      content = &reply["content"];
    }
    if (content == nullptr) throw parse_error("reply has no content");
    if (content->is_string()) return content->get<std::string>();
    if (content->is_array()) {
      for (const auto& block : *content) {
        if (block.is_object() && block.value("type", "") == "text" &&
            block.contains("text") && block["text"].is_string())
          return block["text"].get<std::string>();
      }
    }
    throw parse_error("reply has no text block");
  }

 private:
  RemoteLmConfig config_;
  std::shared_ptr<remote_detail::InflightLimiter> limiter_;
};

/// Free-function form for one-off calls.
inline std::string complete_chat(const RemoteLmConfig& config,
                                 const std::string& prompt,
                                 std::optional<int> thinking_budget = std::nullopt) {
  return RemoteLmClient(config).complete_chat(prompt, thinking_budget);
}

struct TokenScorerOptions {
  /// Prepended to every prompt so that no scored token is the first one.
  std::string prompt_prefix = "\n";
  /// Number of alternatives requested per token position.
  int top_logprobs = 20;
  /// Partial-word hypotheses kept by the token-level search.
  std::size_t token_beam_width = 5;
  /// Longest word, in tokens, the search will assemble.
  std::size_t max_tokens_per_word = 4;
  /// Take the next single token as the next word and skip the search.
  bool single_token_shortcut = false;
};

/// Word-level scorer over a token-level completions endpoint.
///
/// Word probabilities for generation come from a beam search over tokens in
/// which a hypothesis is finished once the model puts mass on a token that
/// starts a new word; its probability is the product of its token
/// probabilities and that boundary mass.
class RemoteTokenScorer final : public LmScorer {
 public:
  RemoteTokenScorer(RemoteLmClient client, TokenScorerOptions options = {})
      : client_(std::move(client)), options_(std::move(options)) {}

  double score_continuation(std::span<const std::string> context,
                            std::string_view word) const override {
    const std::string head = options_.prompt_prefix + join_words(context);
    const std::string prompt = head + " " + std::string(word);
    nlohmann::json body = {{"model", client_.config().model_name},
                           {"prompt", prompt},
                           {"max_tokens", 1},
                           {"logprobs", 1},
                           {"echo", true},
                           {"temperature", 0}};
    const std::size_t start = head.size();
    const std::size_t end = prompt.size();
    return client_.post(body, [&](const nlohmann::json& reply) {
      const auto& lp = logprobs_of(reply);
      const auto& offsets = lp.at("text_offset");
      const auto& values = lp.at("token_logprobs");
      double total = 0.0;
      bool any = false;
      for (std::size_t i = 0; i < offsets.size() && i < values.size(); ++i) {
        const auto off = offsets[i].get<std::size_t>();
        if (off < start || off >= end) continue;
        if (values[i].is_null()) throw parse_error("word token has no logprob");
        total += values[i].get<double>();
        any = true;
      }
      if (!any) throw parse_error("reply holds no tokens for the word");
      return std::min(0.0, total);
    });
  }

  std::vector<WordProb> next_word_distribution(
      std::span<const std::string> context, std::size_t top_k) const override {
    if (top_k == 0) throw invalid_input_error("top_k must be >= 1");
    const std::string head = options_.prompt_prefix + join_words(context);
    std::map<std::string, double> words;

    if (options_.single_token_shortcut) {
      for (const auto& [token, lp] : next_tokens(head)) {
        if (!starts_word(token, context.empty())) continue;
        auto w = normalize_word(token);
        if (!w.empty()) words[w] += std::exp(lp);
      }
      return ranked(words, top_k);
    }

    struct Partial {
      std::string text;
      double logprob;
    };
    std::vector<Partial> beam;
    for (const auto& [token, lp] : next_tokens(head))
      if (starts_word(token, context.empty())) beam.push_back({token, lp});
    for (std::size_t step = 0; step < options_.max_tokens_per_word && !beam.empty();
         ++step) {
      prune(beam);
      std::vector<Partial> grown;
      for (const auto& hyp : beam) {
        const std::string prefix = head + hyp.text;
        double boundary = 0.0;
        for (const auto& [token, lp] : next_tokens(prefix)) {
          if (continues_word(token))
            grown.push_back({hyp.text + token, hyp.logprob + lp});
          else
            boundary += std::exp(lp);
        }
        if (boundary > 0.0) {
          auto w = normalize_word(hyp.text);
          if (!w.empty()) words[w] += std::exp(hyp.logprob) * boundary;
        }
      }
      beam = std::move(grown);
    }
    return ranked(words, top_k);
  }

 private:
  static const nlohmann::json& logprobs_of(const nlohmann::json& reply) {
    if (!reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty() || !reply["choices"][0].contains("logprobs"))
      throw parse_error("reply has no logprobs");
    return reply["choices"][0]["logprobs"];
  }

  /// Top alternatives for the token following `prompt`.
  std::vector<std::pair<std::string, double>> next_tokens(
      const std::string& prompt) const {
    nlohmann::json body = {{"model", client_.config().model_name},
                           {"prompt", prompt},
                           {"max_tokens", 1},
                           {"logprobs", options_.top_logprobs},
                           {"temperature", 0}};
    return client_.post(body, [](const nlohmann::json& reply) {
      const auto& top = logprobs_of(reply).at("top_logprobs");
      if (!top.is_array() || top.empty() || !top[0].is_object())
        throw parse_error("reply has no top_logprobs");
      std::vector<std::pair<std::string, double>> out;
      for (const auto& [token, lp] : top[0].items())
        out.emplace_back(token, lp.get<double>());
      std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return a.second != b.second ? a.second > b.second : a.first < b.first;
      });
      return out;
    });
  }

  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '\'' ||
           static_cast<unsigned char>(c) >= 0x80;
  }
  static bool starts_word(const std::string& token, bool at_start) {
    if (token.size() >= 2 && token[0] == ' ' && word_char(token[1])) return true;
    return at_start && !token.empty() && word_char(token[0]);
  }
  static bool continues_word(const std::string& token) {
    return !token.empty() && word_char(token[0]);
  }

  template <typename T>
  void prune(std::vector<T>& beam) const {
    std::stable_sort(beam.begin(), beam.end(), [](const T& a, const T& b) {
      return a.logprob > b.logprob;
    });
    if (beam.size() > options_.token_beam_width)
      beam.resize(options_.token_beam_width);
  }

  static std::vector<WordProb> ranked(const std::map<std::string, double>& words,
                                      std::size_t top_k) {
    std::vector<WordProb> out;
    for (const auto& [w, p] : words) out.push_back({w, std::min(1.0, p)});
    std::stable_sort(out.begin(), out.end(), [](const WordProb& a, const WordProb& b) {
      return a.prob > b.prob;
    });
    if (out.size() > top_k) out.resize(top_k);
    return out;
  }

  RemoteLmClient client_;
  TokenScorerOptions options_;
};

}  // namespace b2t
