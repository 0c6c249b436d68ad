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

// b2t command-line tool.
//
// Exit codes: 0 success, 1 usage error, 2 data or parse error, 3 remote
// service failure.

#include <atomic>
#include <exception>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "b2t/b2t.hpp"

namespace {

using namespace b2t;

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitRemote = 3;

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input_error("cannot open " + path);
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input_error("cannot write " + path);
  return out;
}

std::vector<Lattice> read_lattices(const std::string& path, double cosine_temperature) {
  auto in = open_in(path);
  LatticeReadOptions opts;
  opts.cosine_temperature = cosine_temperature;
  return load_lattices(in, opts);
}

std::vector<std::string> corpus_words(const std::string& path) {
  return generate_synthetic_corpus(read_text_file(path.empty() ? bundled_corpus_path() : path));
}

/// Runs fn(i) for i in [0, n) on up to `jobs` threads; results keep input
/// order and the first failure by index is rethrown.
template <typename T, typename Fn>
std::vector<T> parallel_map(std::size_t n, std::size_t jobs, Fn fn) {
  std::vector<std::optional<T>> results(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        results[i] = fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::max<std::size_t>(1, std::min(jobs, n));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<T> out;
  out.reserve(n);
  for (auto& r : results) out.push_back(std::move(*r));
  return out;
}

/// Writes the resolved options of one subcommand next to an output file,
/// secrets removed. The result is loadable with --config.
void echo_config(const CLI::App& app, const std::string& prefix, const std::string& out_path) {
  if (out_path.empty()) return;
  std::istringstream all(app.config_to_str(true, false));
  auto out = open_out(out_path + ".run.ini");
  for (std::string line; std::getline(all, line);) {
    if (line.rfind(prefix + ".", 0) != 0) continue;
    if (line.find("api-key") != std::string::npos) continue;
    if (line.size() >= 3 && line.compare(line.size() - 3, 3, "=\"\"") == 0) continue;
    out << line << '\n';
  }
}

// ---------------------------------------------------------------- vocab

struct VocabArgs {
  std::string corpus;
  std::size_t size = 250;
  std::string out;
};

int run_vocab(const VocabArgs& a) {
  const auto words = corpus_words(a.corpus);
  const auto vocab = build_vocabulary(words, a.size);
  auto out = open_out(a.out);
  save_vocabulary(vocab, out);
  std::printf("vocabulary %zu words, oov pool %zu words, coverage %.4f\n", vocab.size(),
              vocab.oov_pool().size(), vocabulary_coverage(words, vocab));
  return 0;
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
  std::string corpus;
  std::string vocab;
  std::size_t vocab_size = 250;
  std::size_t count = 100;
  std::size_t length = 64;
  double top1 = 0.3;
  double concentration = 1.0;
  double oov_concentration = 0.0;
  double oov_rate = -1.0;
  double boost_shape = 1.0;
  double heldout = 0.2;
  bool overdense = false;
  double spacing = 0.3;
  std::size_t slots_per_word = 6;
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& a) {
  const auto words = corpus_words(a.corpus);
  std::shared_ptr<const Vocabulary> vocab;
  if (!a.vocab.empty()) {
    auto in = open_in(a.vocab);
    vocab = std::make_shared<const Vocabulary>(load_vocabulary(in));
  } else {
    vocab = std::make_shared<const Vocabulary>(build_vocabulary(words, a.vocab_size));
  }
  const auto split = split_corpus(words, a.heldout);
  SynthConfig cfg;
  cfg.sequence_length = a.length;
  cfg.top1_accuracy = a.top1;
  cfg.concentration = a.concentration;
  if (a.oov_concentration > 0.0) cfg.oov_concentration = a.oov_concentration;
  if (a.oov_rate >= 0.0) cfg.oov_rate = a.oov_rate;
  cfg.boost_shape = a.boost_shape > 0.0 ? std::optional<double>(a.boost_shape) : std::nullopt;
  cfg.seed = a.seed;
  cfg.validate();

  std::mt19937_64 rng(a.seed);
  std::vector<Lattice> lattices;
  for (std::size_t i = 0; i < a.count; ++i) {
    const auto truth = sample_ground_truth(split.heldout, *vocab, cfg, rng);
    if (a.overdense) {
      OverdenseConfig dense;
      dense.spacing_seconds = a.spacing;
      dense.slots_per_word = a.slots_per_word;
      lattices.push_back(generate_overdense_lattice(truth, vocab, cfg, dense, rng));
    } else {
      lattices.push_back(generate_lattice(truth, vocab, cfg, rng));
    }
  }
  auto out = open_out(a.out);
  save_lattices(lattices, out);
  std::printf("wrote %zu lattices\n", lattices.size());
  return 0;
}

// ---------------------------------------------------------------- lm-train

struct LmArgs {
  std::string corpus;
  std::size_t order = 2;
  double alpha = 0.1;
  double heldout = 0.2;
  std::string out;
};

int run_lm_train(const LmArgs& a) {
  const auto words = corpus_words(a.corpus);
  const auto train = a.heldout > 0.0 ? split_corpus(words, a.heldout).train : words;
  const auto model = NGramModel::train(train, a.order, a.alpha);
  auto out = open_out(a.out);
  model.save(out);
  std::printf("trained order-%zu model on %zu words (%zu types)\n", model.order(), train.size(),
              model.vocab_size());
  return 0;
}

// ---------------------------------------------------------------- decode

struct DecodeArgs {
  std::string lattices;
  std::string method = "greedy";
  std::string lm;
  std::string filler_lm;
  std::string scorer = "ngram";
  std::string scorer_endpoint;
  std::size_t beam_width = 5;
  double lambda = 1.5;
  std::size_t context_limit = 8;
  std::size_t candidates = 5;
  std::string rescorer_mode = "incremental";
  std::string oov_source = "none";
  double threshold = 0.5;
  std::string unk_fill = "unk";
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
  bool dry_run = false;
  double cosine_temperature = 1.0;
  std::string endpoint;
  std::string api_key;
  std::string model;
  int max_concurrent = 4;
  int retry_limit = 3;
  double timeout = 120.0;
  int thinking_budget = 0;
  std::size_t parse_retries = 2;
  std::string out;
};

DecoderConfig decoder_config(const DecodeArgs& a) {
  DecoderConfig c;
  c.beam_width = a.beam_width;
  c.lambda = a.lambda;
  c.context_limit = a.context_limit;
  c.candidates_per_step = a.candidates;
  c.seed = a.seed;
  c.rescorer_mode =
      a.rescorer_mode == "whole_prefix" ? RescorerMode::whole_prefix : RescorerMode::incremental;
  if (a.oov_source == "truth")
    c.oov_source = OovSource::ground_truth();
  else if (a.oov_source == "detector")
    c.oov_source = OovSource::detector(a.threshold);
  if (a.unk_fill == "unk")
    c.fill_mode = FillMode::unk_sentinel;
  else if (a.unk_fill == "random")
    c.fill_mode = FillMode::random;
  c.validate();
  return c;
}

RemoteLmConfig chat_config(const DecodeArgs& a) {
  RemoteLmConfig r;
  r.endpoint_url = a.endpoint;
  r.api_key = a.api_key;
  r.model_name = a.model;
  r.max_concurrent_requests = a.max_concurrent;
  r.retry_limit = a.retry_limit;
  r.timeout_seconds = a.timeout;
  return r;
}

std::shared_ptr<const LmScorer> load_scorer(const DecodeArgs& a, const std::string& path) {
  if (a.scorer == "remote") {
    RemoteLmConfig r = chat_config(a);
    if (!a.scorer_endpoint.empty()) r.endpoint_url = a.scorer_endpoint;
    return std::make_shared<RemoteTokenScorer>(RemoteLmClient(r));
  }
  if (path.empty()) throw invalid_input_error("method '" + a.method + "' needs --lm");
  auto in = open_in(path);
  return std::make_shared<NGramModel>(NGramModel::load(in));
}

bool needs_scorer(const std::string& method) {
  return method != "greedy" && method != "ctc-greedy" && method != "ic-transcribe";
}

int run_decode(const DecodeArgs& a) {
  const auto lattices = read_lattices(a.lattices, a.cosine_temperature);
  const auto cfg = decoder_config(a);
  std::shared_ptr<const LmScorer> scorer, filler;
  if (needs_scorer(a.method)) {
    scorer = load_scorer(a, a.lm);
    filler = a.filler_lm.empty() ? scorer : load_scorer(a, a.filler_lm);
  }

  if (a.dry_run) {
    if (a.method != "ic-fill" && a.method != "ic-transcribe")
      throw invalid_input_error("--dry-run applies to ic-fill and ic-transcribe");
    const auto prompts = parallel_map<std::string>(lattices.size(), a.jobs, [&](std::size_t i) {
      const auto& lat = lattices[i];
      if (a.method == "ic-transcribe") return build_ic_transcribe_prompt(lat, cfg);
      DecoderConfig beam_cfg = cfg;
      beam_cfg.fill_mode = FillMode::unk_sentinel;
      const auto best = decode_beam(lat, *scorer, beam_cfg);
      return build_ic_fill_prompt(best, best.size());
    });
    auto out = open_out(a.out);
    for (std::size_t i = 0; i < prompts.size(); ++i) {
      if (i > 0) out << "\f\n";
      out << prompts[i];
    }
    return 0;
  }

  std::optional<RemoteLmClient> chat_client;
  ChatFn chat;
  if (a.method == "ic-fill" || a.method == "ic-transcribe") {
    chat_client.emplace(chat_config(a));
    const std::optional<int> budget =
        a.thinking_budget > 0 ? std::optional<int>(a.thinking_budget) : std::nullopt;
    chat = [&client = *chat_client, budget](const std::string& prompt) {
      return client.complete_chat(prompt, budget);
    };
  }

  const auto lines = parallel_map<std::string>(lattices.size(), a.jobs, [&](std::size_t i) {
    const auto& lat = lattices[i];
    std::vector<std::string> words;
    if (a.method == "greedy")
      words = decode_greedy(lat, cfg);
    else if (a.method == "beam")
      words = decode_beam(lat, *scorer, cfg);
    else if (a.method == "beam-fill")
      words = decode_beam_fill(lat, *scorer, *filler, cfg);
    else if (a.method == "ic-fill")
      words = decode_ic_fill(lat, *scorer, chat, cfg, a.parse_retries);
    else if (a.method == "ic-transcribe")
      words = decode_ic_transcribe(lat, chat, cfg, a.parse_retries);
    else if (a.method == "ctc-greedy")
      words = ctc_merge_decode(lat, nullptr, cfg);
    else if (a.method == "ctc-beam")
      words = ctc_merge_decode(lat, scorer.get(), cfg);
    return join_words(words);
  });
  auto out = open_out(a.out);
  for (const auto& l : lines) out << l << '\n';
  return 0;
}

// ---------------------------------------------------------------- oov

struct OovArgs {
  std::string lattices;
  std::string classifier = "gbdt";
  std::string detector;
  double threshold = 0.5;
  BoostedTreesParams trees;
  LogisticParams logistic;
  std::uint64_t seed = 0;
  std::string out;
};

int run_oov_train(const OovArgs& a) {
  const auto lattices = read_lattices(a.lattices, 1.0);
  std::vector<OovFeatureVector> features;
  std::vector<bool> labels;
  for (const auto& lat : lattices) collect_training_positions(lat, features, labels);
  DetectorOptions opts;
  opts.kind = classifier_kind_from_string(a.classifier);
  opts.trees = a.trees;
  opts.trees.seed = a.seed;
  opts.logistic = a.logistic;
  opts.threshold = a.threshold;
  const auto det = train_oov_detector(features, labels, opts);
  std::vector<double> scores;
  for (const auto& f : features) scores.push_back(det.predict(f));
  auto out = open_out(a.out);
  det.save(out);
  std::printf("trained %s detector on %zu positions, training AUROC %.4f\n",
              det.model().kind().c_str(), features.size(), auroc(scores, labels));
  return 0;
}

int run_oov_detect(const OovArgs& a) {
  auto din = open_in(a.detector);
  auto det = OovDetector::load(din);
  det = det.with_threshold(a.threshold);
  const auto lattices = read_lattices(a.lattices, 1.0);
  std::vector<Lattice> flagged;
  std::vector<double> scores;
  std::vector<bool> labels;
  std::size_t n_flagged = 0;
  for (const auto& lat : lattices) {
    auto r = flag_positions(det, lat);
    for (std::size_t i = 0; i < lat.size(); ++i) {
      n_flagged += r.flags[i] ? 1 : 0;
      if (lat[i].oov_truth) {
        scores.push_back(*r.lattice[i].oov_detected);
        labels.push_back(*lat[i].oov_truth);
      }
    }
    flagged.push_back(std::move(r.lattice));
  }
  auto out = open_out(a.out);
  save_lattices(flagged, out);
  std::printf("flagged %zu positions", n_flagged);
  bool pos = false, neg = false;
  for (bool l : labels) (l ? pos : neg) = true;
  if (pos && neg) std::printf(", AUROC %.4f", auroc(scores, labels));
  std::printf("\n");
  return 0;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  std::string transcripts;
  std::string references;
  std::string lattices;
  std::string vocab;
  std::string unk_mode = "insert";
  std::string label;
  std::uint64_t seed = 0;
  std::string out;
};

std::vector<std::vector<std::string>> read_lines_as_words(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::vector<std::string>> out;
  for (std::string line; std::getline(in, line);) out.push_back(split_whitespace(line));
  return out;
}

int run_eval(const EvalArgs& a) {
  const auto hyps = read_lines_as_words(a.transcripts);
  std::vector<std::vector<std::string>> refs;
  std::vector<std::string> pool;
  if (!a.references.empty()) {
    refs = read_lines_as_words(a.references);
  } else if (!a.lattices.empty()) {
    for (const auto& lat : read_lattices(a.lattices, 1.0)) {
      if (!lat.reference()) throw invalid_input_error("lattice without reference text");
      refs.push_back(*lat.reference());
      if (pool.empty()) pool = lat.vocab().oov_pool();
    }
  } else {
    throw invalid_input_error("eval needs --references or --lattices");
  }
  if (!a.vocab.empty()) {
    auto in = open_in(a.vocab);
    pool = load_vocabulary(in).oov_pool();
  }
  if (refs.size() != hyps.size())
    throw invalid_input_error(std::to_string(hyps.size()) + " transcripts but " +
                              std::to_string(refs.size()) + " references");
  const auto mode = unk_mode_from_string(a.unk_mode);
  std::mt19937_64 rng(a.seed);
  const HashTrigramEmbedder embedder;
  EvalReport report;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const auto hyp = apply_unk_protocol(hyps[i], unk_positions(hyps[i]), mode, &rng, pool);
    report.add(refs[i], hyp, embedder);
  }
  if (!a.out.empty()) {
    auto lines = open_out(a.out + ".report.tsv");
    report.write_lines(lines);
    auto summary = open_out(a.out + ".summary.json");
    summary << report.summary_json().dump(2) << '\n';
  }
  report.write_table(std::cout, a.label.empty() ? a.unk_mode : a.label);
  return 0;
}

// ---------------------------------------------------------------- pool

struct PoolArgs {
  std::string table;
  std::string target;
  std::size_t k = 1;
  std::string axis = "conferred";
  std::string out;
};

int run_pool(const PoolArgs& a) {
  auto in = open_in(a.table);
  const auto table = load_accuracy_table(in);
  const auto m = improvement_matrix(table);
  const auto axis = a.axis == "received" ? ImprovementAxis::received : ImprovementAxis::conferred;
  nlohmann::json j = {{"improvement", improvement_json(m)}, {"axis", a.axis}};
  write_improvement_text(std::cout, m);
  if (table.datasets.size() >= 3) {
    try {
      const auto c = quality_correlation(table, axis);
      j["correlation"] = {{"r", c.r}, {"p_value", c.p_value}};
      std::printf("quality correlation r=%.4f p=%.4f\n", c.r, c.p_value);
    } catch (const undefined_correlation_error& e) {
      j["correlation"] = nullptr;
      std::printf("quality correlation undefined: %s\n", e.what());
    }
  }
  if (!a.target.empty()) {
    const auto pool = select_pool(table, a.target, a.k);
    j["target"] = a.target;
    j["pool"] = pool;
    std::printf("pool for %s: %s\n", a.target.c_str(), join_words(pool, ", ").c_str());
  }
  if (!a.out.empty()) {
    auto out = open_out(a.out);
    out << j.dump(2) << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Decoding and evaluation of per-position word distributions"};
  app.set_config("--config", "", "Option file (INI or TOML); flags on the command line win");
  app.require_subcommand(1, 1);
  app.option_defaults()->always_capture_default();

  VocabArgs va;
  auto* vocab = app.add_subcommand("vocab", "Build a vocabulary from a corpus");
  vocab->add_option("--corpus", va.corpus, "Corpus text (default: bundled text)");
  vocab->add_option("--size", va.size, "Vocabulary size")->check(CLI::PositiveNumber);
  vocab->add_option("--out", va.out, "Vocabulary file")->required();

  SynthArgs sa;
  auto* synth = app.add_subcommand("synth", "Generate synthetic lattices");
  synth->add_option("--corpus", sa.corpus, "Corpus text (default: bundled text)");
  synth->add_option("--vocab", sa.vocab, "Vocabulary file (default: built from the corpus)");
  synth->add_option("--vocab-size", sa.vocab_size, "Vocabulary size when --vocab is absent");
  synth->add_option("--count", sa.count, "Number of lattices");
  synth->add_option("--length", sa.length, "Words per lattice")->check(CLI::PositiveNumber);
  synth->add_option("--top1", sa.top1, "Target top-1 accuracy")->check(CLI::Range(0.0, 1.0));
  synth->add_option("--concentration", sa.concentration, "Dirichlet noise concentration");
  synth->add_option("--oov-concentration", sa.oov_concentration,
                    "Noise concentration at out-of-vocabulary positions (0: same)");
  synth->add_option("--oov-rate", sa.oov_rate,
                    "Forced out-of-vocabulary rate (negative: the text's own)");
  synth->add_option("--boost-shape", sa.boost_shape,
                    "Gamma shape of the per-position boost (0: fixed boost)");
  synth->add_option("--heldout", sa.heldout, "Tail fraction of the corpus used for references");
  synth->add_flag("--overdense", sa.overdense, "Emit overlapping time-stamped predictions");
  synth->add_option("--spacing", sa.spacing, "Window spacing in seconds (overdense)");
  synth->add_option("--slots-per-word", sa.slots_per_word, "Time slots per word (overdense)");
  synth->add_option("--seed", sa.seed, "Random seed");
  synth->add_option("--out", sa.out, "Lattice file")->required();

  LmArgs la;
  auto* lm = app.add_subcommand("lm-train", "Train an n-gram language model");
  lm->add_option("--corpus", la.corpus, "Corpus text (default: bundled text)");
  lm->add_option("--order", la.order, "N-gram order")->check(CLI::PositiveNumber);
  lm->add_option("--alpha", la.alpha, "Additive smoothing")->check(CLI::PositiveNumber);
  lm->add_option("--heldout", la.heldout,
                 "Tail fraction withheld from training (0: train on everything)")
      ->check(CLI::Range(0.0, 0.99));
  lm->add_option("--out", la.out, "Model file")->required();

  DecodeArgs da;
  auto* decode = app.add_subcommand("decode", "Decode lattices into transcripts");
  decode->add_option("--lattices", da.lattices, "Lattice file")->required();
  decode->add_option("--method", da.method, "Decoding method")
      ->check(CLI::IsMember({"greedy", "beam", "beam-fill", "ic-fill", "ic-transcribe",
                             "ctc-greedy", "ctc-beam"}));
  decode->add_option("--lm", da.lm, "N-gram rescorer file");
  decode->add_option("--filler-lm", da.filler_lm, "N-gram filler file (default: --lm)");
  decode->add_option("--scorer", da.scorer, "Rescorer backend")
      ->check(CLI::IsMember({"ngram", "remote"}));
  decode->add_option("--scorer-endpoint", da.scorer_endpoint,
                     "Completions URL of a remote token scorer");
  decode->add_option("--beam-width", da.beam_width, "Beam width")->check(CLI::PositiveNumber);
  decode->add_option("--lambda", da.lambda, "Rescorer weight");
  decode->add_option("--context-limit", da.context_limit, "Rescorer context in words")
      ->check(CLI::PositiveNumber);
  decode->add_option("--candidates", da.candidates, "Candidates per step")
      ->check(CLI::PositiveNumber);
  decode->add_option("--rescorer-mode", da.rescorer_mode, "Rescorer term")
      ->check(CLI::IsMember({"incremental", "whole_prefix"}));
  decode->add_option("--oov-source", da.oov_source, "Out-of-vocabulary flags")
      ->check(CLI::IsMember({"none", "truth", "detector"}));
  decode->add_option("--threshold", da.threshold, "Detector threshold")
      ->check(CLI::Range(0.0, 1.0));
  decode->add_option("--unk-fill", da.unk_fill, "Flagged positions in greedy and beam")
      ->check(CLI::IsMember({"unk", "random", "none"}));
  decode->add_option("--seed", da.seed, "Random seed");
  decode->add_option("--jobs", da.jobs, "Parallel lattices")->check(CLI::PositiveNumber);
  decode->add_flag("--dry-run", da.dry_run, "Write prompts instead of calling the LLM");
  decode->add_option("--cosine-temperature", da.cosine_temperature,
                     "Softmax temperature for cosine lattices without one");
  decode->add_option("--llm-endpoint", da.endpoint, "Chat endpoint URL")
      ->envname("B2T_LLM_ENDPOINT");
  decode->add_option("--llm-api-key", da.api_key, "API key")->envname("B2T_LLM_API_KEY");
  decode->add_option("--llm-model", da.model, "Model name")->envname("B2T_LLM_MODEL");
  decode->add_option("--max-concurrent", da.max_concurrent, "Requests in flight")
      ->check(CLI::PositiveNumber);
  decode->add_option("--retry-limit", da.retry_limit, "Retries per request")
      ->check(CLI::NonNegativeNumber);
  decode->add_option("--timeout", da.timeout, "Request timeout in seconds");
  decode->add_option("--thinking-budget", da.thinking_budget, "Thinking tokens (0: unset)");
  decode->add_option("--parse-retries", da.parse_retries, "Re-asks after a malformed reply");
  decode->add_option("--out", da.out, "Transcript file")->required();

  OovArgs oa;
  auto* oov = app.add_subcommand("oov", "Train or apply an out-of-vocabulary detector");
  oov->require_subcommand(1, 1);
  auto add_oov_common = [&](CLI::App* c) {
    c->add_option("--lattices", oa.lattices, "Lattice file")->required();
    c->add_option("--threshold", oa.threshold, "Flagging threshold")->check(CLI::Range(0.0, 1.0));
    c->add_option("--out", oa.out, "Output file")->required();
  };
  auto* oov_train = oov->add_subcommand("train", "Fit a detector on annotated lattices");
  add_oov_common(oov_train);
  oov_train->add_option("--classifier", oa.classifier, "Classifier")
      ->check(CLI::IsMember({"gbdt", "boosted_trees", "logistic"}));
  oov_train->add_option("--learning-rate", oa.trees.learning_rate, "Boosting learning rate");
  oov_train->add_option("--estimators", oa.trees.n_estimators, "Boosting rounds");
  oov_train->add_option("--max-depth", oa.trees.max_depth, "Tree depth");
  oov_train->add_option("--min-child-weight", oa.trees.min_child_weight, "Minimum child hessian");
  oov_train->add_option("--subsample", oa.trees.subsample, "Row fraction per tree");
  oov_train->add_option("--colsample", oa.trees.colsample, "Feature fraction per tree");
  oov_train->add_option("--gamma", oa.trees.gamma, "Minimum split gain");
  oov_train->add_option("--reg-alpha", oa.trees.alpha, "L1 leaf penalty");
  oov_train->add_option("--reg-lambda", oa.trees.lambda, "L2 leaf penalty");
  oov_train->add_option("--max-bins", oa.trees.max_bins, "Histogram bins per feature");
  oov_train->add_option("--l2", oa.logistic.l2, "Logistic L2 penalty");
  oov_train->add_option("--epochs", oa.logistic.epochs, "Logistic gradient steps");
  oov_train->add_option("--seed", oa.seed, "Random seed");
  auto* oov_detect = oov->add_subcommand("detect", "Attach detector outputs to lattices");
  add_oov_common(oov_detect);
  oov_detect->add_option("--detector", oa.detector, "Detector file")->required();

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Score transcripts against references");
  eval->add_option("--transcripts", ea.transcripts, "Transcript file")->required();
  eval->add_option("--references", ea.references, "Reference file, one sequence per line");
  eval->add_option("--lattices", ea.lattices, "Lattice file holding references");
  eval->add_option("--vocab", ea.vocab, "Vocabulary file (oov pool for --unk-mode random)");
  eval->add_option("--unk-mode", ea.unk_mode, "Treatment of <UNK> in transcripts")
      ->check(CLI::IsMember({"insert", "drop", "random"}));
  eval->add_option("--label", ea.label, "Row label of the printed table");
  eval->add_option("--seed", ea.seed, "Random seed");
  eval->add_option("--out", ea.out, "Output prefix for report files");

  PoolArgs pa;
  auto* pool = app.add_subcommand("pool", "Analyse dataset pooling from an accuracy table");
  pool->add_option("--table", pa.table, "Accuracy table file")->required();
  pool->add_option("--target", pa.target, "Dataset to build a pool for");
  pool->add_option("--k", pa.k, "Partners to select")->check(CLI::PositiveNumber);
  pool->add_option("--axis", pa.axis, "Mean improvement per dataset")
      ->check(CLI::IsMember({"conferred", "received"}));
  pool->add_option("--out", pa.out, "JSON report");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*vocab) {
      echo_config(app, "vocab", va.out);
      return run_vocab(va);
    }
    if (*synth) {
      echo_config(app, "synth", sa.out);
      return run_synth(sa);
    }
    if (*lm) {
      echo_config(app, "lm-train", la.out);
      return run_lm_train(la);
    }
    if (*decode) {
      echo_config(app, "decode", da.out);
      return run_decode(da);
    }
    if (*oov_train) {
      echo_config(app, "oov.train", oa.out);
      return run_oov_train(oa);
    }
    if (*oov_detect) {
      echo_config(app, "oov.detect", oa.out);
      return run_oov_detect(oa);
    }
    if (*eval) {
      echo_config(app, "eval", ea.out);
      return run_eval(ea);
    }
    if (*pool) {
      echo_config(app, "pool", pa.out);
      return run_pool(pa);
    }
  } catch (const service_error& e) {
    std::cerr << "b2t: remote service failure: " << e.what() << " (status " << e.status()
              << ", " << e.attempts() << " attempts)\n";
    return kExitRemote;
  } catch (const std::exception& e) {
    std::cerr << "b2t: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}
