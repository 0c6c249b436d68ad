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

#include <random>
#include <span>
#include <string>
#include <vector>

#include "b2t/core/error.hpp"
#include "b2t/core/text.hpp"

namespace b2t {

/// How out-of-vocabulary positions of a hypothesis are scored.
enum class UnkMode {
  insert,  // the placeholder stays in place; the fair protocol
  drop,    // removed, which lets shifted words align by coincidence
  random,  // a uniform oov-pool draw
};

inline UnkMode unk_mode_from_string(const std::string& s) {
  if (s == "insert" || s == "insert_unk") return UnkMode::insert;
  if (s == "drop") return UnkMode::drop;
  if (s == "random" || s == "random_fill") return UnkMode::random;
  throw invalid_input_error("unknown unk mode '" + s + "'");
}

inline std::vector<std::string> apply_unk_protocol(std::span<const std::string> hypothesis,
                                                   const std::vector<bool>& oov_flags,
                                                   UnkMode mode, std::mt19937_64* rng = nullptr,
                                                   std::span<const std::string> oov_pool = {}) {
  if (oov_flags.size() != hypothesis.size())
    throw invalid_input_error("oov flags and hypothesis differ in length");
  std::vector<std::string> out;
  out.reserve(hypothesis.size());
  for (std::size_t i = 0; i < hypothesis.size(); ++i) {
    if (!oov_flags[i]) {
      out.push_back(hypothesis[i]);
      continue;
    }
    switch (mode) {
      case UnkMode::insert:
        out.emplace_back(kUnk);
        break;
      case UnkMode::drop:
        break;
      case UnkMode::random: {
        if (oov_pool.empty())
          throw invalid_input_error("random fill needs a non-empty oov pool");
        if (rng == nullptr) throw invalid_input_error("random fill needs a generator");
        std::uniform_int_distribution<std::size_t> pick(0, oov_pool.size() - 1);
        out.push_back(oov_pool[pick(*rng)]);
        break;
      }
    }
  }
  return out;
}

/// Flags the positions of a hypothesis that hold the placeholder.
inline std::vector<bool> unk_positions(std::span<const std::string> hypothesis) {
  std::vector<bool> flags;
  flags.reserve(hypothesis.size());
  for (const auto& w : hypothesis) flags.push_back(w == kUnk);
  return flags;
}

}  // namespace b2t
