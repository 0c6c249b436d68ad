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

#include <string>
#include <vector>

#include "b2t/core/text.hpp"
#include "b2t/decoder/config.hpp"

namespace b2t {

/// Positionwise argmax. Flagged positions become <UNK> or a random oov-pool
/// word depending on `config.fill_mode`.
inline std::vector<std::string> decode_greedy(const Lattice& lat,
                                              const DecoderConfig& config = {}) {
  if (lat.empty()) throw invalid_input_error("cannot decode an empty lattice");
  if (config.fill_mode == FillMode::during_beam)
    throw invalid_input_error("greedy decoding cannot fill during beam search");
  const auto flags = resolve_oov_flags(lat, config.oov_source);
  std::vector<std::string> random_words;
  if (config.fill_mode == FillMode::random)
    random_words = decoder_detail::random_fill_words(lat, flags, config.seed);

  std::vector<std::string> out;
  out.reserve(lat.size());
  for (std::size_t i = 0; i < lat.size(); ++i) {
    if (flags[i] && config.fill_mode == FillMode::unk_sentinel)
      out.emplace_back(kUnk);
    else if (flags[i] && config.fill_mode == FillMode::random)
      out.push_back(random_words[i]);
    else
      out.push_back(lat.vocab().word_at(lat[i].argmax()));
  }
  return out;
}

}  // namespace b2t
