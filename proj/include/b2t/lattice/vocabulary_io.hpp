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

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"
#include "b2t/lattice/vocabulary.hpp"

namespace b2t {

inline constexpr int kVocabularyFormatVersion = 1;

/// One JSON object: {"format_version", "words", "oov_pool"}.
inline void save_vocabulary(const Vocabulary& vocab, std::ostream& out) {
  const nlohmann::json j = {{"format_version", kVocabularyFormatVersion},
                            {"words", vocab.words()},
                            {"oov_pool", vocab.oov_pool()}};
  out << j.dump() << '\n';
}

inline Vocabulary load_vocabulary(std::istream& in) {
  try {
    nlohmann::json j;
    in >> j;
    if (j.at("format_version").get<int>() != kVocabularyFormatVersion)
      throw parse_error("unsupported vocabulary format version");
    return Vocabulary(j.at("words").get<std::vector<std::string>>(),
                      j.value("oov_pool", std::vector<std::string>{}));
  } catch (const nlohmann::json::exception& e) {
    throw parse_error(std::string("malformed vocabulary file: ") + e.what());
  } catch (const invalid_input_error& e) {
    throw parse_error(std::string("invalid vocabulary: ") + e.what());
  }
}

}  // namespace b2t
