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

// Line-oriented lattice files.
//
// Each lattice is a header line followed by one JSON record per position:
//
//   {"format_version":1,"vocab":[...],"oov_pool":[...],"score_kind":"prob"}
//   {"probs":[0.5,0.3,0.2],"oov_truth":false,"ref":"the"}
//   {"probs":{"0":0.9,"2":0.1}}
//
// Optional header fields: "spacing_seconds" (overdense lattices),
// "reference" (word list, used when spacing is set), "temperature" (softmax
// temperature for score_kind "cosine"). Optional record fields: "oov_truth",
// "oov_detected", "ref", "time". A blank line ends a lattice.

#pragma once

#include <cmath>
#include <istream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"
#include "b2t/lattice/lattice.hpp"
#include "b2t/lattice/softmax.hpp"

namespace b2t {

inline constexpr int kLatticeFormatVersion = 1;

/// Sparse records whose mass is off by at most this much are renormalized.
inline constexpr double kSparseRenormTolerance = 1e-3;

struct LatticeReadOptions {
  /// Temperature applied to "cosine" scores when the header does not set one.
  double cosine_temperature = 1.0;
};

namespace lattice_io_detail {

using nlohmann::json;

struct Header {
  std::shared_ptr<const Vocabulary> vocab;
  bool cosine = false;
  double temperature = 1.0;
  std::optional<double> spacing;
  std::optional<std::vector<std::string>> reference;
};

inline json parse_line(const std::string& line, std::size_t line_no) {
  try {
    auto j = json::parse(line);
    if (!j.is_object()) throw parse_error("record is not a JSON object", line_no);
    return j;
  } catch (const json::exception& e) {
    throw parse_error(std::string("malformed record: ") + e.what(), line_no);
  }
}

inline std::vector<std::string> string_list(const json& j, const char* key,
                                            std::size_t line_no) {
  if (!j.contains(key)) return {};
  const auto& v = j.at(key);
  if (!v.is_array())
    throw parse_error(std::string("'") + key + "' must be an array", line_no);
  std::vector<std::string> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_string())
      throw parse_error(std::string("'") + key + "' must hold strings",
                        line_no);
    out.push_back(e.get<std::string>());
  }
  return out;
}

inline Header parse_header(const json& j, std::size_t line_no,
                           const LatticeReadOptions& opts) {
  if (!j.contains("format_version") || !j["format_version"].is_number_integer())
    throw parse_error("header lacks an integer format_version", line_no);
  if (j["format_version"].get<int>() != kLatticeFormatVersion)
    throw parse_error("unsupported lattice format_version " +
                          std::to_string(j["format_version"].get<int>()),
                      line_no);
  if (!j.contains("vocab")) throw parse_error("header lacks 'vocab'", line_no);
  Header h;
  try {
    h.vocab = std::make_shared<const Vocabulary>(
        string_list(j, "vocab", line_no), string_list(j, "oov_pool", line_no));
  } catch (const invalid_input_error& e) {
    throw parse_error(e.what(), line_no);
  }
  const std::string kind = j.value("score_kind", std::string("prob"));
  if (kind == "cosine")
    h.cosine = true;
  else if (kind != "prob")
    throw parse_error("unknown score_kind '" + kind + "'", line_no);
  h.temperature = opts.cosine_temperature;
  if (j.contains("temperature")) {
    if (!j["temperature"].is_number() || !(j["temperature"].get<double>() > 0))
      throw parse_error("temperature must be a positive number", line_no);
    h.temperature = j["temperature"].get<double>();
  }
  if (j.contains("spacing_seconds")) {
    if (!j["spacing_seconds"].is_number())
      throw parse_error("spacing_seconds must be a number", line_no);
    h.spacing = j["spacing_seconds"].get<double>();
  }
  if (j.contains("reference"))
    h.reference = string_list(j, "reference", line_no);
  return h;
}

inline PositionDistribution parse_position(const json& j, const Header& h,
                                           std::size_t line_no) {
  if (!j.contains("probs")) throw parse_error("record lacks 'probs'", line_no);
  const auto& pj = j["probs"];
  const std::size_t dim = h.vocab->size();
  PositionDistribution pos;
  pos.probs.assign(dim, 0.0);

  if (pj.is_array()) {
    if (pj.size() != dim)
      throw parse_error("record has " + std::to_string(pj.size()) +
                            " values, vocabulary has " + std::to_string(dim),
                        line_no);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!pj[i].is_number())
        throw parse_error("non-numeric probability", line_no);
      pos.probs[i] = pj[i].get<double>();
    }
    if (h.cosine) {
      try {
        pos.probs = softmax(pos.probs, h.temperature);
      } catch (const invalid_input_error& e) {
        throw parse_error(e.what(), line_no);
      }
    } else {
      try {
        check_distribution(pos.probs);
      } catch (const invalid_input_error& e) {
        throw parse_error(e.what(), line_no);
      }
    }
  } else if (pj.is_object()) {
    if (h.cosine)
      throw parse_error("sparse records require score_kind 'prob'", line_no);
    double total = 0.0;
    for (const auto& [key, value] : pj.items()) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        idx = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw parse_error("bad sparse index '" + key + "'", line_no);
      }
      if (idx >= dim)
        throw parse_error("sparse index " + key + " out of range", line_no);
      if (!value.is_number() || !(value.get<double>() >= 0.0))
        throw parse_error("bad sparse probability", line_no);
      pos.probs[idx] = value.get<double>();
      total += pos.probs[idx];
    }
    if (std::abs(total - 1.0) > kSparseRenormTolerance)
      throw parse_error("sparse record sums to " + std::to_string(total),
                        line_no);
    for (double& p : pos.probs) p /= total;
  } else {
    throw parse_error("'probs' must be an array or an object", line_no);
  }

  if (j.contains("oov_truth")) {
    if (!j["oov_truth"].is_boolean())
      throw parse_error("oov_truth must be boolean", line_no);
    pos.oov_truth = j["oov_truth"].get<bool>();
  }
  if (j.contains("oov_detected")) {
    if (!j["oov_detected"].is_number())
      throw parse_error("oov_detected must be a number", line_no);
    pos.oov_detected = j["oov_detected"].get<double>();
  }
  if (j.contains("time")) {
    if (!j["time"].is_number()) throw parse_error("time must be a number", line_no);
    pos.time = j["time"].get<double>();
  }
  return pos;
}

}  // namespace lattice_io_detail

/// Reads lattices one at a time from a multi-lattice stream.
class LatticeReader {
 public:
  explicit LatticeReader(std::istream& in, LatticeReadOptions opts = {})
      : in_(in), opts_(opts) {}

  /// Next lattice, or nullopt at end of stream. Throws parse_error.
  std::optional<Lattice> next() {
    namespace d = lattice_io_detail;
    std::string line;
    std::optional<d::Header> header;
    std::size_t header_line = 0;
    std::vector<PositionDistribution> positions;
    std::vector<std::string> refs;
    std::size_t ref_records = 0;

    while (std::getline(in_, line)) {
      ++line_no_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      const bool blank = line.find_first_not_of(" \t") == std::string::npos;
      if (blank) {
        if (header) break;
        continue;
      }
      auto j = d::parse_line(line, line_no_);
      if (!header) {
        header = d::parse_header(j, line_no_, opts_);
        header_line = line_no_;
        continue;
      }
      positions.push_back(d::parse_position(j, *header, line_no_));
      if (j.contains("ref")) {
        if (!j["ref"].is_string())
          throw parse_error("ref must be a string", line_no_);
        refs.push_back(j["ref"].get<std::string>());
        ++ref_records;
      }
    }
    if (!header) return std::nullopt;

    std::optional<std::vector<std::string>> reference = header->reference;
    if (ref_records > 0) {
      if (ref_records != positions.size())
        throw parse_error("either every record or none carries 'ref'",
                          header_line);
      if (reference)
        throw parse_error("reference given in both header and records",
                          header_line);
      reference = std::move(refs);
    }
    try {
      return Lattice(header->vocab, std::move(positions), std::move(reference),
                     header->spacing);
    } catch (const invalid_input_error& e) {
      throw parse_error(e.what(), header_line);
    }
  }

 private:
  std::istream& in_;
  LatticeReadOptions opts_;
  std::size_t line_no_ = 0;
};

/// First lattice of the stream. An empty stream is a parse error.
inline Lattice load_lattice(std::istream& in, LatticeReadOptions opts = {}) {
  LatticeReader reader(in, opts);
  auto lat = reader.next();
  if (!lat) throw parse_error("no lattice in stream");
  return std::move(*lat);
}

inline std::vector<Lattice> load_lattices(std::istream& in,
                                          LatticeReadOptions opts = {}) {
  LatticeReader reader(in, opts);
  std::vector<Lattice> out;
  while (auto lat = reader.next()) out.push_back(std::move(*lat));
  return out;
}

/// Writes dense probability records. Per-record "ref" is used unless the
/// lattice is overdense, in which case the reference goes in the header.
inline void save_lattice(const Lattice& lat, std::ostream& out) {
  using nlohmann::json;
  json header = {{"format_version", kLatticeFormatVersion},
                 {"vocab", lat.vocab().words()},
                 {"oov_pool", lat.vocab().oov_pool()},
                 {"score_kind", "prob"}};
  const bool overdense = lat.spacing_seconds().has_value();
  if (overdense) header["spacing_seconds"] = *lat.spacing_seconds();
  if (overdense && lat.reference()) header["reference"] = *lat.reference();
  out << header.dump() << '\n';
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto& p = lat[i];
    json rec = {{"probs", p.probs}};
    if (p.oov_truth) rec["oov_truth"] = *p.oov_truth;
    if (p.oov_detected) rec["oov_detected"] = *p.oov_detected;
    if (p.time) rec["time"] = *p.time;
    if (!overdense && lat.reference()) rec["ref"] = (*lat.reference())[i];
    out << rec.dump() << '\n';
  }
}

/// Lattices separated by blank lines.
inline void save_lattices(std::span<const Lattice> lattices, std::ostream& out) {
  for (std::size_t i = 0; i < lattices.size(); ++i) {
    if (i > 0) out << '\n';
    save_lattice(lattices[i], out);
  }
}

}  // namespace b2t
