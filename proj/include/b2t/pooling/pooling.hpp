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

// Which datasets to pool: the gain from joint training against standalone
// quality.
//
// Table file (tab- or space-separated):
//
//   datasets    A    B    C
//   standalone  .20  .30  .25
//   A           -    .44  .21     row = evaluation set, column = partner
//   B           .31  -    .30
//   C           .26  .29  -
//   chance      .004 .004 .004
//
// "-" marks a missing entry; diagonal entries may be "-" or the standalone
// value.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "b2t/core/error.hpp"
#include "b2t/pooling/stats.hpp"

namespace b2t {

struct AccuracyTable {
  std::vector<std::string> datasets;
  std::map<std::string, double> standalone;
  /// (evaluation dataset, training partner) -> accuracy
  std::map<std::pair<std::string, std::string>, double> joint;
  std::map<std::string, double> chance;

  bool knows(const std::string& d) const {
    return std::find(datasets.begin(), datasets.end(), d) != datasets.end();
  }

  void validate() const {
    std::set<std::string> names(datasets.begin(), datasets.end());
    if (names.size() != datasets.size()) throw invalid_input_error("duplicate dataset name");
    auto check_acc = [](double v, const std::string& what) {
      if (!(v >= 0.0 && v <= 1.0)) throw invalid_input_error(what + " must lie in [0, 1]");
    };
    for (const auto& [d, v] : standalone) {
      if (!names.count(d)) throw invalid_input_error("unknown dataset '" + d + "'");
      check_acc(v, "standalone accuracy of " + d);
    }
    for (const auto& [d, v] : chance) {
      if (!names.count(d)) throw invalid_input_error("unknown dataset '" + d + "'");
      check_acc(v, "chance accuracy of " + d);
    }
    for (const auto& [key, v] : joint) {
      if (!names.count(key.first) || !names.count(key.second))
        throw invalid_input_error("joint entry (" + key.first + ", " + key.second +
                                  ") references an unknown dataset");
      check_acc(v, "joint accuracy");
      if (key.first == key.second) {
        auto it = standalone.find(key.first);
        if (it == standalone.end() || it->second != v)
          throw invalid_input_error("diagonal entry of " + key.first +
                                    " differs from its standalone accuracy");
      }
    }
  }

  double standalone_of(const std::string& d) const {
    auto it = standalone.find(d);
    if (it == standalone.end())
      throw invalid_input_error("missing standalone accuracy for '" + d + "'");
    return it->second;
  }
};

struct ImprovementMatrix {
  std::vector<std::string> datasets;
  /// delta[e][p]: gain on evaluation set e from adding partner p.
  std::vector<std::vector<double>> delta;
};

inline ImprovementMatrix improvement_matrix(const AccuracyTable& table) {
  table.validate();
  ImprovementMatrix m{table.datasets, {}};
  const std::size_t n = table.datasets.size();
  m.delta.assign(n, std::vector<double>(n, 0.0));
  for (std::size_t e = 0; e < n; ++e) {
    const auto& eval = table.datasets[e];
    const double base = table.standalone_of(eval);
    for (std::size_t p = 0; p < n; ++p) {
      if (p == e) continue;
      const auto& partner = table.datasets[p];
      auto it = table.joint.find({eval, partner});
      if (it == table.joint.end())
        throw invalid_input_error("missing joint accuracy for (" + eval + ", " + partner + ")");
      m.delta[e][p] = it->second - base;
    }
  }
  return m;
}

enum class ImprovementAxis {
  conferred,  // mean gain a partner gives the other datasets (column mean)
  received,   // mean gain a dataset gets from its partners (row mean)
};

/// Mean off-diagonal improvement per dataset along `axis`.
inline std::vector<double> mean_improvements(const ImprovementMatrix& m,
                                             ImprovementAxis axis = ImprovementAxis::conferred) {
  const std::size_t n = m.datasets.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  for (std::size_t d = 0; d < n; ++d) {
    for (std::size_t o = 0; o < n; ++o) {
      if (o == d) continue;
      out[d] += axis == ImprovementAxis::conferred ? m.delta[o][d] : m.delta[d][o];
    }
    out[d] /= static_cast<double>(n - 1);
  }
  return out;
}

/// Pearson correlation of standalone accuracy with mean improvement.
inline Correlation quality_correlation(const AccuracyTable& table,
                                       ImprovementAxis axis = ImprovementAxis::conferred) {
  if (table.datasets.size() < 3)
    throw invalid_input_error("quality correlation needs at least 3 datasets");
  const auto m = improvement_matrix(table);
  std::vector<double> quality;
  for (const auto& d : table.datasets) quality.push_back(table.standalone_of(d));
  const auto gains = mean_improvements(m, axis);
  return pearson(quality, gains);
}

/// The `k` partners of `target` with the highest standalone accuracy; ties
/// go to the lexicographically smaller name.
inline std::vector<std::string> select_pool(const AccuracyTable& table, const std::string& target,
                                            std::size_t k) {
  if (!table.knows(target)) throw invalid_input_error("unknown target dataset '" + target + "'");
  if (k < 1 || k + 1 > table.datasets.size())
    throw invalid_input_error("k must lie in [1, " + std::to_string(table.datasets.size() - 1) + "]");
  std::vector<std::string> partners;
  for (const auto& d : table.datasets)
    if (d != target) partners.push_back(d);
  std::vector<double> quality;
  for (const auto& d : partners) quality.push_back(table.standalone_of(d));
  std::vector<std::size_t> idx(partners.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    if (quality[a] != quality[b]) return quality[a] > quality[b];
    return partners[a] < partners[b];
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < k; ++i) out.push_back(partners[idx[i]]);
  return out;
}

namespace pooling_detail {

inline std::vector<std::string> split_fields(const std::string& line) {
  std::istringstream ss(line);
  std::vector<std::string> out;
  for (std::string f; ss >> f;) out.push_back(f);
  return out;
}

inline std::optional<double> parse_cell(const std::string& cell, std::size_t line) {
  if (cell == "-") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw std::invalid_argument(cell);
    return v;
  } catch (const std::exception&) {
    throw parse_error("bad number '" + cell + "'", line);
  }
}

}  // namespace pooling_detail

inline AccuracyTable load_accuracy_table(std::istream& in) {
  AccuracyTable t;
  bool have_header = false;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    auto fields = pooling_detail::split_fields(line);
    if (fields.empty()) continue;
    if (!have_header) {
      if (fields[0] != "datasets") throw parse_error("first row must start with 'datasets'", lineno);
      t.datasets.assign(fields.begin() + 1, fields.end());
      if (t.datasets.empty()) throw parse_error("no dataset names", lineno);
      have_header = true;
      continue;
    }
    if (fields.size() != t.datasets.size() + 1)
      throw parse_error("expected " + std::to_string(t.datasets.size() + 1) + " fields", lineno);
    const auto& label = fields[0];
    for (std::size_t c = 0; c < t.datasets.size(); ++c) {
      const auto v = pooling_detail::parse_cell(fields[c + 1], lineno);
      if (!v) continue;
      const auto& col = t.datasets[c];
      if (label == "standalone")
        t.standalone[col] = *v;
      else if (label == "chance")
        t.chance[col] = *v;
      else if (t.knows(label))
        t.joint[{label, col}] = *v;
      else
        throw parse_error("unknown row label '" + label + "'", lineno);
    }
  }
  if (!have_header) throw parse_error("empty accuracy table");
  try {
    t.validate();
  } catch (const invalid_input_error& e) {
    throw parse_error(e.what());
  }
  return t;
}

inline nlohmann::json improvement_json(const ImprovementMatrix& m) {
  return {{"datasets", m.datasets}, {"delta", m.delta}};
}

/// Plain-text matrix, rows = evaluation set, columns = partner.
inline void write_improvement_text(std::ostream& out, const ImprovementMatrix& m) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%-14s", "eval\\partner");
  out << buf;
  for (const auto& d : m.datasets) {
    std::snprintf(buf, sizeof buf, "%12s", d.c_str());
    out << buf;
  }
  out << '\n';
  for (std::size_t e = 0; e < m.datasets.size(); ++e) {
    std::snprintf(buf, sizeof buf, "%-14s", m.datasets[e].c_str());
    out << buf;
    for (double v : m.delta[e]) {
      std::snprintf(buf, sizeof buf, "%+12.4f", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace b2t
