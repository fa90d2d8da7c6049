// Copyright 2026 The USR Toolkit Authors.
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

#include "usr/scores.hpp"

#include <fstream>
#include <map>

#include "json.hpp"
#include "usr/errors.hpp"

namespace usr {

std::string score_row_json(const MetricScore& score,
                           const ScoreProvenance& provenance) {
  nlohmann::ordered_json j;
  j["example_id"] = score.example_id;
  j["metric"] = score.metric;
  j["value"] = score.value ? nlohmann::ordered_json(*score.value)
                           : nlohmann::ordered_json(nullptr);
  if (!score.value) j["missing"] = score.missing_reason;
  j["system_id"] = provenance.system_id;
  j["config_hash"] = provenance.config_hash;
  j["seed"] = provenance.seed;
  return j.dump();
}

std::vector<MetricScore> parse_score_rows(std::istream& in) {
  std::vector<MetricScore> rows;
  std::map<std::pair<std::string, std::string>, std::size_t> seen;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    MetricScore s;
    try {
      const auto j = nlohmann::json::parse(line);
      s.example_id = j.at("example_id").get<std::string>();
      s.metric = j.at("metric").get<std::string>();
      const auto& v = j.at("value");
      if (!v.is_null()) s.value = v.get<double>();
      s.missing_reason = j.value("missing", "");
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("score file line " + std::to_string(lineno) + ": " +
                       e.what());
    }
    auto key = std::make_pair(s.example_id, s.metric);
    if (auto it = seen.find(key); it != seen.end()) {
      if (rows[it->second].value != s.value) {
        throw IntegrityError("score file line " + std::to_string(lineno) +
                             ": conflicting duplicate for (" + s.example_id +
                             ", " + s.metric + ")");
      }
      continue;
    }
    seen.emplace(std::move(key), rows.size());
    rows.push_back(std::move(s));
  }
  return rows;
}

std::vector<MetricScore> read_score_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open score file '" + path.string() + "'");
  return parse_score_rows(in);
}

}  // namespace usr
