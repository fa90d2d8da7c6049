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

#ifndef USR_SCORES_HPP_
#define USR_SCORES_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace usr {

// One metric value for one example. `value` is empty when the metric could
// not be computed; `missing_reason` then says why.
struct MetricScore {
  std::string metric;
  std::string example_id;
  std::optional<double> value;
  std::string missing_reason;
};

// Provenance stamped on every score-file row.
struct ScoreProvenance {
  std::string system_id;
  std::string config_hash;
  std::uint64_t seed = 0;
};

// JSONL row:
// {"example_id","metric","value","system_id","config_hash","seed"[,"missing"]}
std::string score_row_json(const MetricScore& score,
                           const ScoreProvenance& provenance);

std::vector<MetricScore> read_score_file(const std::filesystem::path& path);
std::vector<MetricScore> parse_score_rows(std::istream& in);

}  // namespace usr

#endif  // USR_SCORES_HPP_
