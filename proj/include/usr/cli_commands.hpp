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

#ifndef USR_CLI_COMMANDS_HPP_
#define USR_CLI_COMMANDS_HPP_

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "usr/benchmark.hpp"
#include "usr/combiner.hpp"
#include "usr/corpus.hpp"
#include "usr/model_scorers.hpp"
#include "usr/report.hpp"

namespace usr::cli {

struct RunConfig {
  std::filesystem::path dataset;
  DatasetFormat format = DatasetFormat::kCanonicalJsonl;
  std::vector<std::string> metrics;
  // eval: "<role>=<checkpoint dir | backend id | embedding file>" with roles
  // mlm, dr-context, dr-fact, embeddings, bertscore-<label>.
  // train: a single backend id.
  std::vector<std::string> backends;
  std::string mapping;  // SubMetricMapping::parse syntax; empty = default
  std::uint64_t seed = 13;
  std::filesystem::path out = "usr-out";
  NormStats norm_stats = NormStats::kBatch;
  MlmOrientation mlm_orientation = MlmOrientation::kHigherIsBetter;
  bool mlm_normalize = false;
  bool include_ground_truth = false;
  ReportFormat report_format = ReportFormat::kTextTable;

  std::vector<std::filesystem::path> scores;  // benchmark inputs
  std::filesystem::path regression_model;     // needed by the "usr" metric
  std::string usr_mode = "reuse";             // reuse | refit
  int epochs = 1;
  int negative_ratio = 1;
  std::size_t jobs = 1;
  PValueMethod system_p_value = PValueMethod::kTApproximation;
  HumanAggregation aggregation = HumanAggregation::kMean;
  std::filesystem::path report_input;  // report subcommand

  // Hash over every field that can change an output (not out or jobs).
  std::string hash() const;
};

// Expands group names ("overlap", "embedding", "usr-all") and validates
// metric names against the known set.
std::vector<std::string> expand_metrics(const std::vector<std::string>& requested);

struct CommandResult {
  std::vector<std::filesystem::path> outputs;
  std::string summary;
};

// Writes <out>/scores.jsonl. Existing rows are kept and only missing
// (example, metric) pairs are appended.
CommandResult cmd_eval(const RunConfig& config);

enum class TrainTarget { kMlm, kDrContext, kDrFact };
TrainTarget parse_train_target(std::string_view name);

// Writes a checkpoint under <out>/<target>.
CommandResult cmd_train(const RunConfig& config, TrainTarget target);

enum class FitMode { kHuman, kPerAnnotator };
FitMode parse_fit_mode(std::string_view name);

CommandResult cmd_fit_regression(const RunConfig& config, FitMode mode);

CommandResult cmd_benchmark(const RunConfig& config);
CommandResult cmd_agreement(const RunConfig& config);
CommandResult cmd_report(const RunConfig& config);

}  // namespace usr::cli

#endif  // USR_CLI_COMMANDS_HPP_
