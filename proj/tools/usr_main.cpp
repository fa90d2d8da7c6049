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

// Command-line entry point: usr <subcommand> [flags].

#include <iostream>
#include <map>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "usr/cli_commands.hpp"
#include "usr/errors.hpp"

namespace {

using usr::cli::RunConfig;

template <typename Enum>
CLI::Transformer enum_map(const std::map<std::string, Enum>& m) {
  return CLI::Transformer(m, CLI::ignore_case);
}

void add_common(CLI::App* sub, RunConfig& c) {
  sub->add_option("--dataset", c.dataset, "Dataset file");
  sub->add_option("--format", c.format, "canonical, topical-chat, persona-chat")
      ->transform(enum_map<usr::DatasetFormat>(
          {{"canonical", usr::DatasetFormat::kCanonicalJsonl},
           {"canonical-jsonl", usr::DatasetFormat::kCanonicalJsonl},
           {"topical-chat", usr::DatasetFormat::kTopicalChat},
           {"persona-chat", usr::DatasetFormat::kPersonaChat}}));
  sub->add_option("--metrics", c.metrics, "Metric names or groups (overlap, embedding, usr-all)")
      ->delimiter(',');
  sub->add_option("--backend", c.backends, "role=value (eval) or backend id (train)");
  sub->add_option("--mapping", c.mapping, "dimension=metric,... sub-metric mapping");
  sub->add_option("--seed", c.seed, "Random seed");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--report-format", c.report_format, "text-table, json, markdown")
      ->transform(enum_map<usr::ReportFormat>(
          {{"text-table", usr::ReportFormat::kTextTable},
           {"json", usr::ReportFormat::kJson},
           {"markdown", usr::ReportFormat::kMarkdown}}));
}

int run(int argc, char** argv) {
  CLI::App app{"USR dialog evaluation toolkit"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file; flags take precedence");

  RunConfig c;
  std::string target = "mlm";
  std::string mode = "human";

  auto* eval = app.add_subcommand("eval", "Score every example with the selected metrics");
  auto* train = app.add_subcommand("train", "Train a masked-LM or retrieval checkpoint");
  auto* fit = app.add_subcommand("fit-regression", "Fit the quality -> overall regression");
  auto* bench = app.add_subcommand("benchmark", "Correlate metric scores with human ratings");
  auto* agree = app.add_subcommand("agreement", "Inter-annotator agreement tables");
  auto* report = app.add_subcommand("report", "Re-render a report.json");
  for (auto* sub : {eval, train, fit, bench, agree, report}) add_common(sub, c);

  for (auto* sub : {eval, bench}) {
    sub->add_flag("--include-ground-truth", c.include_ground_truth,
                  "Keep ground-truth responses in correlations");
  }
  eval->add_option("--norm-stats", c.norm_stats, "batch or frozen")
      ->transform(enum_map<usr::NormStats>(
          {{"batch", usr::NormStats::kBatch}, {"frozen", usr::NormStats::kFrozen}}));
  eval->add_option("--mlm-orientation", c.mlm_orientation, "raw-nll or higher-is-better")
      ->transform(enum_map<usr::MlmOrientation>(
          {{"raw-nll", usr::MlmOrientation::kRawNll},
           {"higher-is-better", usr::MlmOrientation::kHigherIsBetter}}));
  eval->add_flag("--mlm-normalize", c.mlm_normalize, "Divide the MLM score by response length");
  eval->add_option("--regression-model", c.regression_model, "Model file for the usr metric");
  eval->add_option("--usr-mode", c.usr_mode, "reuse or refit")
      ->check(CLI::IsMember({"reuse", "refit"}));
  eval->add_option("--jobs", c.jobs, "Worker threads")->check(CLI::PositiveNumber);

  train->add_option("--target", target, "mlm, dr-context or dr-fact")
      ->check(CLI::IsMember({"mlm", "dr-context", "dr-fact"}));
  train->add_option("--epochs", c.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train->add_option("--negative-ratio", c.negative_ratio, "Negatives per positive")
      ->check(CLI::PositiveNumber);

  fit->add_option("--mode", mode, "human or per-annotator")
      ->check(CLI::IsMember({"human", "per-annotator"}));

  bench->add_option("--scores", c.scores, "Score files (default <out>/scores.jsonl)");
  bench->add_option("--system-p-value", c.system_p_value, "t or permutation")
      ->transform(enum_map<usr::PValueMethod>(
          {{"t", usr::PValueMethod::kTApproximation},
           {"permutation", usr::PValueMethod::kPermutation}}));
  bench->add_option("--aggregation", c.aggregation, "mean or median")
      ->transform(enum_map<usr::HumanAggregation>(
          {{"mean", usr::HumanAggregation::kMean},
           {"median", usr::HumanAggregation::kMedian}}));

  report->add_option("--input", c.report_input, "report.json to render");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : usr::exit_code_for(usr::ErrorCategory::kConfig);
  }

  usr::cli::CommandResult result;
  if (eval->parsed()) {
    result = usr::cli::cmd_eval(c);
  } else if (train->parsed()) {
    result = usr::cli::cmd_train(c, usr::cli::parse_train_target(target));
  } else if (fit->parsed()) {
    result = usr::cli::cmd_fit_regression(c, usr::cli::parse_fit_mode(mode));
  } else if (bench->parsed()) {
    result = usr::cli::cmd_benchmark(c);
  } else if (agree->parsed()) {
    result = usr::cli::cmd_agreement(c);
  } else {
    result = usr::cli::cmd_report(c);
  }
  std::cout << result.summary;
  if (!result.summary.empty() && result.summary.back() != '\n') std::cout << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const usr::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return usr::exit_code_for(e.category());
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: malformed JSON: " << e.what() << '\n';
    return usr::exit_code_for(usr::ErrorCategory::kData);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
