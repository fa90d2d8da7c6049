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

#ifndef USR_BENCHMARK_HPP_
#define USR_BENCHMARK_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "usr/corpus.hpp"
#include "usr/scores.hpp"
#include "usr/stats.hpp"

namespace usr {

enum class HumanAggregation { kMean, kMedian };

// Paired metric and human data keyed by example id.
class ScoreTable {
 public:
  struct Row {
    std::string example_id;
    std::string system_id;
    bool ground_truth = false;
    std::map<std::string, double, std::less<>> metrics;
    std::map<QualityDimension, double> human;
  };

  // Human columns aggregate each example's annotations; metric columns come
  // from `scores` (missing values are left out). Scores for unknown examples
  // throw IntegrityError.
  static ScoreTable build(const AnnotatedDataset& dataset,
                          std::span<const MetricScore> scores,
                          HumanAggregation aggregation = HumanAggregation::kMean);

  void add_example(std::string example_id, std::string system_id,
                   bool ground_truth);
  // Duplicate (example, metric) keys throw IntegrityError.
  void set_metric(std::string_view example_id, const std::string& metric,
                  double value);
  void set_human(std::string_view example_id, QualityDimension dim,
                 double value);

  const std::vector<Row>& rows() const { return rows_; }
  std::vector<std::string> metric_names() const;

 private:
  Row& row(std::string_view example_id);

  std::vector<Row> rows_;
  std::map<std::string, std::size_t, std::less<>> index_;
};

enum class CorrelationLevel { kTurn, kSystem };

std::string_view level_name(CorrelationLevel level);
CorrelationLevel parse_level(std::string_view name);

struct CorrelationReport {
  std::string metric;
  QualityDimension quality = QualityDimension::kOverall;
  CorrelationLevel level = CorrelationLevel::kTurn;
  double spearman = 0.0;
  double pearson = 0.0;
  double p_spearman = 1.0;
  double p_pearson = 1.0;
  std::size_t n = 0;

  bool spearman_significant(double alpha = 0.05) const {
    return p_spearman <= alpha;
  }
  bool pearson_significant(double alpha = 0.05) const {
    return p_pearson <= alpha;
  }
};

struct BenchmarkOptions {
  bool include_ground_truth = false;
  PValueMethod turn_p_value = PValueMethod::kTApproximation;
  PValueMethod system_p_value = PValueMethod::kTApproximation;
};

// Per-example metric score against the example's aggregated human rating.
// Pairs with a missing score are dropped and n shrinks accordingly.
CorrelationReport turn_level(const ScoreTable& table, const std::string& metric,
                             QualityDimension quality,
                             const BenchmarkOptions& options = {});

// Per-system unweighted means of metric and human scores, correlated across
// systems. Fewer than three systems throws InsufficientDataError.
CorrelationReport system_level(const ScoreTable& table,
                               const std::string& metric,
                               QualityDimension quality,
                               const BenchmarkOptions& options = {});

struct SkippedCell {
  std::string metric;
  QualityDimension quality;
  CorrelationLevel level;
  std::string reason;
};

struct BenchmarkResult {
  std::vector<CorrelationReport> reports;
  std::vector<SkippedCell> skipped;
};

// Every (metric, quality, level) cell; undefined cells are listed as skipped.
BenchmarkResult correlate_all(const ScoreTable& table,
                              const std::vector<std::string>& metrics,
                              std::span<const QualityDimension> qualities,
                              const BenchmarkOptions& options = {});

struct Agreement {
  QualityDimension quality = QualityDimension::kOverall;
  double spearman = 0.0;
  double pearson = 0.0;
  std::size_t pairs = 0;  // annotator pairs averaged over
};

// Mean pairwise correlation between annotators over their commonly rated
// examples. Pairs sharing fewer than `min_common` examples, or with a constant
// rating vector, are left out. No usable pair throws InsufficientDataError.
Agreement inter_annotator_agreement(const AnnotatedDataset& dataset,
                                    QualityDimension quality,
                                    std::size_t min_common = 3);

// The k most frequent response tokens of the corpus, ties broken
// alphabetically.
TokenSequence most_frequent_tokens(const std::vector<DialogExample>& corpus,
                                   std::size_t k);

// Mean f1_score of one fixed response against each reference.
double mean_constant_f1(const TokenSequence& constant,
                        std::span<const TokenSequence> references);

}  // namespace usr

#endif  // USR_BENCHMARK_HPP_
