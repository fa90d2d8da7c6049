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

#ifndef USR_COMBINER_HPP_
#define USR_COMBINER_HPP_

#include <array>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "json.hpp"
#include "usr/corpus.hpp"

namespace usr {

inline constexpr std::size_t kQualityCount = 5;

// The five specific qualities in fixed order: understandable, natural,
// maintains_context, interesting, uses_knowledge.
inline constexpr std::array<QualityDimension, kQualityCount> kQualityDimensions = {
    QualityDimension::kUnderstandable, QualityDimension::kNatural,
    QualityDimension::kMaintainsContext, QualityDimension::kInteresting,
    QualityDimension::kUsesKnowledge,
};

struct QualityVector {
  std::array<double, kQualityCount> values{};

  double& operator[](std::size_t k) { return values[k]; }
  double operator[](std::size_t k) const { return values[k]; }
};

// Per-dimension z-score statistics (population standard deviation).
struct Normalizer {
  std::array<double, kQualityCount> mean{};
  std::array<double, kQualityCount> stddev{};

  // Throws DegenerateInputError naming the first zero-variance dimension.
  static Normalizer fit(std::span<const QualityVector> rows);
  QualityVector apply(const QualityVector& qv) const;
};

struct RegressionModel {
  std::array<double, kQualityCount> weights{};
  double intercept = 0.0;
  Normalizer normalizer;
  std::string fingerprint;  // of the data the model was fitted on

  // intercept + sum_k w_k * z_k for an already-normalized vector.
  double predict_normalized(const QualityVector& z) const;
};

struct RegressionRow {
  QualityVector qualities;
  double overall = 0.0;
};

// Ordinary least squares with intercept on z-scored inputs. Needs >= 6 rows,
// non-constant inputs and a non-constant target (DegenerateInputError).
RegressionModel fit_regression(std::span<const RegressionRow> rows);

// intercept + sum_k w_k (qv_k - mu_k) / sigma_k
double predict(const RegressionModel& model, const QualityVector& qv);

// Softmax over the raw weights.
std::array<double, kQualityCount> weight_profile(const RegressionModel& model);

// One row per annotated example: the mean rating of each dimension across
// its annotators.
std::vector<RegressionRow> mean_rating_rows(const AnnotatedDataset& dataset,
                                            bool include_ground_truth = true);

struct PerAnnotatorFit {
  std::map<std::string, RegressionModel> models;
  // annotator id -> reason it was left out (too few rows, constant ratings).
  std::map<std::string, std::string> excluded;
};

PerAnnotatorFit fit_per_annotator(const AnnotatedDataset& dataset,
                                  std::size_t min_rows = 6);

// How a sub-metric feeds a quality dimension.
enum class Orientation { kAsIs, kNegated };

struct MappedMetric {
  std::string metric;
  Orientation orientation = Orientation::kAsIs;
};

struct SubMetricMapping {
  std::array<MappedMetric, kQualityCount> dims;

  // MLM for understandable and natural, DR(x=c) for maintains context and
  // interesting, DR(x=f) for uses knowledge.
  static SubMetricMapping topical_chat_default();
  // "understandable=usr-mlm,natural=usr-mlm,...". A "-" prefix on the metric
  // negates it. Dimensions not named keep the default entry.
  static SubMetricMapping parse(std::string_view spec);
  std::string to_string() const;
  std::vector<std::string> metric_names() const;
};

using ExampleScores = std::unordered_map<std::string, double>;

// Throws IncompleteInputError when a mapped metric is absent.
QualityVector assemble_quality_vector(const SubMetricMapping& mapping,
                                      const ExampleScores& scores);

enum class NormStats {
  kBatch,   // z-score sub-metrics over the evaluated batch
  kFrozen,  // reuse the model's stored normalizer
};

NormStats parse_norm_stats(std::string_view name);

// USR for one example given the normalizer the sub-metric vector is scaled
// with.
double usr_score(const RegressionModel& model, const SubMetricMapping& mapping,
                 const ExampleScores& scores, const Normalizer& input_stats);

// USR for a whole batch. Every example needs all mapped metrics.
std::vector<double> usr_scores(const RegressionModel& model,
                               const SubMetricMapping& mapping,
                               std::span<const ExampleScores> batch,
                               NormStats stats = NormStats::kBatch);

// Alternative to reusing the human-rating fit: regress the target ratings
// directly on the mapped sub-metric vectors.
RegressionModel refit_on_submetrics(const SubMetricMapping& mapping,
                                    std::span<const ExampleScores> batch,
                                    std::span<const double> overall);

nlohmann::ordered_json regression_model_to_json(const RegressionModel& model);
RegressionModel regression_model_from_json(const nlohmann::json& j);

}  // namespace usr

#endif  // USR_COMBINER_HPP_
