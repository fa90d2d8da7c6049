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

#include "usr/combiner.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "usr/errors.hpp"
#include "usr/hashing.hpp"

namespace usr {

Normalizer Normalizer::fit(std::span<const QualityVector> rows) {
  if (rows.empty()) throw DegenerateInputError("normalizer needs at least one row");
  Normalizer norm;
  const auto n = static_cast<double>(rows.size());
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    double sum = 0.0;
    for (const auto& r : rows) sum += r[k];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& r : rows) ss += (r[k] - mean) * (r[k] - mean);
    const double sd = std::sqrt(ss / n);
    if (!(sd > 1e-12 * std::max(1.0, std::abs(mean)))) {
      throw DegenerateInputError(
          "zero variance in dimension '" +
          std::string(dimension_name(kQualityDimensions[k])) + "'");
    }
    norm.mean[k] = mean;
    norm.stddev[k] = sd;
  }
  return norm;
}

QualityVector Normalizer::apply(const QualityVector& qv) const {
  QualityVector z;
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    z[k] = (qv[k] - mean[k]) / stddev[k];
  }
  return z;
}

double RegressionModel::predict_normalized(const QualityVector& z) const {
  double y = intercept;
  for (std::size_t k = 0; k < kQualityCount; ++k) y += weights[k] * z[k];
  return y;
}

RegressionModel fit_regression(std::span<const RegressionRow> rows) {
  if (rows.size() < 6) {
    throw DegenerateInputError("regression needs at least 6 rows, got " +
                               std::to_string(rows.size()));
  }
  std::vector<QualityVector> inputs;
  inputs.reserve(rows.size());
  for (const auto& r : rows) inputs.push_back(r.qualities);

  RegressionModel model;
  model.normalizer = Normalizer::fit(inputs);

  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd x(n, kQualityCount + 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto z = model.normalizer.apply(inputs[i]);
    x(i, 0) = 1.0;
    for (std::size_t k = 0; k < kQualityCount; ++k) x(i, k + 1) = z[k];
    y(i) = rows[i].overall;
  }
  const double y_mean = y.mean();
  if ((y.array() - y_mean).abs().maxCoeff() == 0.0) {
    throw DegenerateInputError("overall target has zero variance");
  }
  const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
  model.intercept = beta(0);
  for (std::size_t k = 0; k < kQualityCount; ++k) model.weights[k] = beta(k + 1);
  return model;
}

double predict(const RegressionModel& model, const QualityVector& qv) {
  return model.predict_normalized(model.normalizer.apply(qv));
}

std::array<double, kQualityCount> weight_profile(const RegressionModel& model) {
  const double max_w = *std::max_element(model.weights.begin(), model.weights.end());
  std::array<double, kQualityCount> out{};
  double sum = 0.0;
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    out[k] = std::exp(model.weights[k] - max_w);
    sum += out[k];
  }
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<RegressionRow> mean_rating_rows(const AnnotatedDataset& dataset,
                                            bool include_ground_truth) {
  std::unordered_map<std::string, std::vector<const QualityAnnotation*>> by_example;
  for (const auto& ann : dataset.annotations) {
    by_example[ann.example_id].push_back(&ann);
  }
  std::vector<RegressionRow> rows;
  for (const auto& ex : dataset.examples) {
    if (!include_ground_truth && ex.is_ground_truth()) continue;
    auto it = by_example.find(ex.example_id);
    if (it == by_example.end()) continue;
    const auto& anns = it->second;
    RegressionRow row;
    for (std::size_t k = 0; k < kQualityCount; ++k) {
      double s = 0.0;
      for (const auto* a : anns) s += a->rating(kQualityDimensions[k]);
      row.qualities[k] = s / static_cast<double>(anns.size());
    }
    double s = 0.0;
    for (const auto* a : anns) s += a->overall;
    row.overall = s / static_cast<double>(anns.size());
    rows.push_back(row);
  }
  return rows;
}

PerAnnotatorFit fit_per_annotator(const AnnotatedDataset& dataset,
                                  std::size_t min_rows) {
  std::map<std::string, std::vector<RegressionRow>> rows;
  for (const auto& ann : dataset.annotations) {
    RegressionRow row;
    for (std::size_t k = 0; k < kQualityCount; ++k) {
      row.qualities[k] = ann.rating(kQualityDimensions[k]);
    }
    row.overall = ann.overall;
    rows[ann.annotator_id].push_back(row);
  }
  PerAnnotatorFit fit;
  for (const auto& [annotator, annotator_rows] : rows) {
    if (annotator_rows.size() < min_rows) {
      fit.excluded[annotator] = "only " + std::to_string(annotator_rows.size()) +
                                " annotations (need " + std::to_string(min_rows) +
                                ")";
      continue;
    }
    try {
      auto model = fit_regression(annotator_rows);
      model.fingerprint = dataset_fingerprint(dataset) + ":" + annotator;
      fit.models.emplace(annotator, std::move(model));
    } catch (const DegenerateInputError& e) {
      fit.excluded[annotator] = e.what();
    }
  }
  return fit;
}

SubMetricMapping SubMetricMapping::topical_chat_default() {
  SubMetricMapping m;
  m.dims[0] = {"usr-mlm", Orientation::kAsIs};
  m.dims[1] = {"usr-mlm", Orientation::kAsIs};
  m.dims[2] = {"usr-dr-c", Orientation::kAsIs};
  m.dims[3] = {"usr-dr-c", Orientation::kAsIs};
  m.dims[4] = {"usr-dr-f", Orientation::kAsIs};
  return m;
}

SubMetricMapping SubMetricMapping::parse(std::string_view spec) {
  SubMetricMapping m = topical_chat_default();
  std::size_t start = 0;
  while (start <= spec.size()) {
    const auto end = std::min(spec.find(',', start), spec.size());
    const std::string_view item = spec.substr(start, end - start);
    start = end + 1;
    if (item.empty()) {
      if (end >= spec.size()) break;
      continue;
    }
    const auto eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0 || eq + 1 == item.size()) {
      throw ConfigError("mapping entry '" + std::string(item) +
                        "' is not <dimension>=<metric>");
    }
    const auto dim = parse_dimension(item.substr(0, eq));
    if (dim == QualityDimension::kOverall) {
      throw ConfigError("mapping cannot target the overall dimension");
    }
    std::string_view metric = item.substr(eq + 1);
    MappedMetric mapped;
    if (metric.front() == '-') {
      mapped.orientation = Orientation::kNegated;
      metric.remove_prefix(1);
    }
    mapped.metric = std::string(metric);
    m.dims[static_cast<std::size_t>(dim)] = mapped;
    if (end >= spec.size()) break;
  }
  return m;
}

std::string SubMetricMapping::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    if (k > 0) out += ',';
    out += dimension_name(kQualityDimensions[k]);
    out += '=';
    if (dims[k].orientation == Orientation::kNegated) out += '-';
    out += dims[k].metric;
  }
  return out;
}

std::vector<std::string> SubMetricMapping::metric_names() const {
  std::vector<std::string> out;
  for (const auto& d : dims) {
    if (std::find(out.begin(), out.end(), d.metric) == out.end()) {
      out.push_back(d.metric);
    }
  }
  return out;
}

QualityVector assemble_quality_vector(const SubMetricMapping& mapping,
                                      const ExampleScores& scores) {
  QualityVector qv;
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    const auto& m = mapping.dims[k];
    auto it = scores.find(m.metric);
    if (it == scores.end() || !std::isfinite(it->second)) {
      throw IncompleteInputError(
          "missing sub-metric '" + m.metric + "' for dimension '" +
          std::string(dimension_name(kQualityDimensions[k])) + "'");
    }
    qv[k] = m.orientation == Orientation::kNegated ? -it->second : it->second;
  }
  return qv;
}

NormStats parse_norm_stats(std::string_view name) {
  if (name == "batch") return NormStats::kBatch;
  if (name == "frozen") return NormStats::kFrozen;
  throw ConfigError("unknown --norm-stats value '" + std::string(name) +
                    "' (expected batch or frozen)");
}

double usr_score(const RegressionModel& model, const SubMetricMapping& mapping,
                 const ExampleScores& scores, const Normalizer& input_stats) {
  return model.predict_normalized(
      input_stats.apply(assemble_quality_vector(mapping, scores)));
}

std::vector<double> usr_scores(const RegressionModel& model,
                               const SubMetricMapping& mapping,
                               std::span<const ExampleScores> batch,
                               NormStats stats) {
  std::vector<QualityVector> vectors;
  vectors.reserve(batch.size());
  for (const auto& s : batch) vectors.push_back(assemble_quality_vector(mapping, s));
  const Normalizer norm =
      stats == NormStats::kBatch ? Normalizer::fit(vectors) : model.normalizer;
  std::vector<double> out;
  out.reserve(batch.size());
  for (const auto& qv : vectors) out.push_back(model.predict_normalized(norm.apply(qv)));
  return out;
}

RegressionModel refit_on_submetrics(const SubMetricMapping& mapping,
                                    std::span<const ExampleScores> batch,
                                    std::span<const double> overall) {
  if (batch.size() != overall.size()) {
    throw ArgumentError("refit_on_submetrics: batch and target sizes differ");
  }
  std::vector<RegressionRow> rows;
  rows.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    rows.push_back({assemble_quality_vector(mapping, batch[i]), overall[i]});
  }
  return fit_regression(rows);
}

nlohmann::ordered_json regression_model_to_json(const RegressionModel& model) {
  nlohmann::ordered_json j;
  nlohmann::ordered_json dims = nlohmann::ordered_json::array();
  for (auto d : kQualityDimensions) dims.push_back(std::string(dimension_name(d)));
  j["dimensions"] = dims;
  j["weights"] = model.weights;
  j["intercept"] = model.intercept;
  j["normalizer"] = {{"mean", model.normalizer.mean},
                     {"std", model.normalizer.stddev}};
  j["fingerprint"] = model.fingerprint;
  return j;
}

RegressionModel regression_model_from_json(const nlohmann::json& j) {
  RegressionModel m;
  try {
    m.weights = j.at("weights").get<std::array<double, kQualityCount>>();
    m.intercept = j.at("intercept").get<double>();
    m.normalizer.mean =
        j.at("normalizer").at("mean").get<std::array<double, kQualityCount>>();
    m.normalizer.stddev =
        j.at("normalizer").at("std").get<std::array<double, kQualityCount>>();
    m.fingerprint = j.value("fingerprint", "");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed regression model: ") + e.what());
  }
  for (std::size_t k = 0; k < kQualityCount; ++k) {
    if (!(m.normalizer.stddev[k] > 0.0)) {
      throw ParseError("regression model has non-positive std for dimension '" +
                       std::string(dimension_name(kQualityDimensions[k])) + "'");
    }
  }
  return m;
}

}  // namespace usr
