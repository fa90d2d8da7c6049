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

#include "usr/benchmark.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <unordered_map>

#include "usr/errors.hpp"
#include "usr/overlap_metrics.hpp"

namespace usr {
namespace {

double aggregate(std::vector<double> values, HumanAggregation how) {
  if (how == HumanAggregation::kMean) {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
  }
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::optional<double> lookup(const ScoreTable::Row& row, const std::string& metric) {
  auto it = row.metrics.find(metric);
  if (it == row.metrics.end()) return std::nullopt;
  return it->second;
}

std::optional<double> lookup(const ScoreTable::Row& row, QualityDimension dim) {
  auto it = row.human.find(dim);
  if (it == row.human.end()) return std::nullopt;
  return it->second;
}

}  // namespace

ScoreTable ScoreTable::build(const AnnotatedDataset& dataset,
                             std::span<const MetricScore> scores,
                             HumanAggregation aggregation) {
  ScoreTable table;
  std::unordered_map<std::string, std::vector<const QualityAnnotation*>> anns;
  for (const auto& a : dataset.annotations) anns[a.example_id].push_back(&a);
  for (const auto& ex : dataset.examples) {
    table.add_example(ex.example_id, ex.system_id, ex.is_ground_truth());
    auto it = anns.find(ex.example_id);
    if (it == anns.end()) continue;
    for (auto dim : kAllDimensions) {
      std::vector<double> values;
      for (const auto* a : it->second) values.push_back(a->rating(dim));
      table.set_human(ex.example_id, dim, aggregate(std::move(values), aggregation));
    }
  }
  for (const auto& s : scores) {
    if (!table.index_.contains(s.example_id)) {
      throw IntegrityError("score for unknown example_id '" + s.example_id + "'");
    }
    if (s.value) table.set_metric(s.example_id, s.metric, *s.value);
  }
  return table;
}

void ScoreTable::add_example(std::string example_id, std::string system_id,
                             bool ground_truth) {
  if (index_.contains(example_id)) {
    throw IntegrityError("duplicate example_id '" + example_id + "' in score table");
  }
  index_.emplace(example_id, rows_.size());
  rows_.push_back({std::move(example_id), std::move(system_id), ground_truth, {}, {}});
}

ScoreTable::Row& ScoreTable::row(std::string_view example_id) {
  auto it = index_.find(example_id);
  if (it == index_.end()) {
    throw IntegrityError("unknown example_id '" + std::string(example_id) + "'");
  }
  return rows_[it->second];
}

void ScoreTable::set_metric(std::string_view example_id, const std::string& metric,
                            double value) {
  auto& r = row(example_id);
  if (!r.metrics.emplace(metric, value).second) {
    throw IntegrityError("duplicate score for (" + std::string(example_id) +
                         ", " + metric + ")");
  }
}

void ScoreTable::set_human(std::string_view example_id, QualityDimension dim,
                           double value) {
  row(example_id).human[dim] = value;
}

std::vector<std::string> ScoreTable::metric_names() const {
  std::set<std::string> names;
  for (const auto& r : rows_) {
    for (const auto& [m, v] : r.metrics) names.insert(m);
  }
  return {names.begin(), names.end()};
}

std::string_view level_name(CorrelationLevel level) {
  return level == CorrelationLevel::kTurn ? "turn" : "system";
}

CorrelationLevel parse_level(std::string_view name) {
  if (name == "turn") return CorrelationLevel::kTurn;
  if (name == "system") return CorrelationLevel::kSystem;
  throw ParseError("unknown correlation level '" + std::string(name) + "'");
}

CorrelationReport turn_level(const ScoreTable& table, const std::string& metric,
                             QualityDimension quality,
                             const BenchmarkOptions& options) {
  std::vector<double> x, y;
  for (const auto& r : table.rows()) {
    if (r.ground_truth && !options.include_ground_truth) continue;
    const auto m = lookup(r, metric);
    const auto h = lookup(r, quality);
    if (!m || !h) continue;
    x.push_back(*m);
    y.push_back(*h);
  }
  CorrelationReport rep;
  rep.metric = metric;
  rep.quality = quality;
  rep.level = CorrelationLevel::kTurn;
  rep.n = x.size();
  const auto s = spearman(x, y, options.turn_p_value);
  const auto p = pearson(x, y, options.turn_p_value);
  rep.spearman = s.coefficient;
  rep.p_spearman = s.p_value;
  rep.pearson = p.coefficient;
  rep.p_pearson = p.p_value;
  return rep;
}

CorrelationReport system_level(const ScoreTable& table, const std::string& metric,
                               QualityDimension quality,
                               const BenchmarkOptions& options) {
  struct Sums {
    double metric = 0.0;
    double human = 0.0;
    std::size_t n = 0;
  };
  std::map<std::string, Sums> systems;
  for (const auto& r : table.rows()) {
    if (r.ground_truth && !options.include_ground_truth) continue;
    const auto m = lookup(r, metric);
    const auto h = lookup(r, quality);
    if (!m || !h) continue;
    auto& s = systems[r.system_id];
    s.metric += *m;
    s.human += *h;
    ++s.n;
  }
  if (systems.size() < 3) {
    throw InsufficientDataError("system-level correlation for '" + metric +
                                "' needs at least 3 systems, got " +
                                std::to_string(systems.size()));
  }
  std::vector<double> x, y;
  for (const auto& [id, s] : systems) {
    x.push_back(s.metric / static_cast<double>(s.n));
    y.push_back(s.human / static_cast<double>(s.n));
  }
  CorrelationReport rep;
  rep.metric = metric;
  rep.quality = quality;
  rep.level = CorrelationLevel::kSystem;
  rep.n = x.size();
  const auto s = spearman(x, y, options.system_p_value);
  const auto p = pearson(x, y, options.system_p_value);
  rep.spearman = s.coefficient;
  rep.p_spearman = s.p_value;
  rep.pearson = p.coefficient;
  rep.p_pearson = p.p_value;
  return rep;
}

BenchmarkResult correlate_all(const ScoreTable& table,
                              const std::vector<std::string>& metrics,
                              std::span<const QualityDimension> qualities,
                              const BenchmarkOptions& options) {
  BenchmarkResult out;
  for (const auto& metric : metrics) {
    for (auto q : qualities) {
      for (auto level : {CorrelationLevel::kTurn, CorrelationLevel::kSystem}) {
        try {
          out.reports.push_back(level == CorrelationLevel::kTurn
                                    ? turn_level(table, metric, q, options)
                                    : system_level(table, metric, q, options));
        } catch (const Error& e) {
          if (e.category() != ErrorCategory::kData) throw;
          out.skipped.push_back({metric, q, level, e.what()});
        }
      }
    }
  }
  return out;
}

Agreement inter_annotator_agreement(const AnnotatedDataset& dataset,
                                    QualityDimension quality,
                                    std::size_t min_common) {
  std::map<std::string, std::map<std::string, double>> by_annotator;
  for (const auto& a : dataset.annotations) {
    by_annotator[a.annotator_id][a.example_id] = a.rating(quality);
  }
  Agreement out;
  out.quality = quality;
  double sum_s = 0.0, sum_p = 0.0;
  for (auto i = by_annotator.begin(); i != by_annotator.end(); ++i) {
    for (auto j = std::next(i); j != by_annotator.end(); ++j) {
      std::vector<double> x, y;
      for (const auto& [example, rating] : i->second) {
        auto it = j->second.find(example);
        if (it == j->second.end()) continue;
        x.push_back(rating);
        y.push_back(it->second);
      }
      if (x.size() < min_common) continue;
      try {
        const auto s = spearman(x, y);
        const auto p = pearson(x, y);
        sum_s += s.coefficient;
        sum_p += p.coefficient;
        ++out.pairs;
      } catch (const UndefinedCorrelationError&) {
      }
    }
  }
  if (out.pairs == 0) {
    throw InsufficientDataError(
        "no annotator pair shares " + std::to_string(min_common) +
        " non-constant ratings for '" + std::string(dimension_name(quality)) + "'");
  }
  out.spearman = sum_s / static_cast<double>(out.pairs);
  out.pearson = sum_p / static_cast<double>(out.pairs);
  return out;
}

TokenSequence most_frequent_tokens(const std::vector<DialogExample>& corpus,
                                   std::size_t k) {
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& ex : corpus) {
    for (const auto& t : ex.response) ++counts[t];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(),
                                                          counts.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  TokenSequence out;
  for (std::size_t i = 0; i < ranked.size() && i < k; ++i) {
    out.push_back(ranked[i].first);
  }
  return out;
}

double mean_constant_f1(const TokenSequence& constant,
                        std::span<const TokenSequence> references) {
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto& ref : references) {
    if (ref.empty()) continue;
    sum += f1_score(constant, ref);
    ++n;
  }
  if (n == 0) throw PreconditionError("mean_constant_f1: no non-empty references");
  return sum / static_cast<double>(n);
}

}  // namespace usr
