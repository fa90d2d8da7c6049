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

#ifndef USR_REPORT_HPP_
#define USR_REPORT_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "usr/benchmark.hpp"

namespace usr {

enum class ReportFormat { kTextTable, kJson, kMarkdown };

ReportFormat parse_report_format(std::string_view name);
std::string_view report_format_extension(ReportFormat format);

enum class MetricFamily { kWordOverlap, kEmbedding, kReferenceFree, kOther };

MetricFamily metric_family(std::string_view metric);
std::string_view family_title(MetricFamily family);

// Family first, then the conventional position inside the family (f1,
// bleu-1..4, meteor, rouge-l; greedy, average, extrema, bertscore-*; usr-mlm,
// usr-dr-c, usr-dr-f, usr), then name.
bool metric_order_less(std::string_view a, std::string_view b);

// Distinct metrics of `reports` in report order.
std::vector<std::string> ordered_metrics(const std::vector<CorrelationReport>& reports);

// Deterministic rendering. Text and markdown print one table per quality
// dimension with turn- and system-level Spearman/Pearson columns; values with
// p > 0.05 are flagged ('*' in text, italics in markdown). An empty report
// list renders the header only.
std::string render_report(const std::vector<CorrelationReport>& reports,
                          ReportFormat format);

nlohmann::ordered_json report_to_json(const CorrelationReport& report);
CorrelationReport report_from_json(const nlohmann::json& j);
std::vector<CorrelationReport> reports_from_json(const nlohmann::json& j);

std::string render_agreement(const std::vector<Agreement>& rows,
                             ReportFormat format);

}  // namespace usr

#endif  // USR_REPORT_HPP_
