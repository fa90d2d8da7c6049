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

#include "usr/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <map>
#include <optional>
#include <sstream>

#include "usr/errors.hpp"

namespace usr {
namespace {

constexpr std::array<std::string_view, 7> kWordOverlapOrder = {
    "f1", "bleu-1", "bleu-2", "bleu-3", "bleu-4", "meteor", "rouge-l"};
constexpr std::array<std::string_view, 5> kEmbeddingOrder = {
    "greedy-matching", "embedding-average", "vector-extrema", "skip-thought",
    "bertscore"};
constexpr std::array<std::string_view, 4> kReferenceFreeOrder = {
    "usr-mlm", "usr-dr-c", "usr-dr-f", "usr"};

template <std::size_t N>
std::optional<std::size_t> position_in(const std::array<std::string_view, N>& order,
                                       std::string_view metric) {
  for (std::size_t i = 0; i < N; ++i) {
    if (order[i] == metric) return i;
  }
  return std::nullopt;
}

std::size_t position_of(std::string_view metric) {
  if (auto p = position_in(kWordOverlapOrder, metric)) return *p;
  if (metric.rfind("bertscore", 0) == 0) return kEmbeddingOrder.size() - 1;
  if (auto p = position_in(kEmbeddingOrder, metric)) return *p;
  if (auto p = position_in(kReferenceFreeOrder, metric)) return *p;
  return 100;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

struct Row {
  const CorrelationReport* turn = nullptr;
  const CorrelationReport* system = nullptr;
};

// quality -> metric (in report order) -> turn/system cells
using Grid = std::map<QualityDimension, std::vector<std::pair<std::string, Row>>>;

Grid make_grid(const std::vector<CorrelationReport>& reports) {
  Grid grid;
  const auto metrics = ordered_metrics(reports);
  std::map<QualityDimension, std::map<std::string, Row>> cells;
  for (const auto& r : reports) {
    auto& row = cells[r.quality][r.metric];
    (r.level == CorrelationLevel::kTurn ? row.turn : row.system) = &r;
  }
  for (const auto& [q, by_metric] : cells) {
    for (const auto& m : metrics) {
      auto it = by_metric.find(m);
      if (it != by_metric.end()) grid[q].emplace_back(m, it->second);
    }
  }
  return grid;
}

std::string text_cell(const CorrelationReport* r, bool spearman_col) {
  if (r == nullptr) return "-";
  const double v = spearman_col ? r->spearman : r->pearson;
  const bool sig = spearman_col ? r->spearman_significant() : r->pearson_significant();
  return fmt(v) + (sig ? "" : "*");
}

std::string md_cell(const CorrelationReport* r, bool spearman_col) {
  if (r == nullptr) return "-";
  const double v = spearman_col ? r->spearman : r->pearson;
  const bool sig = spearman_col ? r->spearman_significant() : r->pearson_significant();
  return sig ? fmt(v) : "_" + fmt(v) + "_";
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string render_text(const std::vector<CorrelationReport>& reports) {
  std::ostringstream out;
  out << pad("Metric", 24) << pad("Turn-Spearman", 15) << pad("Turn-Pearson", 15)
      << pad("Sys-Spearman", 15) << "Sys-Pearson\n";
  out << "(* marks p > 0.05)\n";
  for (const auto& [quality, rows] : make_grid(reports)) {
    out << "\n[" << dimension_name(quality) << "]\n";
    std::optional<MetricFamily> family;
    for (const auto& [metric, row] : rows) {
      const auto f = metric_family(metric);
      if (!family || *family != f) {
        out << "-- " << family_title(f) << " --\n";
        family = f;
      }
      out << pad("  " + metric, 24) << pad(text_cell(row.turn, true), 15)
          << pad(text_cell(row.turn, false), 15)
          << pad(text_cell(row.system, true), 15)
          << text_cell(row.system, false) << '\n';
    }
  }
  return out.str();
}

std::string render_markdown(const std::vector<CorrelationReport>& reports) {
  std::ostringstream out;
  const char* header =
      "| Metric | Turn Spearman | Turn Pearson | System Spearman | System Pearson |\n"
      "|---|---|---|---|---|\n";
  out << "# Correlation with human judgments\n\n"
      << "Values with p > 0.05 are italicized.\n";
  const auto grid = make_grid(reports);
  if (grid.empty()) out << '\n' << header;
  for (const auto& [quality, rows] : grid) {
    out << "\n## " << dimension_name(quality) << "\n\n" << header;
    std::optional<MetricFamily> family;
    for (const auto& [metric, row] : rows) {
      const auto f = metric_family(metric);
      if (!family || *family != f) {
        out << "| **" << family_title(f) << "** | | | | |\n";
        family = f;
      }
      out << "| " << metric << " | " << md_cell(row.turn, true) << " | "
          << md_cell(row.turn, false) << " | " << md_cell(row.system, true)
          << " | " << md_cell(row.system, false) << " |\n";
    }
  }
  return out.str();
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "text-table") return ReportFormat::kTextTable;
  if (name == "json") return ReportFormat::kJson;
  if (name == "markdown") return ReportFormat::kMarkdown;
  throw ConfigError("unknown report format '" + std::string(name) +
                    "' (expected text-table, json or markdown)");
}

std::string_view report_format_extension(ReportFormat format) {
  switch (format) {
    case ReportFormat::kTextTable:
      return "txt";
    case ReportFormat::kJson:
      return "json";
    case ReportFormat::kMarkdown:
      return "md";
  }
  return "txt";
}

MetricFamily metric_family(std::string_view metric) {
  if (position_in(kWordOverlapOrder, metric)) return MetricFamily::kWordOverlap;
  if (position_in(kEmbeddingOrder, metric) || metric.rfind("bertscore", 0) == 0) {
    return MetricFamily::kEmbedding;
  }
  if (position_in(kReferenceFreeOrder, metric)) return MetricFamily::kReferenceFree;
  return MetricFamily::kOther;
}

std::string_view family_title(MetricFamily family) {
  switch (family) {
    case MetricFamily::kWordOverlap:
      return "Word-Overlap Metrics";
    case MetricFamily::kEmbedding:
      return "Embedding-Based Metrics";
    case MetricFamily::kReferenceFree:
      return "Reference-Free Metrics";
    case MetricFamily::kOther:
      return "Other Metrics";
  }
  return "Other Metrics";
}

bool metric_order_less(std::string_view a, std::string_view b) {
  const auto fa = metric_family(a);
  const auto fb = metric_family(b);
  if (fa != fb) return fa < fb;
  const auto pa = position_of(a);
  const auto pb = position_of(b);
  if (pa != pb) return pa < pb;
  return a < b;
}

std::vector<std::string> ordered_metrics(
    const std::vector<CorrelationReport>& reports) {
  std::vector<std::string> out;
  for (const auto& r : reports) {
    if (std::find(out.begin(), out.end(), r.metric) == out.end()) {
      out.push_back(r.metric);
    }
  }
  std::sort(out.begin(), out.end(), [](const std::string& a, const std::string& b) {
    return metric_order_less(a, b);
  });
  return out;
}

nlohmann::ordered_json report_to_json(const CorrelationReport& r) {
  nlohmann::ordered_json j;
  j["metric"] = r.metric;
  j["quality"] = std::string(dimension_name(r.quality));
  j["level"] = std::string(level_name(r.level));
  j["spearman"] = r.spearman;
  j["pearson"] = r.pearson;
  j["p_spearman"] = r.p_spearman;
  j["p_pearson"] = r.p_pearson;
  j["n"] = r.n;
  j["spearman_significant"] = r.spearman_significant();
  j["pearson_significant"] = r.pearson_significant();
  return j;
}

CorrelationReport report_from_json(const nlohmann::json& j) {
  CorrelationReport r;
  try {
    r.metric = j.at("metric").get<std::string>();
    r.quality = parse_dimension(j.at("quality").get<std::string>());
    r.level = parse_level(j.at("level").get<std::string>());
    r.spearman = j.at("spearman").get<double>();
    r.pearson = j.at("pearson").get<double>();
    r.p_spearman = j.at("p_spearman").get<double>();
    r.p_pearson = j.at("p_pearson").get<double>();
    r.n = j.at("n").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed correlation report: ") + e.what());
  }
  return r;
}

std::vector<CorrelationReport> reports_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw ParseError("report JSON must be an array");
  std::vector<CorrelationReport> out;
  for (const auto& item : j) out.push_back(report_from_json(item));
  return out;
}

std::string render_report(const std::vector<CorrelationReport>& reports,
                          ReportFormat format) {
  std::vector<CorrelationReport> sorted = reports;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const CorrelationReport& a, const CorrelationReport& b) {
                     if (a.metric != b.metric) {
                       return metric_order_less(a.metric, b.metric);
                     }
                     if (a.quality != b.quality) return a.quality < b.quality;
                     return a.level < b.level;
                   });
  switch (format) {
    case ReportFormat::kJson: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& r : sorted) arr.push_back(report_to_json(r));
      return arr.dump(2) + "\n";
    }
    case ReportFormat::kMarkdown:
      return render_markdown(sorted);
    case ReportFormat::kTextTable:
      break;
  }
  return render_text(sorted);
}

std::string render_agreement(const std::vector<Agreement>& rows,
                             ReportFormat format) {
  std::ostringstream out;
  switch (format) {
    case ReportFormat::kJson: {
      nlohmann::ordered_json arr = nlohmann::ordered_json::array();
      for (const auto& a : rows) {
        arr.push_back({{"quality", std::string(dimension_name(a.quality))},
                       {"spearman", a.spearman},
                       {"pearson", a.pearson},
                       {"pairs", a.pairs}});
      }
      return arr.dump(2) + "\n";
    }
    case ReportFormat::kMarkdown:
      out << "| Quality | Spearman | Pearson | Pairs |\n|---|---|---|---|\n";
      for (const auto& a : rows) {
        out << "| " << dimension_name(a.quality) << " | " << fmt(a.spearman)
            << " | " << fmt(a.pearson) << " | " << a.pairs << " |\n";
      }
      return out.str();
    case ReportFormat::kTextTable:
      break;
  }
  out << pad("Quality", 20) << pad("Spearman", 10) << pad("Pearson", 10)
      << "Pairs\n";
  for (const auto& a : rows) {
    out << pad(std::string(dimension_name(a.quality)), 20)
        << pad(fmt(a.spearman), 10) << pad(fmt(a.pearson), 10) << a.pairs << '\n';
  }
  return out.str();
}

}  // namespace usr
