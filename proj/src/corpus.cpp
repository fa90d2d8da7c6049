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

#include "usr/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "json.hpp"
#include "usr/errors.hpp"
#include "usr/hashing.hpp"

namespace usr {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

TokenSequence DialogContext::flattened() const {
  TokenSequence out;
  out.reserve(token_count());
  for (const auto& turn : turns) out.insert(out.end(), turn.begin(), turn.end());
  return out;
}

std::size_t DialogContext::token_count() const {
  std::size_t n = 0;
  for (const auto& turn : turns) n += turn.size();
  return n;
}

std::string_view dimension_name(QualityDimension dim) {
  switch (dim) {
    case QualityDimension::kUnderstandable:
      return "understandable";
    case QualityDimension::kNatural:
      return "natural";
    case QualityDimension::kMaintainsContext:
      return "maintains_context";
    case QualityDimension::kInteresting:
      return "interesting";
    case QualityDimension::kUsesKnowledge:
      return "uses_knowledge";
    case QualityDimension::kOverall:
      return "overall";
  }
  return "?";
}

QualityDimension parse_dimension(std::string_view name) {
  for (auto dim : kAllDimensions) {
    if (dimension_name(dim) == name) return dim;
  }
  throw ArgumentError("unknown quality dimension '" + std::string(name) + "'");
}

RatingRange rating_range(QualityDimension dim) {
  switch (dim) {
    case QualityDimension::kUnderstandable:
    case QualityDimension::kUsesKnowledge:
      return {0, 1};
    case QualityDimension::kNatural:
    case QualityDimension::kMaintainsContext:
    case QualityDimension::kInteresting:
      return {1, 3};
    case QualityDimension::kOverall:
      return {1, 5};
  }
  return {0, 0};
}

int QualityAnnotation::rating(QualityDimension dim) const {
  switch (dim) {
    case QualityDimension::kUnderstandable:
      return understandable;
    case QualityDimension::kNatural:
      return natural;
    case QualityDimension::kMaintainsContext:
      return maintains_context;
    case QualityDimension::kInteresting:
      return interesting;
    case QualityDimension::kUsesKnowledge:
      return uses_knowledge;
    case QualityDimension::kOverall:
      return overall;
  }
  return 0;
}

void QualityAnnotation::set_rating(QualityDimension dim, int value) {
  switch (dim) {
    case QualityDimension::kUnderstandable:
      understandable = value;
      break;
    case QualityDimension::kNatural:
      natural = value;
      break;
    case QualityDimension::kMaintainsContext:
      maintains_context = value;
      break;
    case QualityDimension::kInteresting:
      interesting = value;
      break;
    case QualityDimension::kUsesKnowledge:
      uses_knowledge = value;
      break;
    case QualityDimension::kOverall:
      overall = value;
      break;
  }
}

void AnnotatedDataset::validate() const {
  std::set<std::string_view> ids;
  for (const auto& ex : examples) {
    if (!ids.insert(ex.example_id).second) {
      throw IntegrityError("duplicate example_id '" + ex.example_id + "'");
    }
    if (ex.context.turns.empty()) {
      throw IntegrityError("example '" + ex.example_id +
                           "' has an empty dialog context");
    }
    if (!ex.context.speaker_tags.empty() &&
        ex.context.speaker_tags.size() != ex.context.turns.size()) {
      throw IntegrityError("example '" + ex.example_id +
                           "': speaker tags do not match turn count");
    }
  }
  std::set<std::pair<std::string_view, std::string_view>> pairs;
  for (const auto& ann : annotations) {
    if (!ids.contains(ann.example_id)) {
      throw IntegrityError("annotation by '" + ann.annotator_id +
                           "' references unknown example_id '" +
                           ann.example_id + "'");
    }
    if (!pairs.emplace(ann.example_id, ann.annotator_id).second) {
      throw IntegrityError("duplicate annotation for (" + ann.example_id +
                           ", " + ann.annotator_id + ")");
    }
    for (auto dim : kAllDimensions) {
      const auto range = rating_range(dim);
      const int v = ann.rating(dim);
      if (v < range.min || v > range.max) {
        throw RangeError("annotation (" + ann.example_id + ", " +
                         ann.annotator_id + "): " +
                         std::string(dimension_name(dim)) + "=" +
                         std::to_string(v) + " outside [" +
                         std::to_string(range.min) + "," +
                         std::to_string(range.max) + "]");
      }
    }
  }
}

const DialogExample* AnnotatedDataset::find(std::string_view example_id) const {
  for (const auto& ex : examples) {
    if (ex.example_id == example_id) return &ex;
  }
  return nullptr;
}

std::vector<const QualityAnnotation*> AnnotatedDataset::annotations_for(
    std::string_view example_id) const {
  std::vector<const QualityAnnotation*> out;
  for (const auto& ann : annotations) {
    if (ann.example_id == example_id) out.push_back(&ann);
  }
  return out;
}

std::vector<std::string> AnnotatedDataset::annotator_ids() const {
  std::set<std::string> ids;
  for (const auto& ann : annotations) ids.insert(ann.annotator_id);
  return {ids.begin(), ids.end()};
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "canonical-jsonl") return DatasetFormat::kCanonicalJsonl;
  if (name == "topical-chat") return DatasetFormat::kTopicalChat;
  if (name == "persona-chat") return DatasetFormat::kPersonaChat;
  throw ConfigError("unknown dataset format '" + std::string(name) +
                    "' (expected canonical-jsonl, topical-chat or "
                    "persona-chat)");
}

std::string_view dataset_format_name(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::kCanonicalJsonl:
      return "canonical-jsonl";
    case DatasetFormat::kTopicalChat:
      return "topical-chat";
    case DatasetFormat::kPersonaChat:
      return "persona-chat";
  }
  return "?";
}

namespace {

std::string where(std::size_t line) {
  return "line " + std::to_string(line) + ": ";
}

const json& require(const json& obj, const char* key, std::size_t line) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(where(line) + "missing field \"" + key + "\"");
  }
  return *it;
}

std::string require_string(const json& obj, const char* key,
                           std::size_t line) {
  const auto& v = require(obj, key, line);
  if (!v.is_string()) {
    throw ParseError(where(line) + "field \"" + key + "\" must be a string");
  }
  return v.get<std::string>();
}

int require_rating(const json& obj, const char* key, std::size_t line) {
  const auto& v = require(obj, key, line);
  if (v.is_number_integer()) return v.get<int>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<int>(d);
  }
  throw ParseError(where(line) + "field \"" + key + "\" must be an integer");
}

DialogExample parse_example_record(const json& rec, std::size_t line) {
  DialogExample ex;
  ex.example_id = require_string(rec, "example_id", line);
  const auto& context = require(rec, "context", line);
  if (!context.is_array()) {
    throw ParseError(where(line) + "field \"context\" must be an array");
  }
  for (const auto& turn : context) {
    if (!turn.is_string()) {
      throw ParseError(where(line) + "context turns must be strings");
    }
    ex.context.turns.push_back(normalize_tokens(turn.get<std::string>()));
  }
  if (auto it = rec.find("speakers"); it != rec.end() && !it->is_null()) {
    for (const auto& tag : *it) ex.context.speaker_tags.push_back(tag);
  }
  ex.fact = normalize_tokens(require_string(rec, "fact", line));
  ex.response = normalize_tokens(require_string(rec, "response", line));
  if (auto it = rec.find("reference"); it != rec.end() && !it->is_null()) {
    if (!it->is_string()) {
      throw ParseError(where(line) + "field \"reference\" must be a string");
    }
    ex.reference = normalize_tokens(it->get<std::string>());
  }
  ex.system_id = require_string(rec, "system_id", line);
  return ex;
}

QualityAnnotation parse_annotation_record(const json& rec, std::size_t line) {
  QualityAnnotation ann;
  ann.example_id = require_string(rec, "example_id", line);
  ann.annotator_id = require_string(rec, "annotator_id", line);
  for (auto dim : kAllDimensions) {
    const std::string key(dimension_name(dim));
    ann.set_rating(dim, require_rating(rec, key.c_str(), line));
  }
  return ann;
}

std::string slugify(std::string_view name) {
  std::string out;
  bool dash = false;
  for (char ch : name) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      if (dash && !out.empty()) out.push_back('-');
      out.push_back(static_cast<char>(std::tolower(c)));
      dash = false;
    } else if (c == '.') {
      out.push_back('.');
      dash = false;
    } else {
      dash = true;
    }
  }
  return out;
}

bool names_ground_truth(std::string_view model) {
  const std::string s = slugify(model);
  return s.find("ground-truth") != std::string::npos ||
         s.find("groundtruth") != std::string::npos ||
         s.rfind("original", 0) == 0;
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::string cur;
  for (char c : text) {
    if (c == '\n') {
      lines.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  lines.push_back(std::move(cur));
  return lines;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isspace(static_cast<unsigned char>(c));
  });
}

std::string strip_persona_prefix(std::string_view line) {
  constexpr std::string_view kPrefix = "your persona:";
  std::size_t start = 0;
  while (start < line.size() &&
         std::isspace(static_cast<unsigned char>(line[start]))) {
    ++start;
  }
  line.remove_prefix(start);
  if (line.substr(0, kPrefix.size()) == kPrefix) line.remove_prefix(kPrefix.size());
  return std::string(line);
}

// Fact text: persona lines lose their "your persona:" prefix and are joined
// into a single fact.
TokenSequence normalize_fact(std::string_view text) {
  TokenSequence fact;
  for (const auto& line : split_lines(text)) {
    auto toks = normalize_tokens(strip_persona_prefix(line));
    fact.insert(fact.end(), toks.begin(), toks.end());
  }
  return fact;
}

const json* find_any(const json& obj, const std::vector<const char*>& keys) {
  for (const char* key : keys) {
    auto it = obj.find(key);
    if (it != obj.end()) return &*it;
  }
  return nullptr;
}

}  // namespace

AnnotatedDataset parse_canonical_jsonl(std::istream& in) {
  AnnotatedDataset ds;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(where(lineno) + "malformed JSON: " + e.what());
    }
    if (!rec.is_object()) {
      throw ParseError(where(lineno) + "record must be a JSON object");
    }
    const std::string kind = require_string(rec, "kind", lineno);
    try {
      if (kind == "example") {
        ds.examples.push_back(parse_example_record(rec, lineno));
      } else if (kind == "annotation") {
        ds.annotations.push_back(parse_annotation_record(rec, lineno));
      } else {
        throw ParseError(where(lineno) + "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(where(lineno) + e.what());
    }
  }
  ds.validate();
  return ds;
}

AnnotatedDataset parse_usr_annotations(std::string_view json_text,
                                       std::string_view dataset_tag) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed annotation JSON: ") + e.what());
  }
  if (!root.is_array()) {
    throw ParseError("annotation file must hold a JSON array of contexts");
  }
  struct DimKeys {
    QualityDimension dim;
    std::vector<const char*> keys;
  };
  const std::vector<DimKeys> dim_keys = {
      {QualityDimension::kUnderstandable, {"Understandable"}},
      {QualityDimension::kNatural, {"Natural"}},
      {QualityDimension::kMaintainsContext, {"Maintains Context"}},
      {QualityDimension::kInteresting, {"Engaging", "Interesting"}},
      {QualityDimension::kUsesKnowledge, {"Uses Knowledge"}},
      {QualityDimension::kOverall, {"Overall", "Overall Quality"}},
  };

  AnnotatedDataset ds;
  for (std::size_t ci = 0; ci < root.size(); ++ci) {
    const auto& ctx = root[ci];
    const std::string rec = "record " + std::to_string(ci) + ": ";
    if (!ctx.is_object() || !ctx.contains("context") ||
        !ctx.contains("responses")) {
      throw ParseError(rec + "expected {\"context\", \"responses\"}");
    }
    DialogContext context;
    for (const auto& line : split_lines(ctx["context"].get<std::string>())) {
      if (!is_blank(line)) context.turns.push_back(normalize_tokens(line));
    }
    if (context.turns.empty()) {
      throw ParseError(rec + "empty dialog context");
    }
    TokenSequence fact;
    if (auto it = ctx.find("fact"); it != ctx.end() && it->is_string()) {
      fact = normalize_fact(it->get<std::string>());
    }

    const auto& responses = ctx["responses"];
    std::optional<TokenSequence> reference;
    for (const auto& resp : responses) {
      if (resp.contains("model") &&
          names_ground_truth(resp["model"].get<std::string>())) {
        reference = normalize_tokens(resp.value("response", ""));
      }
    }

    for (std::size_t ri = 0; ri < responses.size(); ++ri) {
      const auto& resp = responses[ri];
      const std::string rrec = rec + "response " + std::to_string(ri) + ": ";
      if (!resp.contains("response") || !resp["response"].is_string()) {
        throw ParseError(rrec + "missing \"response\" text");
      }
      const std::string model = resp.value("model", "system-" + std::to_string(ri));
      DialogExample ex;
      ex.system_id = names_ground_truth(model) ? std::string(kGroundTruthSystem)
                                               : slugify(model);
      ex.example_id = std::string(dataset_tag) + "-" + std::to_string(ci) +
                      "-" + ex.system_id;
      ex.context = context;
      ex.fact = fact;
      ex.response = normalize_tokens(resp["response"].get<std::string>());
      ex.reference = reference;

      // Ratings are parallel arrays, one entry per annotator slot.
      std::size_t n_annot = 0;
      for (const auto& dk : dim_keys) {
        const json* arr = find_any(resp, dk.keys);
        if (arr == nullptr) continue;
        if (!arr->is_array()) {
          throw ParseError(rrec + "ratings must be arrays");
        }
        n_annot = std::max(n_annot, arr->size());
      }
      std::vector<QualityAnnotation> anns(n_annot);
      const json* names = find_any(resp, {"annotators", "annotator_ids"});
      for (std::size_t a = 0; a < n_annot; ++a) {
        anns[a].example_id = ex.example_id;
        anns[a].annotator_id =
            (names != nullptr && a < names->size())
                ? (*names)[a].get<std::string>()
                : "slot-" + std::to_string(a + 1);
      }
      for (const auto& dk : dim_keys) {
        const json* arr = find_any(resp, dk.keys);
        if (arr == nullptr || arr->size() != n_annot) {
          throw ParseError(rrec + "missing or ragged ratings for " +
                           std::string(dimension_name(dk.dim)));
        }
        for (std::size_t a = 0; a < n_annot; ++a) {
          const auto& v = (*arr)[a];
          double d = v.is_number() ? v.get<double>() : std::nan("");
          if (v.is_string()) d = std::stod(v.get<std::string>());
          if (!std::isfinite(d) || std::floor(d) != d) {
            throw ParseError(rrec + "non-integer rating for " +
                             std::string(dimension_name(dk.dim)));
          }
          anns[a].set_rating(dk.dim, static_cast<int>(d));
        }
      }
      ds.examples.push_back(std::move(ex));
      for (auto& a : anns) ds.annotations.push_back(std::move(a));
    }
  }
  ds.validate();
  return ds;
}

AnnotatedDataset parse_topical_chat_dialogs(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed Topical-Chat JSON: ") + e.what());
  }
  if (!root.is_object()) {
    throw ParseError("Topical-Chat dialogs must be a JSON object keyed by "
                     "conversation id");
  }
  AnnotatedDataset ds;
  for (const auto& [conv_id, conv] : root.items()) {
    if (!conv.contains("content") || !conv["content"].is_array()) {
      throw ParseError("conversation " + conv_id + ": missing \"content\"");
    }
    DialogContext history;
    const auto& content = conv["content"];
    for (std::size_t i = 0; i < content.size(); ++i) {
      const auto& msg = content[i];
      if (!msg.contains("message") || !msg["message"].is_string()) {
        throw ParseError("conversation " + conv_id + " turn " +
                         std::to_string(i) + ": missing \"message\"");
      }
      auto tokens = normalize_tokens(msg["message"].get<std::string>());
      const std::string agent = msg.value("agent", "");
      if (!history.turns.empty()) {
        DialogExample ex;
        ex.example_id = conv_id + "-" + std::to_string(i);
        ex.context = history;
        if (auto it = msg.find("knowledge"); it != msg.end() && it->is_string()) {
          ex.fact = normalize_fact(it->get<std::string>());
        }
        ex.response = tokens;
        ex.system_id = std::string(kGroundTruthSystem);
        ds.examples.push_back(std::move(ex));
      }
      history.turns.push_back(std::move(tokens));
      history.speaker_tags.push_back(agent);
    }
  }
  ds.validate();
  return ds;
}

AnnotatedDataset parse_convai2_dialogs(std::istream& in) {
  AnnotatedDataset ds;
  std::string line;
  std::size_t lineno = 0;
  std::size_t dialog = 0;
  DialogContext history;
  TokenSequence persona;
  int turn = 0;
  bool started = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (is_blank(line)) continue;
    std::size_t pos = 0;
    while (pos < line.size() && std::isdigit(static_cast<unsigned char>(line[pos]))) {
      ++pos;
    }
    if (pos == 0 || pos >= line.size() || line[pos] != ' ') {
      throw ParseError(where(lineno) + "expected '<index> <text>'");
    }
    const int index = std::stoi(line.substr(0, pos));
    std::string body = line.substr(pos + 1);
    if (index == 1 && started) {
      ++dialog;
      history = {};
      persona.clear();
      turn = 0;
    }
    started = true;
    if (body.rfind("your persona:", 0) == 0 ||
        body.rfind("partner's persona:", 0) == 0) {
      if (body.rfind("your persona:", 0) == 0) {
        auto toks = normalize_tokens(strip_persona_prefix(body));
        persona.insert(persona.end(), toks.begin(), toks.end());
      }
      continue;
    }
    const auto tab = body.find('\t');
    if (tab == std::string::npos) {
      throw ParseError(where(lineno) + "expected '<partner>\\t<response>'");
    }
    const auto tab2 = body.find('\t', tab + 1);
    const std::string partner = body.substr(0, tab);
    const std::string self =
        body.substr(tab + 1, tab2 == std::string::npos ? std::string::npos
                                                       : tab2 - tab - 1);
    history.turns.push_back(normalize_tokens(partner));
    DialogExample ex;
    ex.example_id = "pc-" + std::to_string(dialog) + "-" + std::to_string(turn++);
    ex.context = history;
    ex.fact = persona;
    ex.response = normalize_tokens(self);
    ex.system_id = std::string(kGroundTruthSystem);
    history.turns.push_back(ex.response);
    ds.examples.push_back(std::move(ex));
  }
  ds.validate();
  return ds;
}

AnnotatedDataset load_dataset(const std::filesystem::path& path,
                              DatasetFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw ParseError("cannot open dataset file '" + path.string() + "'");
  }
  if (format == DatasetFormat::kCanonicalJsonl) return parse_canonical_jsonl(in);

  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  const auto first = text.find_first_not_of(" \t\r\n");
  const char lead = first == std::string::npos ? '\0' : text[first];
  const std::string_view tag =
      format == DatasetFormat::kTopicalChat ? "tc" : "pc";
  if (lead == '[') return parse_usr_annotations(text, tag);
  if (format == DatasetFormat::kTopicalChat) {
    return parse_topical_chat_dialogs(text);
  }
  std::istringstream lines(text);
  return parse_convai2_dialogs(lines);
}

void write_canonical_jsonl(const AnnotatedDataset& dataset, std::ostream& out) {
  for (const auto& ex : dataset.examples) {
    ordered_json rec;
    rec["kind"] = "example";
    rec["example_id"] = ex.example_id;
    ordered_json turns = ordered_json::array();
    for (const auto& t : ex.context.turns) turns.push_back(join_tokens(t));
    rec["context"] = std::move(turns);
    if (!ex.context.speaker_tags.empty()) rec["speakers"] = ex.context.speaker_tags;
    rec["fact"] = join_tokens(ex.fact);
    rec["response"] = join_tokens(ex.response);
    rec["reference"] =
        ex.reference ? ordered_json(join_tokens(*ex.reference)) : ordered_json(nullptr);
    rec["system_id"] = ex.system_id;
    out << rec.dump() << '\n';
  }
  for (const auto& ann : dataset.annotations) {
    ordered_json rec;
    rec["kind"] = "annotation";
    rec["example_id"] = ann.example_id;
    rec["annotator_id"] = ann.annotator_id;
    for (auto dim : kAllDimensions) {
      rec[std::string(dimension_name(dim))] = ann.rating(dim);
    }
    out << rec.dump() << '\n';
  }
}

std::string to_canonical_jsonl(const AnnotatedDataset& dataset) {
  std::ostringstream out;
  write_canonical_jsonl(dataset, out);
  return out.str();
}

std::string dataset_fingerprint(const AnnotatedDataset& dataset) {
  return to_hex(fnv1a64(to_canonical_jsonl(dataset)));
}

}  // namespace usr
