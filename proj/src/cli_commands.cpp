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

#include "usr/cli_commands.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <exception>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "usr/backend_registry.hpp"
#include "usr/embedding.hpp"
#include "usr/embedding_metrics.hpp"
#include "usr/errors.hpp"
#include "usr/hashing.hpp"
#include "usr/overlap_metrics.hpp"
#include "usr/scores.hpp"
#include "usr/stats.hpp"
#include "usr/toy_backends.hpp"

namespace usr::cli {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kOverlapMetrics = {
    "f1", "bleu-1", "bleu-2", "bleu-3", "bleu-4", "meteor", "rouge-l"};
const std::vector<std::string> kEmbeddingMetrics = {
    "greedy-matching", "embedding-average", "vector-extrema"};
const std::vector<std::string> kUsrMetrics = {"usr-mlm", "usr-dr-c", "usr-dr-f",
                                              "usr"};

bool is_bertscore(std::string_view m) {
  return m.rfind("bertscore-", 0) == 0 && m.size() > 10;
}

bool contains(const std::vector<std::string>& v, std::string_view s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

std::string now_utc() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

AnnotatedDataset load_checked(const RunConfig& config) {
  if (config.dataset.empty()) throw ConfigError("--dataset is required");
  if (!fs::exists(config.dataset)) {
    throw ConfigError("dataset file not found: expected '" +
                      config.dataset.string() + "'");
  }
  return load_dataset(config.dataset, config.format);
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path().empty() ? fs::path(".")
                                                    : path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << content;
}

std::string stamp_line(const RunConfig& config) {
  return "config " + config.hash() + " seed " + std::to_string(config.seed) + "\n";
}

// ---- eval ---------------------------------------------------------------

struct EvalBackends {
  std::unique_ptr<MaskedLMBackend> mlm;
  std::unique_ptr<RetrievalBackend> dr_context;
  std::unique_ptr<RetrievalBackend> dr_fact;
  std::shared_ptr<const WordEmbedder> embeddings;
  std::map<std::string, std::unique_ptr<ContextualEmbedder>> encoders;

  bool concurrent_read_safe() const {
    return (!mlm || mlm->concurrent_read_safe()) &&
           (!dr_context || dr_context->concurrent_read_safe()) &&
           (!dr_fact || dr_fact->concurrent_read_safe());
  }
};

std::map<std::string, std::string> parse_roles(const std::vector<std::string>& specs) {
  std::map<std::string, std::string> roles;
  for (const auto& s : specs) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == s.size()) {
      throw ConfigError("--backend '" + s + "' must be <role>=<value>");
    }
    roles[s.substr(0, eq)] = s.substr(eq + 1);
  }
  return roles;
}

std::shared_ptr<const WordEmbedder> make_embeddings(const std::string& value) {
  if (value.rfind("toy-hash", 0) == 0) {
    std::size_t dim = 64;
    if (value.size() > 9 && value[8] == ':') dim = std::stoul(value.substr(9));
    return std::make_shared<HashEmbedder>(dim, 0x9e3779b9ULL);
  }
  if (!fs::exists(value)) {
    throw ConfigError("embedding file not found: '" + value + "'");
  }
  return std::make_shared<StaticEmbeddings>(StaticEmbeddings::load(value));
}

template <typename Backend, typename LoadCkpt, typename Make>
std::unique_ptr<Backend> resolve_backend(const std::string& value, LoadCkpt load,
                                         Make make) {
  if (fs::is_directory(value)) return load(value);
  return make(value);
}

EvalBackends load_backends(const RunConfig& config,
                           const std::vector<std::string>& metrics) {
  auto roles = parse_roles(config.backends);
  EvalBackends b;
  auto need = [&](const std::string& role, const std::string& metric) {
    auto it = roles.find(role);
    if (it == roles.end()) {
      throw ConfigError("metric '" + metric + "' needs --backend " + role +
                        "=<checkpoint dir or backend id>");
    }
    return it->second;
  };
  if (contains(metrics, "usr-mlm")) {
    const auto v = need("mlm", "usr-mlm");
    b.mlm = resolve_backend<MaskedLMBackend>(
        v, [](const fs::path& p) { return load_masked_lm_checkpoint(p); },
        [](const std::string& id) { return make_masked_lm(id); });
  }
  if (contains(metrics, "usr-dr-c")) {
    const auto v = need("dr-context", "usr-dr-c");
    b.dr_context = resolve_backend<RetrievalBackend>(
        v, [](const fs::path& p) { return load_retrieval_checkpoint(p); },
        [](const std::string& id) { return make_retrieval(id); });
  }
  if (contains(metrics, "usr-dr-f")) {
    const auto v = need("dr-fact", "usr-dr-f");
    b.dr_fact = resolve_backend<RetrievalBackend>(
        v, [](const fs::path& p) { return load_retrieval_checkpoint(p); },
        [](const std::string& id) { return make_retrieval(id); });
  }
  if (auto it = roles.find("embeddings"); it != roles.end()) {
    b.embeddings = make_embeddings(it->second);
  }
  for (const auto& m : metrics) {
    if (contains(kEmbeddingMetrics, m) && !b.embeddings) {
      throw ConfigError("metric '" + m +
                        "' needs --backend embeddings=<file or toy-hash>");
    }
    if (is_bertscore(m)) {
      const auto v = need(m, m);
      if (v.rfind("toy-context", 0) != 0) {
        throw ConfigError("unknown contextual encoder '" + v + "' for " + m);
      }
      auto base = b.embeddings ? b.embeddings
                               : std::make_shared<HashEmbedder>(64, 0x9e3779b9ULL);
      b.encoders[m] = std::make_unique<ToyContextualEncoder>(base);
    }
  }
  return b;
}

// Values of the non-"usr" metrics for one example, in `metrics` order.
std::vector<MetricScore> score_example(const DialogExample& ex,
                                       const std::vector<std::string>& metrics,
                                       const EvalBackends& b,
                                       const RunConfig& config) {
  std::vector<MetricScore> out;
  for (const auto& m : metrics) {
    if (m == "usr") continue;
    MetricScore s{m, ex.example_id, std::nullopt, ""};
    const bool referenced = contains(kOverlapMetrics, m) ||
                            contains(kEmbeddingMetrics, m) || is_bertscore(m);
    try {
      if (referenced && !ex.reference) {
        s.missing_reason = "no reference response";
      } else if (m == "f1") {
        s.value = f1_score(ex.response, *ex.reference);
      } else if (m.rfind("bleu-", 0) == 0) {
        s.value = bleu_score(ex.response, {*ex.reference}, m.back() - '0');
      } else if (m == "meteor") {
        s.value = meteor_score(ex.response, *ex.reference);
      } else if (m == "rouge-l") {
        s.value = rouge_l_score(ex.response, *ex.reference);
      } else if (m == "greedy-matching") {
        s.value = greedy_matching(ex.response, *ex.reference, *b.embeddings);
      } else if (m == "embedding-average") {
        s.value = embedding_average(ex.response, *ex.reference, *b.embeddings);
      } else if (m == "vector-extrema") {
        s.value = vector_extrema(ex.response, *ex.reference, *b.embeddings);
      } else if (is_bertscore(m)) {
        s.value = bertscore_recall(ex.response, *ex.reference, *b.encoders.at(m));
      } else if (m == "usr-mlm") {
        s.value = mlm_metric_value(mlm_score(ex.context, ex.response, *b.mlm),
                                   config.mlm_orientation, config.mlm_normalize);
      } else if (m == "usr-dr-c") {
        s.value = dr_score(retrieval_input(ex, RetrievalVariant::kContext),
                           ex.response, *b.dr_context);
      } else if (m == "usr-dr-f") {
        if (ex.fact.empty()) {
          s.missing_reason = "no grounding fact";
        } else {
          s.value = dr_score(ex.fact, ex.response, *b.dr_fact);
        }
      }
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kData) throw;
      s.value.reset();
      s.missing_reason = e.what();
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::vector<MetricScore>> score_all(
    const std::vector<const DialogExample*>& todo,
    const std::vector<std::string>& metrics, const EvalBackends& backends,
    const RunConfig& config) {
  std::vector<std::vector<MetricScore>> results(todo.size());
  const std::size_t jobs =
      backends.concurrent_read_safe() ? std::max<std::size_t>(1, config.jobs) : 1;
  if (jobs == 1 || todo.size() < 2) {
    for (std::size_t i = 0; i < todo.size(); ++i) {
      results[i] = score_example(*todo[i], metrics, backends, config);
    }
    return results;
  }
  std::vector<std::exception_ptr> errors(jobs);
  {
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w) {
      workers.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < todo.size(); i += jobs) {
            results[i] = score_example(*todo[i], metrics, backends, config);
          }
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace

std::string RunConfig::hash() const {
  ojson j;
  j["dataset"] = dataset.string();
  j["format"] = std::string(dataset_format_name(format));
  j["metrics"] = metrics;
  j["backends"] = backends;
  j["mapping"] = mapping;
  j["seed"] = seed;
  j["norm_stats"] = norm_stats == NormStats::kBatch ? "batch" : "frozen";
  j["mlm_orientation"] =
      mlm_orientation == MlmOrientation::kRawNll ? "raw-nll" : "higher-is-better";
  j["mlm_normalize"] = mlm_normalize;
  j["include_ground_truth"] = include_ground_truth;
  std::vector<std::string> score_paths;
  for (const auto& p : scores) score_paths.push_back(p.string());
  j["scores"] = score_paths;
  j["regression_model"] = regression_model.string();
  j["usr_mode"] = usr_mode;
  j["epochs"] = epochs;
  j["negative_ratio"] = negative_ratio;
  j["system_p_value"] =
      system_p_value == PValueMethod::kPermutation ? "permutation" : "t";
  j["aggregation"] = aggregation == HumanAggregation::kMedian ? "median" : "mean";
  j["tokenizer"] = std::string(kTokenizerVersion);
  return to_hex(fnv1a64(j.dump()));
}

std::vector<std::string> expand_metrics(const std::vector<std::string>& requested) {
  std::vector<std::string> out;
  auto add = [&](const std::string& m) {
    if (!contains(out, m)) out.push_back(m);
  };
  for (const auto& m : requested) {
    if (m == "overlap") {
      for (const auto& x : kOverlapMetrics) add(x);
    } else if (m == "embedding") {
      for (const auto& x : kEmbeddingMetrics) add(x);
    } else if (m == "usr-all") {
      for (const auto& x : kUsrMetrics) add(x);
    } else if (contains(kOverlapMetrics, m) || contains(kEmbeddingMetrics, m) ||
               contains(kUsrMetrics, m) || is_bertscore(m)) {
      add(m);
    } else {
      throw ConfigError("unknown metric '" + m + "'");
    }
  }
  return out;
}

CommandResult cmd_eval(const RunConfig& config) {
  auto metrics = expand_metrics(config.metrics);
  if (metrics.empty()) throw ConfigError("no metrics selected (--metrics)");

  SubMetricMapping mapping = SubMetricMapping::parse(config.mapping);
  std::optional<RegressionModel> model;
  if (contains(metrics, "usr")) {
    if (config.usr_mode != "reuse" && config.usr_mode != "refit") {
      throw ConfigError("--usr-mode must be reuse or refit");
    }
    if (config.usr_mode == "reuse") {
      if (config.regression_model.empty()) {
        throw ConfigError("metric 'usr' needs --regression-model <file> "
                          "(see fit-regression)");
      }
      std::ifstream in(config.regression_model);
      if (!in) {
        throw ConfigError("regression model not found: '" +
                          config.regression_model.string() + "'");
      }
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(in);
      } catch (const nlohmann::json::exception& e) {
        throw ParseError("malformed regression model file: " + std::string(e.what()));
      }
      model = regression_model_from_json(j);
      if (config.mapping.empty() && j.contains("mapping")) {
        mapping = SubMetricMapping::parse(j["mapping"].get<std::string>());
      }
    }
    for (const auto& m : mapping.metric_names()) {
      if (m == "usr") throw ConfigError("mapping cannot reference 'usr' itself");
      expand_metrics({m});
      if (!contains(metrics, m)) metrics.insert(metrics.end() - 1, m);
    }
    // "usr" is computed last from the others.
    metrics.erase(std::find(metrics.begin(), metrics.end(), "usr"));
    metrics.push_back("usr");
  }
  const EvalBackends backends = load_backends(config, metrics);
  const AnnotatedDataset dataset = load_checked(config);

  fs::create_directories(config.out);
  const fs::path score_path = config.out / "scores.jsonl";
  std::map<std::pair<std::string, std::string>, std::optional<double>> existing;
  if (fs::exists(score_path)) {
    for (auto& s : read_score_file(score_path)) {
      existing[{s.example_id, s.metric}] = s.value;
    }
  }

  std::vector<const DialogExample*> todo;
  for (const auto& ex : dataset.examples) todo.push_back(&ex);
  auto per_example = score_all(todo, metrics, backends, config);

  std::ofstream out(score_path, std::ios::app | std::ios::binary);
  if (!out) throw ConfigError("cannot write '" + score_path.string() + "'");
  const std::string hash = config.hash();
  std::size_t written = 0;
  std::vector<ExampleScores> values(todo.size());
  for (std::size_t i = 0; i < todo.size(); ++i) {
    const auto& ex = *todo[i];
    const ScoreProvenance prov{ex.system_id, hash, config.seed};
    for (const auto& s : per_example[i]) {
      auto key = std::make_pair(ex.example_id, s.metric);
      if (auto it = existing.find(key); it != existing.end()) {
        if (it->second) values[i][s.metric] = *it->second;
        continue;
      }
      if (s.value) values[i][s.metric] = *s.value;
      out << score_row_json(s, prov) << '\n';
      ++written;
    }
  }

  if (contains(metrics, "usr")) {
    std::vector<std::size_t> complete;
    std::vector<ExampleScores> batch;
    for (std::size_t i = 0; i < todo.size(); ++i) {
      try {
        assemble_quality_vector(mapping, values[i]);
        complete.push_back(i);
        batch.push_back(values[i]);
      } catch (const IncompleteInputError&) {
      }
    }
    std::vector<double> usr_values;
    std::string failure;
    try {
      if (config.usr_mode == "refit") {
        std::vector<ExampleScores> fit_batch;
        std::vector<double> overall;
        for (std::size_t k = 0; k < complete.size(); ++k) {
          const auto anns = dataset.annotations_for(todo[complete[k]]->example_id);
          if (anns.empty()) continue;
          double s = 0.0;
          for (const auto* a : anns) s += a->overall;
          fit_batch.push_back(batch[k]);
          overall.push_back(s / static_cast<double>(anns.size()));
        }
        model = refit_on_submetrics(mapping, fit_batch, overall);
        usr_values = usr_scores(*model, mapping, batch, NormStats::kFrozen);
      } else {
        usr_values = usr_scores(*model, mapping, batch, config.norm_stats);
      }
    } catch (const Error& e) {
      if (e.category() != ErrorCategory::kData) throw;
      failure = e.what();
    }
    std::vector<std::optional<double>> usr_by_example(todo.size());
    if (failure.empty()) {
      for (std::size_t k = 0; k < complete.size(); ++k) {
        usr_by_example[complete[k]] = usr_values[k];
      }
    }
    for (std::size_t i = 0; i < todo.size(); ++i) {
      const auto& ex = *todo[i];
      if (existing.contains({ex.example_id, "usr"})) continue;
      MetricScore s{"usr", ex.example_id, usr_by_example[i], ""};
      if (!s.value) {
        s.missing_reason = failure.empty() ? "incomplete sub-metric scores" : failure;
      }
      out << score_row_json(s, {ex.system_id, hash, config.seed}) << '\n';
      ++written;
    }
  }
  out.close();

  ojson run;
  run["config_hash"] = hash;
  run["seed"] = config.seed;
  run["metrics"] = metrics;
  run["mapping"] = mapping.to_string();
  run["dataset_fingerprint"] = dataset_fingerprint(dataset);
  run["tokenizer"] = std::string(kTokenizerVersion);
  run["stemmer"] = std::string(kStemmerVersion);
  write_file(config.out / "eval_run.json", run.dump(2) + "\n");

  CommandResult r;
  r.outputs = {score_path, config.out / "eval_run.json"};
  r.summary = "wrote " + std::to_string(written) + " score rows for " +
              std::to_string(todo.size()) + " examples to " + score_path.string();
  return r;
}

TrainTarget parse_train_target(std::string_view name) {
  if (name == "mlm") return TrainTarget::kMlm;
  if (name == "dr-context") return TrainTarget::kDrContext;
  if (name == "dr-fact") return TrainTarget::kDrFact;
  throw ConfigError("unknown training target '" + std::string(name) +
                    "' (expected mlm, dr-context or dr-fact)");
}

CommandResult cmd_train(const RunConfig& config, TrainTarget target) {
  if (config.backends.size() > 1) {
    throw ConfigError("train takes a single --backend id");
  }
  const bool is_mlm = target == TrainTarget::kMlm;
  const std::string backend_id =
      config.backends.empty() ? (is_mlm ? "toy-counting" : "toy-bow-logistic")
                              : config.backends.front();
  if (is_mlm ? !is_masked_lm_id(backend_id) : !is_retrieval_id(backend_id)) {
    throw ConfigError("unknown " + std::string(is_mlm ? "masked-LM" : "retrieval") +
                      " backend '" + backend_id + "'");
  }
  if (config.epochs < 1) throw ConfigError("--epochs must be >= 1");
  const AnnotatedDataset dataset = load_checked(config);

  // Annotated files mix system outputs with the original responses; only the
  // latter are dialog data.
  std::vector<DialogExample> corpus;
  for (const auto& ex : dataset.examples) {
    if (ex.is_ground_truth()) corpus.push_back(ex);
  }
  if (corpus.empty()) corpus = dataset.examples;

  CheckpointManifest manifest;
  manifest.backend_id = backend_id;
  manifest.corpus_fingerprint = dataset_fingerprint(dataset);
  manifest.epochs = config.epochs;
  manifest.seed = config.seed;
  manifest.config_hash = config.hash();
  manifest.created_at = now_utc();

  fs::path dir;
  nlohmann::json state;
  if (is_mlm) {
    manifest.kind = "mlm";
    dir = config.out / "mlm";
    auto backend = fine_tune_mlm(make_masked_lm(backend_id), corpus, config.epochs);
    state = backend->state();
  } else {
    const auto variant = target == TrainTarget::kDrContext ? RetrievalVariant::kContext
                                                           : RetrievalVariant::kFact;
    manifest.kind = "retrieval";
    manifest.variant = std::string(retrieval_variant_name(variant));
    manifest.negative_ratio = config.negative_ratio;
    dir = config.out / (variant == RetrievalVariant::kContext ? "dr-context" : "dr-fact");
    auto backend = train_dr(make_retrieval(backend_id), corpus, variant,
                            config.negative_ratio, config.seed);
    state = backend->state();
    // Retrieval backends pick their own number of passes; record what ran.
    if (state.is_object() && state.contains("epochs") && state["epochs"].is_number_integer())
      manifest.epochs = state["epochs"].get<int>();
  }
  save_checkpoint(dir, manifest, state);
  CommandResult r;
  r.outputs = {dir / "manifest.json", dir / "state.json"};
  r.summary = "trained " + backend_id + " (" + manifest.kind +
              (manifest.variant.empty() ? "" : ", x=" + manifest.variant) +
              ") on " + std::to_string(corpus.size()) + " dialogs -> " + dir.string();
  return r;
}

FitMode parse_fit_mode(std::string_view name) {
  if (name == "human") return FitMode::kHuman;
  if (name == "per-annotator") return FitMode::kPerAnnotator;
  throw ConfigError("unknown fit mode '" + std::string(name) +
                    "' (expected human or per-annotator)");
}

CommandResult cmd_fit_regression(const RunConfig& config, FitMode mode) {
  const AnnotatedDataset dataset = load_checked(config);
  const SubMetricMapping mapping = SubMetricMapping::parse(config.mapping);
  const std::string hash = config.hash();
  CommandResult r;

  auto model_json = [&](const RegressionModel& m) {
    ojson j = regression_model_to_json(m);
    ojson profile = ojson::array();
    for (double p : weight_profile(m)) profile.push_back(p);
    j["weight_profile"] = profile;
    j["mapping"] = mapping.to_string();
    j["config_hash"] = hash;
    j["seed"] = config.seed;
    return j;
  };

  if (mode == FitMode::kHuman) {
    const auto rows = mean_rating_rows(dataset);
    RegressionModel model = fit_regression(rows);
    model.fingerprint = dataset_fingerprint(dataset);
    std::vector<double> predicted, actual;
    for (const auto& row : rows) {
      predicted.push_back(predict(model, row.qualities));
      actual.push_back(row.overall);
    }
    const auto rho = spearman(predicted, actual);
    ojson j = model_json(model);
    j["training_rows"] = rows.size();
    j["training_spearman"] = rho.coefficient;
    const fs::path path = config.out / "regression.json";
    write_file(path, j.dump(2) + "\n");
    r.outputs.push_back(path);
    std::ostringstream s;
    s << "fitted regression on " << rows.size()
      << " responses; Spearman(predicted, overall) = " << rho.coefficient;
    r.summary = s.str();
    return r;
  }

  const auto fit = fit_per_annotator(dataset);
  if (fit.models.empty()) {
    throw DegenerateInputError("no annotator has enough usable annotations");
  }
  ojson profiles = ojson::array();
  std::ostringstream table;
  table << "annotator";
  for (auto d : kQualityDimensions) table << '\t' << dimension_name(d);
  table << '\n';
  for (const auto& [annotator, model] : fit.models) {
    std::string file = annotator;
    std::replace_if(file.begin(), file.end(),
                    [](char c) { return !std::isalnum(static_cast<unsigned char>(c)) &&
                                        c != '-' && c != '_'; },
                    '_');
    const fs::path path = config.out / "annotators" / (file + ".json");
    ojson j = model_json(model);
    j["annotator_id"] = annotator;
    write_file(path, j.dump(2) + "\n");
    r.outputs.push_back(path);
    const auto profile = weight_profile(model);
    profiles.push_back({{"annotator_id", annotator}, {"profile", profile}});
    table << annotator;
    for (double p : profile) {
      char buf[16];
      std::snprintf(buf, sizeof(buf), "%.4f", p);
      table << '\t' << buf;
    }
    table << '\n';
  }
  ojson excluded = ojson::object();
  for (const auto& [a, why] : fit.excluded) excluded[a] = why;
  ojson doc;
  doc["config_hash"] = hash;
  doc["seed"] = config.seed;
  doc["dimensions"] = ojson::array();
  for (auto d : kQualityDimensions) doc["dimensions"].push_back(std::string(dimension_name(d)));
  doc["profiles"] = profiles;
  doc["excluded"] = excluded;
  write_file(config.out / "weight_profiles.json", doc.dump(2) + "\n");
  write_file(config.out / "weight_profiles.txt", table.str() + stamp_line(config));
  r.outputs.push_back(config.out / "weight_profiles.json");
  r.outputs.push_back(config.out / "weight_profiles.txt");
  for (const auto& [a, why] : fit.excluded) {
    std::cerr << "warning: annotator '" << a << "' excluded: " << why << '\n';
  }
  r.summary = "fitted " + std::to_string(fit.models.size()) + " annotator models";
  return r;
}

CommandResult cmd_benchmark(const RunConfig& config) {
  const AnnotatedDataset dataset = load_checked(config);
  if (dataset.annotations.empty()) {
    throw ConfigError("dataset '" + config.dataset.string() +
                      "' has no annotations; benchmark needs the human "
                      "annotation file");
  }
  std::vector<fs::path> score_files = config.scores;
  if (score_files.empty()) score_files.push_back(config.out / "scores.jsonl");
  std::vector<MetricScore> scores;
  for (const auto& p : score_files) {
    if (!fs::exists(p)) {
      throw ConfigError("score file not found: expected '" + p.string() +
                        "' (run eval first or pass --scores)");
    }
    auto rows = read_score_file(p);
    scores.insert(scores.end(), rows.begin(), rows.end());
  }
  const ScoreTable table = ScoreTable::build(dataset, scores, config.aggregation);
  BenchmarkOptions options;
  options.include_ground_truth = config.include_ground_truth;
  options.system_p_value = config.system_p_value;
  auto metrics = table.metric_names();
  if (!config.metrics.empty()) {
    std::vector<std::string> selected;
    for (const auto& m : expand_metrics(config.metrics)) {
      if (contains(metrics, m)) selected.push_back(m);
    }
    metrics = selected;
  }
  const auto result = correlate_all(table, metrics, kAllDimensions, options);

  const std::string hash = config.hash();
  CommandResult r;
  {
    ojson arr = ojson::array();
    for (const auto& rep : result.reports) {
      ojson j = report_to_json(rep);
      j["config_hash"] = hash;
      j["seed"] = config.seed;
      arr.push_back(j);
    }
    write_file(config.out / "report.json", arr.dump(2) + "\n");
    r.outputs.push_back(config.out / "report.json");
  }
  if (config.report_format != ReportFormat::kJson) {
    const fs::path path = config.out / ("report." +
        std::string(report_format_extension(config.report_format)));
    write_file(path, render_report(result.reports, config.report_format) +
                         "\n" + stamp_line(config));
    r.outputs.push_back(path);
  }
  ojson skipped = ojson::array();
  for (const auto& s : result.skipped) {
    skipped.push_back({{"metric", s.metric},
                       {"quality", std::string(dimension_name(s.quality))},
                       {"level", std::string(level_name(s.level))},
                       {"reason", s.reason}});
  }
  write_file(config.out / "skipped.json", skipped.dump(2) + "\n");
  r.outputs.push_back(config.out / "skipped.json");

  auto agreement = cmd_agreement(config);
  r.outputs.insert(r.outputs.end(), agreement.outputs.begin(), agreement.outputs.end());

  std::size_t n_turn = 0;
  for (const auto& rep : result.reports) {
    if (rep.level == CorrelationLevel::kTurn) n_turn = std::max(n_turn, rep.n);
  }
  r.summary = std::to_string(result.reports.size()) + " correlation cells (" +
              std::to_string(result.skipped.size()) + " skipped), up to " +
              std::to_string(n_turn) + " responses per turn-level cell";
  return r;
}

CommandResult cmd_agreement(const RunConfig& config) {
  const AnnotatedDataset dataset = load_checked(config);
  std::vector<Agreement> rows;
  for (auto dim : kAllDimensions) {
    try {
      rows.push_back(inter_annotator_agreement(dataset, dim));
    } catch (const InsufficientDataError& e) {
      std::cerr << "warning: " << e.what() << '\n';
    }
  }
  if (rows.empty()) {
    throw InsufficientDataError("no quality dimension has a usable annotator pair");
  }
  CommandResult r;
  const fs::path path =
      config.out / ("agreement." +
                    std::string(report_format_extension(config.report_format)));
  std::string body = render_agreement(rows, config.report_format);
  if (config.report_format != ReportFormat::kJson) body += stamp_line(config);
  write_file(path, body);
  r.outputs.push_back(path);
  r.summary = render_agreement(rows, ReportFormat::kTextTable);
  return r;
}

CommandResult cmd_report(const RunConfig& config) {
  if (config.report_input.empty()) throw ConfigError("report needs --input <report.json>");
  std::ifstream in(config.report_input);
  if (!in) {
    throw ConfigError("report file not found: '" + config.report_input.string() + "'");
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError("malformed report JSON: " + std::string(e.what()));
  }
  const auto reports = reports_from_json(j);
  CommandResult r;
  r.summary = render_report(reports, config.report_format);
  const fs::path path =
      config.out / ("report." +
                    std::string(report_format_extension(config.report_format)));
  write_file(path, r.summary);
  r.outputs.push_back(path);
  return r;
}

}  // namespace usr::cli
