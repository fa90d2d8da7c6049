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

#include "usr/backend_registry.hpp"

#include <fstream>
#include <map>
#include <mutex>

#include "usr/errors.hpp"
#include "usr/toy_backends.hpp"

namespace usr {
namespace {

struct Registry {
  std::mutex mu;
  std::map<std::string, MaskedLMFactory, std::less<>> masked_lm;
  std::map<std::string, RetrievalFactory, std::less<>> retrieval;

  Registry() {
    masked_lm["toy-uniform"] = [](const nlohmann::json& s) {
      return std::unique_ptr<MaskedLMBackend>(UniformMaskedLM::from_state(s));
    };
    masked_lm["toy-counting"] = [](const nlohmann::json& s) {
      return std::unique_ptr<MaskedLMBackend>(CountingMaskedLM::from_state(s));
    };
    retrieval["toy-bow-logistic"] = [](const nlohmann::json& s) {
      return std::unique_ptr<RetrievalBackend>(
          BowLogisticRetrieval::from_state(s));
    };
    retrieval["toy-constant"] = [](const nlohmann::json& s) {
      return std::unique_ptr<RetrievalBackend>(
          std::make_unique<ConstantRetrieval>(s.value("p", 0.5)));
    };
  }
};

Registry& registry() {
  static Registry r;
  return r;
}

nlohmann::json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw BackendError("cannot open '" + path.string() + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw BackendError("malformed '" + path.string() + "': " + e.what());
  }
}

}  // namespace

void register_masked_lm(const std::string& id, MaskedLMFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.masked_lm[id] = std::move(factory);
}

void register_retrieval(const std::string& id, RetrievalFactory factory) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  r.retrieval[id] = std::move(factory);
}

bool is_masked_lm_id(std::string_view id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.masked_lm.find(id) != r.masked_lm.end();
}

bool is_retrieval_id(std::string_view id) {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  return r.retrieval.find(id) != r.retrieval.end();
}

std::vector<std::string> registered_backend_ids() {
  auto& r = registry();
  std::lock_guard lock(r.mu);
  std::vector<std::string> ids;
  for (const auto& [id, f] : r.masked_lm) ids.push_back(id);
  for (const auto& [id, f] : r.retrieval) ids.push_back(id);
  return ids;
}

std::unique_ptr<MaskedLMBackend> make_masked_lm(std::string_view id,
                                                const nlohmann::json& state) {
  MaskedLMFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.masked_lm.find(id);
    if (it == r.masked_lm.end()) {
      throw ConfigError("unknown masked-LM backend '" + std::string(id) + "'");
    }
    factory = it->second;
  }
  return factory(state);
}

std::unique_ptr<RetrievalBackend> make_retrieval(std::string_view id,
                                                 const nlohmann::json& state) {
  RetrievalFactory factory;
  {
    auto& r = registry();
    std::lock_guard lock(r.mu);
    auto it = r.retrieval.find(id);
    if (it == r.retrieval.end()) {
      throw ConfigError("unknown retrieval backend '" + std::string(id) + "'");
    }
    factory = it->second;
  }
  return factory(state);
}

nlohmann::ordered_json CheckpointManifest::to_json() const {
  nlohmann::ordered_json j;
  j["backend_id"] = backend_id;
  j["kind"] = kind;
  j["variant"] = variant;
  j["corpus_fingerprint"] = corpus_fingerprint;
  j["epochs"] = epochs;
  j["negative_ratio"] = negative_ratio;
  j["seed"] = seed;
  j["config_hash"] = config_hash;
  j["created_at"] = created_at;
  return j;
}

CheckpointManifest CheckpointManifest::from_json(const nlohmann::json& j) {
  CheckpointManifest m;
  try {
    m.backend_id = j.at("backend_id").get<std::string>();
    m.kind = j.at("kind").get<std::string>();
    m.variant = j.value("variant", "");
    m.corpus_fingerprint = j.value("corpus_fingerprint", "");
    m.epochs = j.value("epochs", 1);
    m.negative_ratio = j.value("negative_ratio", 0);
    m.seed = j.value("seed", std::uint64_t{0});
    m.config_hash = j.value("config_hash", "");
    m.created_at = j.value("created_at", "");
  } catch (const nlohmann::json::exception& e) {
    throw BackendError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  return m;
}

void save_checkpoint(const std::filesystem::path& dir,
                     const CheckpointManifest& manifest,
                     const nlohmann::json& state) {
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "manifest.json") << manifest.to_json().dump(2) << '\n';
  std::ofstream(dir / "state.json") << state.dump() << '\n';
}

CheckpointManifest read_manifest(const std::filesystem::path& dir) {
  return CheckpointManifest::from_json(read_json_file(dir / "manifest.json"));
}

std::unique_ptr<MaskedLMBackend> load_masked_lm_checkpoint(
    const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.kind != "mlm") {
    throw BackendError("checkpoint '" + dir.string() + "' holds a " +
                       manifest.kind + " backend, expected mlm");
  }
  return make_masked_lm(manifest.backend_id, read_json_file(dir / "state.json"));
}

std::unique_ptr<RetrievalBackend> load_retrieval_checkpoint(
    const std::filesystem::path& dir) {
  const auto manifest = read_manifest(dir);
  if (manifest.kind != "retrieval") {
    throw BackendError("checkpoint '" + dir.string() + "' holds a " +
                       manifest.kind + " backend, expected retrieval");
  }
  return make_retrieval(manifest.backend_id, read_json_file(dir / "state.json"));
}

}  // namespace usr
