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

#ifndef USR_BACKEND_REGISTRY_HPP_
#define USR_BACKEND_REGISTRY_HPP_

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "usr/model_scorers.hpp"

namespace usr {

// Factories take the backend's persisted state (an empty object for a fresh
// backend). Built-in ids: toy-uniform, toy-counting (masked LM);
// toy-bow-logistic, toy-constant (retrieval).
using MaskedLMFactory =
    std::function<std::unique_ptr<MaskedLMBackend>(const nlohmann::json&)>;
using RetrievalFactory =
    std::function<std::unique_ptr<RetrievalBackend>(const nlohmann::json&)>;

void register_masked_lm(const std::string& id, MaskedLMFactory factory);
void register_retrieval(const std::string& id, RetrievalFactory factory);

bool is_masked_lm_id(std::string_view id);
bool is_retrieval_id(std::string_view id);
std::vector<std::string> registered_backend_ids();

// Throw ConfigError for unknown ids.
std::unique_ptr<MaskedLMBackend> make_masked_lm(
    std::string_view id, const nlohmann::json& state = nlohmann::json::object());
std::unique_ptr<RetrievalBackend> make_retrieval(
    std::string_view id, const nlohmann::json& state = nlohmann::json::object());

struct CheckpointManifest {
  std::string backend_id;
  std::string kind;      // "mlm" or "retrieval"
  std::string variant;   // "context"/"fact" for retrieval, empty for mlm
  std::string corpus_fingerprint;
  int epochs = 1;
  int negative_ratio = 0;
  std::uint64_t seed = 0;
  std::string config_hash;
  std::string created_at;  // ISO-8601 UTC; excluded from reproducibility checks

  nlohmann::ordered_json to_json() const;
  static CheckpointManifest from_json(const nlohmann::json& j);
};

// Writes manifest.json and state.json under `dir` (created if needed).
void save_checkpoint(const std::filesystem::path& dir,
                     const CheckpointManifest& manifest,
                     const nlohmann::json& state);

CheckpointManifest read_manifest(const std::filesystem::path& dir);

std::unique_ptr<MaskedLMBackend> load_masked_lm_checkpoint(
    const std::filesystem::path& dir);
std::unique_ptr<RetrievalBackend> load_retrieval_checkpoint(
    const std::filesystem::path& dir);

}  // namespace usr

#endif  // USR_BACKEND_REGISTRY_HPP_
