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

#include "usr/model_scorers.hpp"

#include <cmath>
#include <unordered_set>

#include "usr/errors.hpp"

namespace usr {

void MaskedLMBackend::fine_tune(std::span<const TokenSequence>, int) {
  throw UnsupportedOperationError("masked-LM backend '" + id() +
                                  "' does not support fine-tuning");
}

void RetrievalBackend::train(std::span<const RetrievalExample>, std::uint64_t) {
  throw UnsupportedOperationError("retrieval backend '" + id() +
                                  "' does not support training");
}

MlmScore mlm_score(const DialogContext& context, const TokenSequence& response,
                   const MaskedLMBackend& backend) {
  if (response.empty()) {
    throw PreconditionError("mlm_score: response must be non-empty");
  }
  const std::size_t limit = backend.max_length();
  if (response.size() > limit) {
    throw PreconditionError("mlm_score: response of " +
                            std::to_string(response.size()) +
                            " tokens exceeds backend max length " +
                            std::to_string(limit));
  }
  TokenSequence ctx = context.flattened();
  if (ctx.size() + response.size() > limit) {
    ctx.erase(ctx.begin(),
              ctx.begin() + static_cast<std::ptrdiff_t>(
                                ctx.size() + response.size() - limit));
  }
  std::vector<std::string> sequence = std::move(ctx);
  const std::size_t offset = sequence.size();
  sequence.insert(sequence.end(), response.begin(), response.end());

  MlmScore score;
  score.per_token.reserve(response.size());
  for (std::size_t i = 0; i < response.size(); ++i) {
    const std::size_t pos = offset + i;
    sequence[pos] = std::string(kMaskToken);
    const double ll = backend.masked_log_likelihood(sequence, pos, response[i]);
    sequence[pos] = response[i];
    if (!(ll <= 0.0)) {
      throw BackendContractError("masked-LM backend '" + backend.id() +
                                 "' returned log-likelihood " +
                                 std::to_string(ll) + " (must be <= 0)");
    }
    score.per_token.push_back({i, response[i], ll});
    score.total_nll -= ll;
  }
  score.length_normalized_nll =
      score.total_nll / static_cast<double>(score.per_token.size());
  return score;
}

MlmOrientation parse_mlm_orientation(std::string_view name) {
  if (name == "higher-is-better") return MlmOrientation::kHigherIsBetter;
  if (name == "raw-nll") return MlmOrientation::kRawNll;
  throw ConfigError("unknown MLM orientation '" + std::string(name) +
                    "' (expected raw-nll or higher-is-better)");
}

double mlm_metric_value(const MlmScore& score, MlmOrientation orientation,
                        bool normalize) {
  const double nll = normalize ? score.length_normalized_nll : score.total_nll;
  return orientation == MlmOrientation::kRawNll ? nll : -nll;
}

std::vector<TokenSequence> mlm_training_sequences(
    const std::vector<DialogExample>& corpus) {
  std::vector<TokenSequence> out;
  std::unordered_set<std::string> seen;
  auto add = [&](const TokenSequence& turn) {
    if (turn.empty()) return;
    if (seen.insert(join_tokens(turn)).second) out.push_back(turn);
  };
  for (const auto& ex : corpus) {
    for (const auto& turn : ex.context.turns) add(turn);
    add(ex.response);
  }
  return out;
}

std::unique_ptr<MaskedLMBackend> fine_tune_mlm(
    std::unique_ptr<MaskedLMBackend> backend,
    const std::vector<DialogExample>& corpus, int epochs) {
  if (!backend) throw ArgumentError("fine_tune_mlm: null backend");
  if (corpus.empty()) {
    throw PreconditionError("fine_tune_mlm: training corpus is empty");
  }
  if (epochs < 1) throw ArgumentError("fine_tune_mlm: epochs must be >= 1");
  if (!backend->supports_training()) {
    throw UnsupportedOperationError("masked-LM backend '" + backend->id() +
                                    "' does not support fine-tuning");
  }
  const auto sequences = mlm_training_sequences(corpus);
  backend->fine_tune(sequences, epochs);
  return backend;
}

double dr_score(const TokenSequence& x, const TokenSequence& r,
                const RetrievalBackend& backend) {
  if (x.empty() || r.empty()) {
    throw PreconditionError("dr_score: x and r must be non-empty");
  }
  const double p = backend.probability(x, r);
  if (!(p > 0.0 && p < 1.0)) {
    throw BackendContractError("retrieval backend '" + backend.id() +
                               "' returned probability " + std::to_string(p) +
                               " (must lie strictly inside (0,1))");
  }
  return p;
}

std::unique_ptr<RetrievalBackend> train_dr(
    std::unique_ptr<RetrievalBackend> backend,
    const std::vector<DialogExample>& corpus, RetrievalVariant variant,
    int negative_ratio, std::uint64_t seed) {
  if (!backend) throw ArgumentError("train_dr: null backend");
  if (!backend->supports_training()) {
    throw UnsupportedOperationError("retrieval backend '" + backend->id() +
                                    "' does not support training");
  }
  const auto examples =
      build_retrieval_examples(corpus, variant, negative_ratio, seed);
  backend->train(examples, seed);
  return backend;
}

}  // namespace usr
