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

#ifndef USR_MODEL_SCORERS_HPP_
#define USR_MODEL_SCORERS_HPP_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "usr/corpus.hpp"

namespace usr {

// Placeholder written into the masked position of an MLM input.
inline constexpr std::string_view kMaskToken = "<mask>";

// A masked language model. Scoring is const; training mutates the backend and
// therefore requires exclusive ownership (see fine_tune_mlm).
class MaskedLMBackend {
 public:
  virtual ~MaskedLMBackend() = default;

  virtual std::string id() const = 0;

  // Natural-log probability of `target` at `position`, conditioned on every
  // other token of `masked`. masked[position] holds kMaskToken. Must be <= 0.
  // Backends working on subwords report the summed log-probability of the
  // word's pieces.
  virtual double masked_log_likelihood(std::span<const std::string> masked,
                                       std::size_t position,
                                       const std::string& target) const = 0;

  // Longest input (context + response tokens) the backend accepts.
  virtual std::size_t max_length() const { return 512; }
  virtual bool concurrent_read_safe() const { return true; }

  virtual bool supports_training() const { return false; }
  // Throws UnsupportedOperationError unless overridden.
  virtual void fine_tune(std::span<const TokenSequence> corpus, int epochs);

  // Opaque, JSON-serialisable weights; restored through the registry.
  virtual nlohmann::json state() const = 0;
};

// Binary next-response classifier P(y = 1 | x, r).
class RetrievalBackend {
 public:
  virtual ~RetrievalBackend() = default;

  virtual std::string id() const = 0;
  // Strictly inside (0, 1).
  virtual double probability(const TokenSequence& x,
                             const TokenSequence& r) const = 0;
  virtual bool concurrent_read_safe() const { return true; }

  virtual bool supports_training() const { return false; }
  virtual void train(std::span<const RetrievalExample> examples,
                     std::uint64_t seed);

  virtual nlohmann::json state() const = 0;
};

struct MlmTokenScore {
  std::size_t position = 0;  // index into the response
  std::string token;
  double log_likelihood = 0.0;  // <= 0
};

struct MlmScore {
  std::vector<MlmTokenScore> per_token;
  double total_nll = 0.0;             // -sum of log_likelihood
  double length_normalized_nll = 0.0; // total_nll / |per_token|
};

// Masks each response token in turn (never a context token) inside the
// concatenation context + response and collects its log-likelihood. When the
// input exceeds backend.max_length(), the oldest context tokens are dropped.
MlmScore mlm_score(const DialogContext& context, const TokenSequence& response,
                   const MaskedLMBackend& backend);

enum class MlmOrientation { kHigherIsBetter, kRawNll };

MlmOrientation parse_mlm_orientation(std::string_view name);

// raw-nll: total (or per-token) NLL. higher-is-better: its negation, so that
// larger means a more likely response.
double mlm_metric_value(const MlmScore& score, MlmOrientation orientation,
                        bool normalize);

// One training sequence per distinct dialog turn (context turns and
// responses). Facts never enter the stream.
std::vector<TokenSequence> mlm_training_sequences(
    const std::vector<DialogExample>& corpus);

// Fine-tunes on dialog text only. Takes the backend by value so that no
// reader can observe it mid-update.
std::unique_ptr<MaskedLMBackend> fine_tune_mlm(
    std::unique_ptr<MaskedLMBackend> backend,
    const std::vector<DialogExample>& corpus, int epochs = 1);

// Backend probability, contract-checked.
double dr_score(const TokenSequence& x, const TokenSequence& r,
                const RetrievalBackend& backend);

std::unique_ptr<RetrievalBackend> train_dr(
    std::unique_ptr<RetrievalBackend> backend,
    const std::vector<DialogExample>& corpus, RetrievalVariant variant,
    int negative_ratio, std::uint64_t seed);

}  // namespace usr

#endif  // USR_MODEL_SCORERS_HPP_
