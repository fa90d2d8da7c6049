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

#ifndef USR_TOY_BACKENDS_HPP_
#define USR_TOY_BACKENDS_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "usr/model_scorers.hpp"

namespace usr {

// Every masked token has probability 1/V regardless of input.
class UniformMaskedLM : public MaskedLMBackend {
 public:
  explicit UniformMaskedLM(std::size_t vocab_size);

  std::string id() const override { return "toy-uniform"; }
  double masked_log_likelihood(std::span<const std::string> masked,
                               std::size_t position,
                               const std::string& target) const override;
  nlohmann::json state() const override;
  static std::unique_ptr<UniformMaskedLM> from_state(const nlohmann::json& s);

  std::size_t vocab_size() const { return vocab_size_; }

 private:
  std::size_t vocab_size_;
};

// Add-k smoothed bigram model read in both directions:
//   P(w | l, r) = P(w | l) P(r | w) / sum_v P(v | l) P(r | v)
// with l, r the neighbours of the masked slot (sentence boundaries are <s> and
// </s>). The vocabulary has at least `nominal_vocab` types; unseen types share
// the smoothing mass, so a fresh model is uniform.
class CountingMaskedLM : public MaskedLMBackend {
 public:
  explicit CountingMaskedLM(std::size_t nominal_vocab = 10000,
                            double smoothing = 0.5,
                            std::size_t max_length = 512);

  std::string id() const override { return "toy-counting"; }
  double masked_log_likelihood(std::span<const std::string> masked,
                               std::size_t position,
                               const std::string& target) const override;
  std::size_t max_length() const override { return max_length_; }

  bool supports_training() const override { return true; }
  void fine_tune(std::span<const TokenSequence> corpus, int epochs) override;

  nlohmann::json state() const override;
  static std::unique_ptr<CountingMaskedLM> from_state(const nlohmann::json& s);

  // Add-k bigram probability P(w | prev).
  double bigram_probability(const std::string& prev, const std::string& w) const;
  std::size_t seen_types() const { return left_total_.size(); }

 private:
  double vocab() const;
  double count(const std::string& prev, const std::string& w) const;
  double left_total(const std::string& prev) const;
  double joint(const std::string& l, const std::string& w,
               const std::string& r) const;

  std::size_t nominal_vocab_;
  double smoothing_;
  std::size_t max_length_;
  // bigrams_[prev][next] = count
  std::map<std::string, std::map<std::string, double>> bigrams_;
  std::map<std::string, double> left_total_;  // sum over next of bigrams_[prev]
  std::map<std::string, double> words_;       // word types seen (no boundaries)
};

// Logistic regression over bag-of-words features of (x, r): overlap ratios,
// hashed (x-token, r-token) pairs and hashed response unigrams. Trained with
// seeded SGD; probabilities are clamped to stay strictly inside (0, 1).
class BowLogisticRetrieval : public RetrievalBackend {
 public:
  struct Params {
    std::size_t buckets = 4096;
    int epochs = 10;
    double learning_rate = 0.1;
    double l2 = 1e-5;
  };

  BowLogisticRetrieval() : BowLogisticRetrieval(Params{}) {}
  explicit BowLogisticRetrieval(Params params);

  std::string id() const override { return "toy-bow-logistic"; }
  double probability(const TokenSequence& x,
                     const TokenSequence& r) const override;

  bool supports_training() const override { return true; }
  void train(std::span<const RetrievalExample> examples,
             std::uint64_t seed) override;

  nlohmann::json state() const override;
  static std::unique_ptr<BowLogisticRetrieval> from_state(const nlohmann::json& s);

  using SparseFeatures = std::vector<std::pair<std::size_t, double>>;
  SparseFeatures features(const TokenSequence& x, const TokenSequence& r) const;

 private:
  double logit(const SparseFeatures& f) const;

  Params params_;
  std::vector<double> weights_;
};

// Always 0.5.
class ConstantRetrieval : public RetrievalBackend {
 public:
  explicit ConstantRetrieval(double p = 0.5) : p_(p) {}
  std::string id() const override { return "toy-constant"; }
  double probability(const TokenSequence&, const TokenSequence&) const override {
    return p_;
  }
  nlohmann::json state() const override { return {{"p", p_}}; }

 private:
  double p_;
};

}  // namespace usr

#endif  // USR_TOY_BACKENDS_HPP_
