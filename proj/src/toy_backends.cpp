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

#include "usr/toy_backends.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "usr/errors.hpp"
#include "usr/hashing.hpp"

namespace usr {

namespace {
constexpr const char* kBos = "<s>";
constexpr const char* kEos = "</s>";
}  // namespace

UniformMaskedLM::UniformMaskedLM(std::size_t vocab_size)
    : vocab_size_(vocab_size) {
  if (vocab_size == 0) throw ArgumentError("toy-uniform: vocab_size must be > 0");
}

double UniformMaskedLM::masked_log_likelihood(std::span<const std::string>,
                                              std::size_t,
                                              const std::string&) const {
  return -std::log(static_cast<double>(vocab_size_));
}

nlohmann::json UniformMaskedLM::state() const {
  return {{"vocab_size", vocab_size_}};
}

std::unique_ptr<UniformMaskedLM> UniformMaskedLM::from_state(
    const nlohmann::json& s) {
  return std::make_unique<UniformMaskedLM>(s.value("vocab_size", 10000));
}

CountingMaskedLM::CountingMaskedLM(std::size_t nominal_vocab, double smoothing,
                                   std::size_t max_length)
    : nominal_vocab_(nominal_vocab),
      smoothing_(smoothing),
      max_length_(max_length) {
  if (nominal_vocab == 0 || !(smoothing > 0.0)) {
    throw ArgumentError("toy-counting: nominal_vocab and smoothing must be > 0");
  }
}

double CountingMaskedLM::vocab() const {
  return static_cast<double>(std::max(nominal_vocab_, words_.size() + 1));
}

double CountingMaskedLM::count(const std::string& prev,
                               const std::string& w) const {
  auto it = bigrams_.find(prev);
  if (it == bigrams_.end()) return 0.0;
  auto jt = it->second.find(w);
  return jt == it->second.end() ? 0.0 : jt->second;
}

double CountingMaskedLM::left_total(const std::string& prev) const {
  auto it = left_total_.find(prev);
  return it == left_total_.end() ? 0.0 : it->second;
}

double CountingMaskedLM::bigram_probability(const std::string& prev,
                                            const std::string& w) const {
  return (count(prev, w) + smoothing_) /
         (left_total(prev) + smoothing_ * vocab());
}

double CountingMaskedLM::joint(const std::string& l, const std::string& w,
                               const std::string& r) const {
  return bigram_probability(l, w) * bigram_probability(w, r);
}

double CountingMaskedLM::masked_log_likelihood(
    std::span<const std::string> masked, std::size_t position,
    const std::string& target) const {
  const std::string& left = position == 0 ? kBos : masked[position - 1];
  const std::string& right =
      position + 1 >= masked.size() ? kEos : masked[position + 1];

  // Seen types contribute individually; the remaining (V - seen) unseen types
  // all score like an arbitrary unseen word.
  const std::string unseen = "\x01unseen";
  const double unseen_joint = joint(left, unseen, right);
  double z = (vocab() - static_cast<double>(words_.size())) * unseen_joint;
  for (const auto& [w, c] : words_) z += joint(left, w, right);

  const double numer =
      words_.contains(target) ? joint(left, target, right) : unseen_joint;
  return std::min(0.0, std::log(numer / z));
}

void CountingMaskedLM::fine_tune(std::span<const TokenSequence> corpus,
                                 int epochs) {
  if (epochs < 1) throw ArgumentError("toy-counting: epochs must be >= 1");
  for (int e = 0; e < epochs; ++e) {
    for (const auto& seq : corpus) {
      std::string prev = kBos;
      for (const auto& w : seq) {
        bigrams_[prev][w] += 1.0;
        left_total_[prev] += 1.0;
        words_[w] += 1.0;
        prev = w;
      }
      bigrams_[prev][kEos] += 1.0;
      left_total_[prev] += 1.0;
    }
  }
}

nlohmann::json CountingMaskedLM::state() const {
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& [prev, nexts] : bigrams_) {
    for (const auto& [w, c] : nexts) rows.push_back({prev, w, c});
  }
  return {{"nominal_vocab", nominal_vocab_},
          {"smoothing", smoothing_},
          {"max_length", max_length_},
          {"bigrams", rows}};
}

std::unique_ptr<CountingMaskedLM> CountingMaskedLM::from_state(
    const nlohmann::json& s) {
  auto lm = std::make_unique<CountingMaskedLM>(
      s.value("nominal_vocab", std::size_t{10000}), s.value("smoothing", 0.5),
      s.value("max_length", std::size_t{512}));
  if (auto it = s.find("bigrams"); it != s.end()) {
    for (const auto& row : *it) {
      const std::string prev = row.at(0);
      const std::string w = row.at(1);
      const double c = row.at(2);
      lm->bigrams_[prev][w] += c;
      lm->left_total_[prev] += c;
      if (w != kEos) lm->words_[w] += c;
    }
  }
  return lm;
}

BowLogisticRetrieval::BowLogisticRetrieval(Params params)
    : params_(params), weights_(4 + 2 * params.buckets, 0.0) {
  if (params.buckets == 0 || params.epochs < 1) {
    throw ArgumentError("toy-bow-logistic: buckets and epochs must be > 0");
  }
}

BowLogisticRetrieval::SparseFeatures BowLogisticRetrieval::features(
    const TokenSequence& x, const TokenSequence& r) const {
  const std::set<std::string> xs(x.begin(), x.end());
  const std::set<std::string> rs(r.begin(), r.end());
  std::size_t shared = 0;
  for (const auto& w : rs) shared += xs.contains(w) ? 1 : 0;

  SparseFeatures f;
  f.emplace_back(0, 1.0);
  f.emplace_back(1, rs.empty() ? 0.0 : static_cast<double>(shared) / rs.size());
  f.emplace_back(2, xs.empty() ? 0.0 : static_cast<double>(shared) / xs.size());
  f.emplace_back(3, std::log1p(static_cast<double>(shared)));

  const std::size_t b = params_.buckets;
  if (!xs.empty() && !rs.empty()) {
    const double pair_w = 1.0 / std::sqrt(static_cast<double>(xs.size() * rs.size()));
    for (const auto& u : xs) {
      const std::uint64_t hu = fnv1a64(u);
      for (const auto& v : rs) {
        f.emplace_back(4 + fnv1a64(v, hu) % b, pair_w);
      }
    }
  }
  if (!rs.empty()) {
    const double uni_w = 1.0 / std::sqrt(static_cast<double>(rs.size()));
    for (const auto& v : rs) f.emplace_back(4 + b + fnv1a64(v) % b, uni_w);
  }
  return f;
}

double BowLogisticRetrieval::logit(const SparseFeatures& f) const {
  double z = 0.0;
  for (const auto& [i, v] : f) z += weights_[i] * v;
  return std::clamp(z, -30.0, 30.0);
}

double BowLogisticRetrieval::probability(const TokenSequence& x,
                                         const TokenSequence& r) const {
  return 1.0 / (1.0 + std::exp(-logit(features(x, r))));
}

void BowLogisticRetrieval::train(std::span<const RetrievalExample> examples,
                                 std::uint64_t seed) {
  if (examples.empty()) {
    throw PreconditionError("toy-bow-logistic: no training examples");
  }
  std::vector<SparseFeatures> feats;
  feats.reserve(examples.size());
  for (const auto& ex : examples) feats.push_back(features(ex.x, ex.r));

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  std::uint64_t state = seed ^ 0x5eed5eed5eed5eedULL;
  for (int epoch = 0; epoch < params_.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[uniform_index(state, i)]);
    }
    const double lr = params_.learning_rate / (1.0 + 0.5 * epoch);
    for (std::size_t idx : order) {
      const auto& f = feats[idx];
      const double p = 1.0 / (1.0 + std::exp(-logit(f)));
      const double grad = p - static_cast<double>(examples[idx].y);
      for (const auto& [i, v] : f) {
        weights_[i] -= lr * (grad * v + params_.l2 * weights_[i]);
      }
    }
  }
}

nlohmann::json BowLogisticRetrieval::state() const {
  return {{"buckets", params_.buckets},
          {"epochs", params_.epochs},
          {"learning_rate", params_.learning_rate},
          {"l2", params_.l2},
          {"weights", weights_}};
}

std::unique_ptr<BowLogisticRetrieval> BowLogisticRetrieval::from_state(
    const nlohmann::json& s) {
  Params p;
  p.buckets = s.value("buckets", p.buckets);
  p.epochs = s.value("epochs", p.epochs);
  p.learning_rate = s.value("learning_rate", p.learning_rate);
  p.l2 = s.value("l2", p.l2);
  auto model = std::make_unique<BowLogisticRetrieval>(p);
  if (auto it = s.find("weights"); it != s.end()) {
    auto w = it->get<std::vector<double>>();
    if (w.size() != model->weights_.size()) {
      throw BackendError("toy-bow-logistic: weight vector has " +
                         std::to_string(w.size()) + " entries, expected " +
                         std::to_string(model->weights_.size()));
    }
    model->weights_ = std::move(w);
  }
  return model;
}

}  // namespace usr
