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

#include <string>
#include <unordered_map>
#include <unordered_set>

#include "usr/corpus.hpp"
#include "usr/errors.hpp"
#include "usr/hashing.hpp"

namespace usr {

std::string_view retrieval_variant_name(RetrievalVariant variant) {
  return variant == RetrievalVariant::kContext ? "context" : "fact";
}

TokenSequence retrieval_input(const DialogExample& example,
                              RetrievalVariant variant) {
  if (variant == RetrievalVariant::kFact) return example.fact;
  TokenSequence x = example.context.flattened();
  x.insert(x.end(), example.fact.begin(), example.fact.end());
  return x;
}

std::vector<RetrievalExample> build_retrieval_examples(
    const std::vector<DialogExample>& corpus, RetrievalVariant variant,
    int negative_ratio, std::uint64_t seed) {
  if (negative_ratio < 1) {
    throw ArgumentError("negative_ratio must be a positive integer");
  }
  if (variant == RetrievalVariant::kFact) {
    bool any_fact = false;
    for (const auto& ex : corpus) any_fact = any_fact || !ex.fact.empty();
    if (!any_fact) {
      throw UnavailableVariantError(
          "retrieval variant 'fact' needs grounding facts, but the corpus has "
          "none");
    }
  }

  // Distinct responses in first-seen order form the negative pool.
  std::vector<const TokenSequence*> pool;
  std::unordered_map<std::string, std::size_t> pool_index;
  std::vector<std::size_t> gold_slot(corpus.size());
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto [it, inserted] =
        pool_index.emplace(join_tokens(corpus[i].response), pool.size());
    if (inserted) pool.push_back(&corpus[i].response);
    gold_slot[i] = it->second;
  }
  if (pool.size() < 2) {
    throw PreconditionError(
        "retrieval examples need at least two distinct responses");
  }
  if (pool.size() - 1 < static_cast<std::size_t>(negative_ratio)) {
    throw PreconditionError("negative_ratio " + std::to_string(negative_ratio) +
                            " exceeds the " + std::to_string(pool.size() - 1) +
                            " available negative responses");
  }

  std::uint64_t state = seed;
  std::vector<RetrievalExample> out;
  out.reserve(corpus.size() * (1 + negative_ratio));
  std::unordered_set<std::size_t> picked;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    const auto& ex = corpus[i];
    // Examples without a fact cannot form an x=f pair and are skipped.
    if (variant == RetrievalVariant::kFact && ex.fact.empty()) continue;
    TokenSequence x = retrieval_input(ex, variant);
    out.push_back({x, ex.response, 1});
    picked.clear();
    while (picked.size() < static_cast<std::size_t>(negative_ratio)) {
      const std::size_t k = uniform_index(state, pool.size());
      if (k == gold_slot[i] || !picked.insert(k).second) continue;
      out.push_back({x, *pool[k], 0});
    }
  }
  return out;
}

}  // namespace usr
