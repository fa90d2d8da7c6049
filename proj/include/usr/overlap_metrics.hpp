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

#ifndef USR_OVERLAP_METRICS_HPP_
#define USR_OVERLAP_METRICS_HPP_

#include <cstddef>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "usr/tokenize.hpp"

namespace usr {

// Multiset of n-grams of one order.
class NGramProfile {
 public:
  NGramProfile(const TokenSequence& tokens, int n);

  int order() const { return n_; }
  // max(0, |tokens| - n + 1).
  std::size_t total() const { return total_; }
  std::size_t count(const std::vector<std::string>& ngram) const;
  const std::map<std::vector<std::string>, std::size_t>& counts() const {
    return counts_;
  }

 private:
  int n_;
  std::size_t total_ = 0;
  std::map<std::vector<std::string>, std::size_t> counts_;
};

// Unigram F1 with clipped multiset overlap. Empty candidate scores 0; an
// empty reference throws PreconditionError.
double f1_score(const TokenSequence& candidate, const TokenSequence& reference);

enum class BleuSmoothing {
  kNone,    // any zero precision makes the score 0
  kAddOne,  // add one to numerator and denominator for n > 1
};

// Sentence-level BLEU over n = 1..max_n with the closest-reference-length
// brevity penalty. max_n outside 1..4 throws ArgumentError.
double bleu_score(const TokenSequence& candidate,
                  const std::vector<TokenSequence>& references, int max_n,
                  BleuSmoothing smoothing = BleuSmoothing::kNone);

// Clipped n-gram matches of the candidate against the references (per-ngram
// minimum of candidate count and max reference count).
std::size_t clipped_matches(const TokenSequence& candidate,
                            const std::vector<TokenSequence>& references,
                            int n);

// Suffix-stripping stemmer used by METEOR's stem stage.
inline constexpr std::string_view kStemmerVersion = "usr-stem-1";
std::string stem(std::string_view word);

// Synonym lookup for METEOR's third stage: two words are synonyms when they
// share a synset id. Empty by default.
class SynonymTable {
 public:
  void add_synset(const std::vector<std::string>& words);
  bool synonyms(const std::string& a, const std::string& b) const;
  bool empty() const { return synsets_.empty(); }

 private:
  std::unordered_map<std::string, std::set<std::size_t>> synsets_;
  std::size_t next_id_ = 0;
};

struct MeteorParams {
  double alpha = 0.9;
  double beta = 3.0;
  double gamma = 0.5;
};

struct MeteorAlignment {
  // (candidate position, reference position) pairs sorted by candidate position.
  std::vector<std::pair<std::size_t, std::size_t>> matches;
  std::size_t chunks = 0;
};

// Staged exact -> stem -> synonym alignment. Within a stage each candidate
// token, left to right, takes the leftmost free reference token that matches.
MeteorAlignment meteor_align(const TokenSequence& candidate,
                             const TokenSequence& reference,
                             const SynonymTable& synonyms);

// Both sides must be non-empty (PreconditionError).
double meteor_score(const TokenSequence& candidate,
                    const TokenSequence& reference,
                    const MeteorParams& params = {},
                    const SynonymTable& synonyms = {});

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b);

// Balanced ROUGE-L F-measure. Both sides must be non-empty.
double rouge_l_score(const TokenSequence& candidate,
                     const TokenSequence& reference);

}  // namespace usr

#endif  // USR_OVERLAP_METRICS_HPP_
