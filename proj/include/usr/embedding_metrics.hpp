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

#ifndef USR_EMBEDDING_METRICS_HPP_
#define USR_EMBEDDING_METRICS_HPP_

#include <vector>

#include "usr/embedding.hpp"
#include "usr/tokenize.hpp"

namespace usr {

enum class GreedyDirection {
  kBidirectional,         // mean of candidate->reference and reference->candidate
  kCandidateToReference,  // only the candidate side is averaged
  kReferenceToCandidate,  // only the reference side; monotone in candidate tokens
};

// Average over candidate tokens of the best cosine against any reference
// token, symmetrised by default. Throws UndefinedScoreError when either side
// has no embeddable token.
double greedy_matching(const TokenSequence& candidate,
                       const TokenSequence& reference,
                       const WordEmbedder& embedder,
                       GreedyDirection direction = GreedyDirection::kBidirectional);

// Cosine of the mean word vectors.
double embedding_average(const TokenSequence& candidate,
                         const TokenSequence& reference,
                         const WordEmbedder& embedder);

// Per dimension, the component of largest magnitude (sign kept). When the
// positive maximum and negative minimum tie in magnitude, the negative wins.
Vector extrema_vector(const std::vector<Vector>& vectors);

double vector_extrema(const TokenSequence& candidate,
                      const TokenSequence& reference,
                      const WordEmbedder& embedder);

// Recall-oriented greedy matching over contextual token vectors, no idf
// weighting: mean over reference tokens of the max cosine against candidate
// tokens.
double bertscore_recall(const TokenSequence& candidate,
                        const TokenSequence& reference,
                        const ContextualEmbedder& encoder);

}  // namespace usr

#endif  // USR_EMBEDDING_METRICS_HPP_
