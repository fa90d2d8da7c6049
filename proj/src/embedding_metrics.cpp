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

#include "usr/embedding_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "usr/errors.hpp"

namespace usr {
namespace {

std::vector<Vector> embed_side(const TokenSequence& tokens,
                               const WordEmbedder& embedder,
                               const char* metric, const char* side) {
  auto vectors = embedder.embed(tokens);
  if (vectors.empty()) {
    throw UndefinedScoreError(std::string(metric) + ": " + side +
                              " has no embeddable tokens");
  }
  return vectors;
}

double directed_greedy(const std::vector<Vector>& from,
                       const std::vector<Vector>& to) {
  double sum = 0.0;
  for (const auto& u : from) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& v : to) best = std::max(best, cosine(u, v));
    sum += best;
  }
  return sum / static_cast<double>(from.size());
}

Vector mean_vector(const std::vector<Vector>& vectors, std::size_t dim) {
  Vector mean(dim, 0.0);
  for (const auto& v : vectors) {
    for (std::size_t k = 0; k < dim; ++k) mean[k] += v[k];
  }
  for (auto& x : mean) x /= static_cast<double>(vectors.size());
  return mean;
}

double sentence_cosine(const Vector& a, const Vector& b, const char* metric) {
  if (norm(a) == 0.0 || norm(b) == 0.0) {
    throw UndefinedScoreError(std::string(metric) +
                              ": sentence vector is zero");
  }
  return cosine(a, b);
}

}  // namespace

double greedy_matching(const TokenSequence& candidate,
                       const TokenSequence& reference,
                       const WordEmbedder& embedder,
                       GreedyDirection direction) {
  const auto cand = embed_side(candidate, embedder, "greedy_matching", "candidate");
  const auto ref = embed_side(reference, embedder, "greedy_matching", "reference");
  switch (direction) {
    case GreedyDirection::kCandidateToReference:
      return directed_greedy(cand, ref);
    case GreedyDirection::kReferenceToCandidate:
      return directed_greedy(ref, cand);
    case GreedyDirection::kBidirectional:
      break;
  }
  return 0.5 * (directed_greedy(cand, ref) + directed_greedy(ref, cand));
}

double embedding_average(const TokenSequence& candidate,
                         const TokenSequence& reference,
                         const WordEmbedder& embedder) {
  const auto cand = embed_side(candidate, embedder, "embedding_average", "candidate");
  const auto ref = embed_side(reference, embedder, "embedding_average", "reference");
  const std::size_t d = embedder.dimension();
  return sentence_cosine(mean_vector(cand, d), mean_vector(ref, d),
                         "embedding_average");
}

Vector extrema_vector(const std::vector<Vector>& vectors) {
  if (vectors.empty()) return {};
  const std::size_t d = vectors.front().size();
  Vector out(d, 0.0);
  for (std::size_t k = 0; k < d; ++k) {
    double hi = -std::numeric_limits<double>::infinity();
    double lo = std::numeric_limits<double>::infinity();
    for (const auto& v : vectors) {
      hi = std::max(hi, v[k]);
      lo = std::min(lo, v[k]);
    }
    out[k] = hi > std::abs(lo) ? hi : lo;
  }
  return out;
}

double vector_extrema(const TokenSequence& candidate,
                      const TokenSequence& reference,
                      const WordEmbedder& embedder) {
  const auto cand = embed_side(candidate, embedder, "vector_extrema", "candidate");
  const auto ref = embed_side(reference, embedder, "vector_extrema", "reference");
  return sentence_cosine(extrema_vector(cand), extrema_vector(ref),
                         "vector_extrema");
}

double bertscore_recall(const TokenSequence& candidate,
                        const TokenSequence& reference,
                        const ContextualEmbedder& encoder) {
  if (candidate.empty() || reference.empty()) {
    throw PreconditionError("bertscore_recall: both sequences must be non-empty");
  }
  const auto cand = encoder.encode(candidate);
  const auto ref = encoder.encode(reference);
  if (cand.size() != candidate.size() || ref.size() != reference.size()) {
    throw BackendError("bertscore_recall: encoder returned " +
                       std::to_string(cand.size()) + "/" +
                       std::to_string(ref.size()) + " vectors for " +
                       std::to_string(candidate.size()) + "/" +
                       std::to_string(reference.size()) + " tokens");
  }
  return directed_greedy(ref, cand);
}

}  // namespace usr
