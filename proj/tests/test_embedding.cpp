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

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "synthetic.hpp"
#include "usr/embedding.hpp"
#include "usr/embedding_metrics.hpp"
#include "usr/errors.hpp"

namespace usr {
namespace {

using testing::toks;

StaticEmbeddings toy2d() {
  const double h = 1.0 / std::sqrt(2.0);
  return StaticEmbeddings({{"a", {1, 0}}, {"b", {0, 1}}, {"c", {h, h}}});
}

// Context-free encoder over a fixed table.
class TableEncoder : public ContextualEmbedder {
 public:
  explicit TableEncoder(std::unordered_map<std::string, Vector> t) : t_(std::move(t)) {}
  std::size_t dimension() const override { return 2; }
  std::vector<Vector> encode(const TokenSequence& tokens) const override {
    std::vector<Vector> out;
    for (const auto& tok : tokens) out.push_back(t_.at(tok));
    return out;
  }

 private:
  std::unordered_map<std::string, Vector> t_;
};

TEST(StaticEmbeddings, ParsesWord2VecHeader) {
  std::istringstream in("2 3\nfoo 1 0 0\nbar 0 1 0\n");
  const auto e = StaticEmbeddings::parse(in);
  EXPECT_EQ(e.size(), 2u);
  EXPECT_EQ(e.dimension(), 3u);
  EXPECT_EQ(*e.find("bar"), (Vector{0, 1, 0}));
  EXPECT_FALSE(e.find("baz").has_value());
}

TEST(Greedy, Examples) {
  const auto e = toy2d();
  EXPECT_NEAR(greedy_matching(toks("a b c"), toks("a b c"), e), 1.0, 1e-12);
  EXPECT_NEAR(greedy_matching(toks("a"), toks("b"), e), 0.0, 1e-12);
  EXPECT_NEAR(greedy_matching(toks("a"), toks("c"), e), 0.7071, 1e-4);
  EXPECT_NEAR(greedy_matching(toks("a"), toks("c"), e, GreedyDirection::kCandidateToReference),
              1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(greedy_matching(toks("c"), toks("a"), e, GreedyDirection::kCandidateToReference),
              1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_THROW(greedy_matching(toks("zzz"), toks("a"), e), UndefinedScoreError);
}

TEST(EmbeddingAverage, Examples) {
  const auto e = toy2d();
  EXPECT_NEAR(embedding_average(toks("a b"), toks("a b"), e), 1.0, 1e-12);
  StaticEmbeddings anti({{"p", {1, 0}}, {"q", {-1, 0}}});
  EXPECT_NEAR(embedding_average(toks("p"), toks("q"), anti), -1.0, 1e-12);
  EXPECT_NEAR(embedding_average(toks("a b"), toks("a"), e), 0.7071, 1e-4);
}

TEST(VectorExtrema, Examples) {
  EXPECT_EQ(extrema_vector({{1, -3}, {2, 1}}), (Vector{2, -3}));
  EXPECT_EQ(extrema_vector({{2, 0}, {-2, 0}}), (Vector{-2, 0}));
  const auto e = toy2d();
  EXPECT_NEAR(vector_extrema(toks("a"), toks("c"), e), cosine({1, 0}, {1, 1}), 1e-12);
  EXPECT_NEAR(vector_extrema(toks("a b c"), toks("a b c"), e), 1.0, 1e-12);
}

TEST(VectorExtrema, MatchesPerDimensionScan) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 500; ++t) {
    std::vector<Vector> vs(1 + t % 6, Vector(5));
    for (auto& v : vs) for (auto& x : v) x = std::round(u(rng) * 4) / 4;
    const Vector got = extrema_vector(vs);
    for (std::size_t d = 0; d < 5; ++d) {
      double best = vs[0][d];
      for (const auto& v : vs) {
        const double x = v[d];
        if (std::abs(x) > std::abs(best) || (std::abs(x) == std::abs(best) && x < best)) {
          best = x;
        }
      }
      ASSERT_EQ(got[d], best);
    }
  }
}

TEST(VectorExtrema, IdempotentUnderDuplication) {
  HashEmbedder e(16, 4);
  const auto x = toks("some words here");
  TokenSequence doubled = x;
  doubled.insert(doubled.end(), x.begin(), x.end());
  EXPECT_NEAR(vector_extrema(x, doubled, e), vector_extrema(x, x, e), 1e-12);
}

TEST(BertScore, Examples) {
  ToyContextualEncoder enc(std::make_shared<HashEmbedder>(16, 1));
  EXPECT_NEAR(bertscore_recall(toks("the cat sat"), toks("the cat sat"), enc), 1.0, 1e-12);

  TableEncoder table({{"r", {1, 0}},
                      {"p", {0.2, std::sqrt(1 - 0.04)}},
                      {"q", {0.9, std::sqrt(1 - 0.81)}}});
  EXPECT_NEAR(bertscore_recall(toks("p q"), toks("r"), table), 0.9, 1e-12);
  EXPECT_THROW(bertscore_recall({}, toks("r"), table), PreconditionError);
}

TEST(EmbeddingMetrics, MonotoneInCandidateAdditionAndBounded) {
  auto base = std::make_shared<HashEmbedder>(8, 9);
  ToyContextualEncoder enc(base, 0.0);  // no context mixing: pure max over a superset
  std::mt19937_64 rng(4);
  const std::vector<std::string> words = {"a", "b", "c", "d", "e", "f", "g", "h"};
  std::uniform_int_distribution<std::size_t> pick(0, words.size() - 1);
  for (int t = 0; t < 300; ++t) {
    TokenSequence cand, ref;
    for (int i = 0; i < 3; ++i) cand.push_back(words[pick(rng)]);
    for (int i = 0; i < 4; ++i) ref.push_back(words[pick(rng)]);
    TokenSequence more = cand;
    more.push_back(words[pick(rng)]);
    EXPECT_GE(greedy_matching(more, ref, *base, GreedyDirection::kReferenceToCandidate) + 1e-12,
              greedy_matching(cand, ref, *base, GreedyDirection::kReferenceToCandidate));
    EXPECT_GE(bertscore_recall(more, ref, enc) + 1e-12, bertscore_recall(cand, ref, enc));
    const double g = greedy_matching(cand, ref, *base);
    EXPECT_GE(g, -1.0);
    EXPECT_LE(g, 1.0);
    for (double s : {embedding_average(cand, ref, *base), vector_extrema(cand, ref, *base)}) {
      EXPECT_GE(s, -1.0 - 1e-12);
      EXPECT_LE(s, 1.0 + 1e-12);
    }
  }
}

TEST(EmbeddingMetrics, NonNegativeEmbeddingsGiveUnitRange) {
  StaticEmbeddings e({{"a", {1, 0, 2}}, {"b", {0, 3, 1}}, {"c", {2, 2, 0}}});
  for (const auto& [x, y] : std::vector<std::pair<std::string, std::string>>{
           {"a b", "c"}, {"a", "b"}, {"c c a", "b a"}}) {
    for (double s : {greedy_matching(toks(x), toks(y), e),
                     embedding_average(toks(x), toks(y), e),
                     vector_extrema(toks(x), toks(y), e)}) {
      EXPECT_GE(s, 0.0);
      EXPECT_LE(s, 1.0 + 1e-12);
    }
  }
}

}  // namespace
}  // namespace usr
