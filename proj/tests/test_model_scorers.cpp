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
#include <filesystem>
#include <set>

#include "synthetic.hpp"
#include "usr/backend_registry.hpp"
#include "usr/errors.hpp"
#include "usr/model_scorers.hpp"
#include "usr/toy_backends.hpp"

namespace usr {
namespace {

using testing::toks;

// Records every call; answers log(0.5).
class RecordingLM : public MaskedLMBackend {
 public:
  struct Call {
    std::vector<std::string> input;
    std::size_t position;
    std::string target;
  };
  std::string id() const override { return "recording"; }
  double masked_log_likelihood(std::span<const std::string> masked, std::size_t position,
                               const std::string& target) const override {
    calls.push_back({{masked.begin(), masked.end()}, position, target});
    return std::log(0.5);
  }
  std::size_t max_length() const override { return max_len; }
  bool supports_training() const override { return true; }
  void fine_tune(std::span<const TokenSequence> corpus, int epochs) override {
    trained_on.assign(corpus.begin(), corpus.end());
    trained_epochs = epochs;
  }
  nlohmann::json state() const override { return nlohmann::json::object(); }

  mutable std::vector<Call> calls;
  std::size_t max_len = 512;
  std::vector<TokenSequence> trained_on;
  int trained_epochs = 0;
};

class RecordingRetrieval : public RetrievalBackend {
 public:
  std::string id() const override { return "recording"; }
  double probability(const TokenSequence&, const TokenSequence&) const override { return p; }
  bool supports_training() const override { return true; }
  void train(std::span<const RetrievalExample> examples, std::uint64_t) override {
    seen.assign(examples.begin(), examples.end());
  }
  nlohmann::json state() const override { return nlohmann::json::object(); }
  std::vector<RetrievalExample> seen;
  double p = 0.5;
};

DialogContext ctx(std::initializer_list<const char*> turns) {
  DialogContext c;
  for (const char* t : turns) c.turns.push_back(toks(t));
  return c;
}

TEST(MlmScore, MasksOneResponseTokenPerCall) {
  RecordingLM lm;
  const auto c = ctx({"how are you", "fine thanks"});
  const auto r = toks("glad to hear it");
  const auto s = mlm_score(c, r, lm);
  ASSERT_EQ(lm.calls.size(), r.size());
  const std::size_t offset = c.token_count();
  for (std::size_t k = 0; k < lm.calls.size(); ++k) {
    const auto& call = lm.calls[k];
    EXPECT_EQ(call.position, offset + k);
    EXPECT_EQ(call.target, r[k]);
    EXPECT_EQ(std::count(call.input.begin(), call.input.end(), std::string(kMaskToken)), 1);
    EXPECT_EQ(call.input[call.position], kMaskToken);
    // Context tokens are always visible.
    EXPECT_TRUE(std::equal(call.input.begin(), call.input.begin() + static_cast<long>(offset),
                           c.flattened().begin()));
  }
  double sum = 0.0;
  for (const auto& t : s.per_token) sum -= t.log_likelihood;
  EXPECT_DOUBLE_EQ(s.total_nll, sum);
}

TEST(MlmScore, UniformBackendIsAnalytic) {
  UniformMaskedLM lm(1000);
  for (const char* text : {"a", "a b c", "one two three four five six"}) {
    const auto r = toks(text);
    const auto s = mlm_score(ctx({"whatever context"}), r, lm);
    EXPECT_NEAR(s.total_nll, static_cast<double>(r.size()) * std::log(1000.0), 1e-9);
    EXPECT_NEAR(s.length_normalized_nll, std::log(1000.0), 1e-12);
  }
}

TEST(MlmScore, SingleTokenAndEmpty) {
  CountingMaskedLM lm;
  const auto s = mlm_score(ctx({"hello there"}), toks("hi"), lm);
  ASSERT_EQ(s.per_token.size(), 1u);
  EXPECT_DOUBLE_EQ(s.total_nll, -s.per_token[0].log_likelihood);
  EXPECT_DOUBLE_EQ(s.total_nll, s.length_normalized_nll);
  EXPECT_THROW(mlm_score(ctx({"hello"}), {}, lm), PreconditionError);
}

TEST(MlmScore, TruncatesOldestContext) {
  RecordingLM lm;
  lm.max_len = 6;
  mlm_score(ctx({"old old old", "new new"}), toks("x y"), lm);
  ASSERT_FALSE(lm.calls.empty());
  EXPECT_EQ(lm.calls[0].input.size(), 6u);
  // Seven tokens for a budget of six: the first "old" goes.
  EXPECT_EQ(lm.calls[0].input[1], "old");
  EXPECT_EQ(lm.calls[0].input[2], "new");
  EXPECT_EQ(lm.calls[0].position, 4u);
  lm.max_len = 1;
  EXPECT_THROW(mlm_score(ctx({"c"}), toks("x y"), lm), PreconditionError);
}

TEST(MlmScore, PositiveLogLikelihoodIsAContractError) {
  class Bad : public RecordingLM {
    double masked_log_likelihood(std::span<const std::string>, std::size_t,
                                 const std::string&) const override {
      return 0.1;
    }
  } bad;
  EXPECT_THROW(mlm_score(ctx({"c"}), toks("x"), bad), BackendContractError);
}

TEST(MlmMetric, Orientation) {
  MlmScore s;
  s.per_token.resize(4);
  s.total_nll = 12.0;
  s.length_normalized_nll = 3.0;
  EXPECT_DOUBLE_EQ(mlm_metric_value(s, MlmOrientation::kRawNll, false), 12.0);
  EXPECT_DOUBLE_EQ(mlm_metric_value(s, MlmOrientation::kHigherIsBetter, false), -12.0);
  EXPECT_DOUBLE_EQ(mlm_metric_value(s, MlmOrientation::kRawNll, true), 3.0);
  EXPECT_DOUBLE_EQ(mlm_metric_value(s, MlmOrientation::kHigherIsBetter, true), -3.0);
  EXPECT_EQ(parse_mlm_orientation("raw-nll"), MlmOrientation::kRawNll);
}

TEST(MlmTraining, DefaultsToOneEpochAndNeverSeesFacts) {
  auto corpus = testing::separable_corpus(5, 2);
  for (auto& e : corpus) e.fact = {"factonly", "zzz"};
  auto trained = fine_tune_mlm(std::make_unique<RecordingLM>(), corpus);
  auto* rec = dynamic_cast<RecordingLM*>(trained.get());
  ASSERT_NE(rec, nullptr);
  EXPECT_EQ(rec->trained_epochs, 1);
  ASSERT_FALSE(rec->trained_on.empty());
  for (const auto& seq : rec->trained_on) {
    for (const auto& t : seq) {
      EXPECT_NE(t, "factonly");
      EXPECT_NE(t, "zzz");
    }
  }
  EXPECT_THROW(fine_tune_mlm(std::make_unique<UniformMaskedLM>(10), corpus),
               UnsupportedOperationError);
}

TEST(MlmTraining, CountingLmLearnsSeenBigrams) {
  std::vector<DialogExample> corpus(3);
  const char* lines[] = {"the cat sat", "the dog ran", "a cat ran"};
  for (int i = 0; i < 3; ++i) {
    corpus[i].context.turns = {toks("hi")};
    corpus[i].response = toks(lines[i]);
  }
  CountingMaskedLM fresh;
  auto trained = fine_tune_mlm(std::make_unique<CountingMaskedLM>(), corpus);
  auto* lm = dynamic_cast<CountingMaskedLM*>(trained.get());
  ASSERT_NE(lm, nullptr);
  for (auto [a, b] : std::vector<std::pair<const char*, const char*>>{
           {"the", "cat"}, {"cat", "sat"}, {"dog", "ran"}, {"a", "cat"}}) {
    EXPECT_GT(lm->bigram_probability(a, b), fresh.bigram_probability(a, b)) << a << " " << b;
  }
  const auto before = mlm_score(ctx({"hi"}), toks("the cat sat"), fresh);
  const auto after = mlm_score(ctx({"hi"}), toks("the cat sat"), *lm);
  EXPECT_LT(after.total_nll, before.total_nll);
}

TEST(MlmScore, Deterministic) {
  const auto d = testing::three_system_dataset(4);
  auto lm = fine_tune_mlm(std::make_unique<CountingMaskedLM>(), d.examples);
  for (const auto& ex : d.examples) {
    const auto a = mlm_score(ex.context, ex.response, *lm);
    const auto b = mlm_score(ex.context, ex.response, *lm);
    EXPECT_EQ(a.total_nll, b.total_nll);
  }
}

TEST(DrScore, ConstantAndContract) {
  ConstantRetrieval c;
  EXPECT_DOUBLE_EQ(dr_score(toks("any x"), toks("any r"), c), 0.5);
  EXPECT_THROW(dr_score(toks("x"), {}, c), PreconditionError);
  RecordingRetrieval bad;
  bad.p = 1.0;
  EXPECT_THROW(dr_score(toks("x"), toks("r"), bad), BackendContractError);
  bad.p = std::nan("");
  EXPECT_THROW(dr_score(toks("x"), toks("r"), bad), BackendContractError);
}

TEST(DrTraining, VariantsBuildTheirInputs) {
  const auto corpus = testing::separable_corpus(6, 4);
  auto ctx_backend = train_dr(std::make_unique<RecordingRetrieval>(), corpus,
                              RetrievalVariant::kContext, 1, 3);
  auto* rc = dynamic_cast<RecordingRetrieval*>(ctx_backend.get());
  ASSERT_NE(rc, nullptr);
  for (const auto& e : rc->seen) {
    const auto it = std::find_if(corpus.begin(), corpus.end(), [&](const auto& ex) {
      return std::search(e.x.begin(), e.x.end(), ex.fact.begin(), ex.fact.end()) != e.x.end();
    });
    ASSERT_NE(it, corpus.end());
    EXPECT_EQ(e.x, retrieval_input(*it, RetrievalVariant::kContext));
    EXPECT_GT(e.x.size(), it->fact.size());
  }
  auto fact_backend = train_dr(std::make_unique<RecordingRetrieval>(), corpus,
                               RetrievalVariant::kFact, 1, 3);
  auto* rf = dynamic_cast<RecordingRetrieval*>(fact_backend.get());
  std::set<TokenSequence> facts;
  for (const auto& ex : corpus) facts.insert(ex.fact);
  for (const auto& e : rf->seen) EXPECT_TRUE(facts.contains(e.x));
}

TEST(DrTraining, SeparableCorpusHeldOut) {
  const auto train = testing::separable_corpus(60, 1);
  auto test = testing::separable_corpus(100, 2);
  test.erase(test.begin(), test.begin() + 60);  // keys 60..99 never seen
  auto dr = train_dr(std::make_unique<BowLogisticRetrieval>(), train,
                     RetrievalVariant::kContext, 1, 17);
  const auto held = build_retrieval_examples(test, RetrievalVariant::kContext, 1, 5);
  std::size_t correct = 0;
  for (const auto& e : held) {
    const double p = dr_score(e.x, e.r, *dr);
    EXPECT_GT(p, 0.0);
    EXPECT_LT(p, 1.0);
    if ((p > 0.5) == (e.y == 1)) ++correct;
  }
  EXPECT_GT(static_cast<double>(correct) / static_cast<double>(held.size()), 0.9);
}

TEST(Checkpoint, RoundTripKeepsScores) {
  const auto d = testing::three_system_dataset(4);
  auto lm = fine_tune_mlm(std::make_unique<CountingMaskedLM>(), d.examples);
  auto dr = train_dr(std::make_unique<BowLogisticRetrieval>(), d.examples,
                     RetrievalVariant::kContext, 1, 9);
  const auto dir = std::filesystem::temp_directory_path() / "usr-ckpt-test";
  std::filesystem::remove_all(dir);
  CheckpointManifest m;
  m.backend_id = lm->id();
  m.kind = "mlm";
  save_checkpoint(dir / "mlm", m, lm->state());
  m.backend_id = dr->id();
  m.kind = "retrieval";
  m.variant = "context";
  save_checkpoint(dir / "dr", m, dr->state());
  auto lm2 = load_masked_lm_checkpoint(dir / "mlm");
  auto dr2 = load_retrieval_checkpoint(dir / "dr");
  EXPECT_EQ(read_manifest(dir / "dr").variant, "context");
  EXPECT_THROW(load_masked_lm_checkpoint(dir / "dr"), Error);
  for (const auto& ex : d.examples) {
    EXPECT_EQ(mlm_score(ex.context, ex.response, *lm).total_nll,
              mlm_score(ex.context, ex.response, *lm2).total_nll);
    const auto x = retrieval_input(ex, RetrievalVariant::kContext);
    EXPECT_EQ(dr->probability(x, ex.response), dr2->probability(x, ex.response));
  }
  std::filesystem::remove_all(dir);
  EXPECT_THROW(make_masked_lm("no-such-backend"), ConfigError);
}

}  // namespace
}  // namespace usr
