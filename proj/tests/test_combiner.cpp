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
#include <numeric>
#include <random>

#include "synthetic.hpp"
#include "usr/combiner.hpp"
#include "usr/errors.hpp"
#include "usr/stats.hpp"

namespace usr {
namespace {

std::vector<RegressionRow> linear_rows(std::size_t n, std::uint64_t seed,
                                       std::array<double, 5> beta, double b0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  std::vector<RegressionRow> rows(n);
  for (auto& r : rows) {
    r.overall = b0;
    for (std::size_t k = 0; k < 5; ++k) {
      r.qualities[k] = u(rng);
      r.overall += beta[k] * r.qualities[k];
    }
  }
  return rows;
}

RegressionModel unit_model(std::array<double, 5> w, double intercept = 0.0) {
  RegressionModel m;
  m.weights = w;
  m.intercept = intercept;
  m.normalizer.mean.fill(0.0);
  m.normalizer.stddev.fill(1.0);
  return m;
}

TEST(Regression, RecoversNoiselessLinearData) {
  const auto rows = linear_rows(40, 1, {1.5, -0.5, 2.0, 0.25, 3.0}, 0.7);
  const auto m = fit_regression(rows);
  std::vector<double> pred, truth;
  for (const auto& r : rows) {
    const double p = predict(m, r.qualities);
    EXPECT_LE(std::abs(p - r.overall), 1e-6 * std::max(1.0, std::abs(r.overall)));
    pred.push_back(p);
    truth.push_back(r.overall);
  }
  EXPECT_DOUBLE_EQ(spearman(pred, truth).coefficient, 1.0);
  // Weights act on z-scores: w_k = beta_k * sigma_k.
  EXPECT_NEAR(m.weights[0], 1.5 * m.normalizer.stddev[0], 1e-9);
}

TEST(Regression, DegenerateInputs) {
  auto rows = linear_rows(10, 2, {1, 1, 1, 1, 1}, 0);
  for (auto& r : rows) r.overall = 3.0;
  EXPECT_THROW(fit_regression(rows), DegenerateInputError);
  auto few = linear_rows(5, 2, {1, 1, 1, 1, 1}, 0);
  EXPECT_THROW(fit_regression(few), DegenerateInputError);
  auto flat = linear_rows(10, 2, {1, 1, 1, 1, 1}, 0);
  for (auto& r : flat) r.qualities[3] = 1.0;
  try {
    fit_regression(flat);
    FAIL() << "expected DegenerateInputError";
  } catch (const DegenerateInputError& e) {
    EXPECT_NE(std::string(e.what()).find("interesting"), std::string::npos);
  }
}

TEST(Predict, Examples) {
  const auto rows = linear_rows(20, 3, {1, 2, 3, 4, 5}, 1);
  const auto m = fit_regression(rows);
  QualityVector mean;
  for (std::size_t k = 0; k < 5; ++k) mean[k] = m.normalizer.mean[k];
  EXPECT_NEAR(predict(m, mean), m.intercept, 1e-12);
  EXPECT_DOUBLE_EQ(predict(unit_model({1, 0, 0, 0, 0}), QualityVector{{2, 9, 9, 9, 9}}), 2.0);
}

TEST(Predict, IsAffinePerDimension) {
  const auto m = fit_regression(linear_rows(30, 4, {0.3, 1, -2, 0.5, 1}, 2));
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 200; ++t) {
    QualityVector qv;
    for (std::size_t k = 0; k < 5; ++k) qv[k] = u(rng);
    const std::size_t k = static_cast<std::size_t>(t) % 5;
    const double delta = u(rng);
    QualityVector moved = qv;
    moved[k] += delta;
    EXPECT_NEAR(predict(m, moved) - predict(m, qv),
                m.weights[k] * delta / m.normalizer.stddev[k], 1e-12);
  }
}

TEST(WeightProfile, Examples) {
  for (double p : weight_profile(unit_model({0.3, 0.3, 0.3, 0.3, 0.3}))) {
    EXPECT_NEAR(p, 0.2, 1e-15);
  }
  const auto p = weight_profile(unit_model({1, 0, 0, 0, 0}));
  const double e = std::exp(1.0);
  EXPECT_NEAR(p[0], e / (e + 4), 1e-15);
  EXPECT_NEAR(p[0], 0.4046, 1e-4);
  for (std::size_t k = 1; k < 5; ++k) EXPECT_NEAR(p[k], 0.1488, 1e-4);
}

TEST(WeightProfile, SumsToOneAndIgnoresShift) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> u(-50, 50);
  for (int t = 0; t < 500; ++t) {
    std::array<double, 5> w;
    for (auto& x : w) x = u(rng);
    const auto p = weight_profile(unit_model(w));
    EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-9);
    const double shift = u(rng);
    auto shifted = w;
    for (auto& x : shifted) x += shift;
    const auto q = weight_profile(unit_model(shifted));
    for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(p[k], q[k], 1e-9);
  }
}

AnnotatedDataset annotator_dataset(const std::vector<std::string>& annotators) {
  // Annotator 0 rates overall from naturalness, annotator 1 from knowledge.
  AnnotatedDataset d;
  std::mt19937_64 rng(3);
  for (int i = 0; i < 30; ++i) {
    DialogExample ex;
    ex.example_id = "e" + std::to_string(i);
    ex.context.turns = {{"hi"}};
    ex.response = {"r" + std::to_string(i)};
    ex.system_id = "s" + std::to_string(i % 3);
    d.examples.push_back(ex);
    for (std::size_t a = 0; a < annotators.size(); ++a) {
      QualityAnnotation q;
      q.example_id = ex.example_id;
      q.annotator_id = annotators[a];
      q.understandable = static_cast<int>(rng() % 2);
      q.natural = 1 + static_cast<int>(rng() % 3);
      q.maintains_context = 1 + static_cast<int>(rng() % 3);
      q.interesting = 1 + static_cast<int>(rng() % 3);
      q.uses_knowledge = static_cast<int>(rng() % 2);
      q.overall = a == 0 ? 1 + 2 * (q.natural - 1) : 1 + 4 * q.uses_knowledge;
      d.annotations.push_back(q);
    }
  }
  d.validate();
  return d;
}

TEST(PerAnnotator, SingleAnnotator) {
  const auto fit = fit_per_annotator(annotator_dataset({"solo"}));
  ASSERT_EQ(fit.models.size(), 1u);
  EXPECT_TRUE(fit.models.contains("solo"));
}

TEST(PerAnnotator, OppositeWeightingsDifferInArgmax) {
  const auto fit = fit_per_annotator(annotator_dataset({"nat-fan", "know-fan"}));
  ASSERT_EQ(fit.models.size(), 2u);
  auto argmax = [](const RegressionModel& m) {
    const auto p = weight_profile(m);
    return std::max_element(p.begin(), p.end()) - p.begin();
  };
  EXPECT_EQ(argmax(fit.models.at("nat-fan")), 1);
  EXPECT_EQ(argmax(fit.models.at("know-fan")), 4);
}

TEST(Mapping, ParseAndPrint) {
  const auto def = SubMetricMapping::topical_chat_default();
  EXPECT_EQ(def.to_string(),
            "understandable=usr-mlm,natural=usr-mlm,maintains_context=usr-dr-c,"
            "interesting=usr-dr-c,uses_knowledge=usr-dr-f");
  const auto m = SubMetricMapping::parse("natural=-usr-mlm,uses_knowledge=usr-dr-c");
  EXPECT_EQ(m.dims[1].orientation, Orientation::kNegated);
  EXPECT_EQ(m.dims[4].metric, "usr-dr-c");
  EXPECT_EQ(SubMetricMapping::parse(m.to_string()).to_string(), m.to_string());
  EXPECT_EQ(m.metric_names(), (std::vector<std::string>{"usr-mlm", "usr-dr-c"}));
  EXPECT_THROW(SubMetricMapping::parse("overall=usr-mlm"), ConfigError);
  EXPECT_THROW(SubMetricMapping::parse("natural"), ConfigError);
}

std::vector<ExampleScores> random_batch(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-3, 3);
  std::vector<ExampleScores> out(n);
  for (auto& s : out) {
    s["usr-mlm"] = u(rng);
    s["usr-dr-c"] = u(rng);
    s["usr-dr-f"] = u(rng);
  }
  return out;
}

TEST(UsrScore, ConstantMetricIsDegenerate) {
  const auto m = SubMetricMapping::parse(
      "understandable=k,natural=k,maintains_context=k,interesting=k,uses_knowledge=k");
  std::vector<ExampleScores> batch(5, ExampleScores{{"k", 0.5}});
  EXPECT_THROW(usr_scores(unit_model({1, 1, 1, 1, 1}), m, batch), DegenerateInputError);
}

TEST(UsrScore, MissingMetricIsIncomplete) {
  auto batch = random_batch(4, 1);
  batch[2].erase("usr-dr-f");
  EXPECT_THROW(usr_scores(unit_model({1, 1, 1, 1, 1}), SubMetricMapping::topical_chat_default(),
                          batch),
               IncompleteInputError);
}

TEST(UsrScore, DominantResponseIsBatchMax) {
  const auto mapping = SubMetricMapping::topical_chat_default();
  const auto model = unit_model({0.4, 0.1, 0.7, 0.2, 0.9}, 3.0);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    auto batch = random_batch(12, seed);
    ExampleScores top{{"usr-mlm", 3.5}, {"usr-dr-c", 3.5}, {"usr-dr-f", 3.5}};
    batch.insert(batch.begin() + static_cast<long>(seed % 12), top);
    const auto usr = usr_scores(model, mapping, batch);
    EXPECT_EQ(std::max_element(usr.begin(), usr.end()) - usr.begin(),
              static_cast<long>(seed % 12));
  }
}

TEST(UsrScore, BatchZScoresRemovePositiveAffineTransforms) {
  const auto mapping = SubMetricMapping::topical_chat_default();
  const auto model = unit_model({0.4, -0.1, 0.7, 0.2, 0.9}, 3.0);
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> scale(0.01, 100), shift(-100, 100);
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto batch = random_batch(15, seed);
    const auto base = usr_scores(model, mapping, batch);
    for (const char* metric : {"usr-mlm", "usr-dr-c", "usr-dr-f"}) {
      auto moved = batch;
      const double a = scale(rng), b = shift(rng);
      for (auto& s : moved) s[metric] = a * s[metric] + b;
      const auto got = usr_scores(model, mapping, moved);
      for (std::size_t i = 0; i < got.size(); ++i) EXPECT_NEAR(got[i], base[i], 1e-9);
    }
  }
}

TEST(UsrScore, FrozenUsesStoredNormalizer) {
  const auto mapping = SubMetricMapping::topical_chat_default();
  auto model = unit_model({1, 0, 0, 0, 0}, 0.0);
  model.normalizer.mean[0] = 1.0;
  model.normalizer.stddev[0] = 2.0;
  const std::vector<ExampleScores> batch = {
      {{"usr-mlm", 5.0}, {"usr-dr-c", 0.1}, {"usr-dr-f", 0.2}}};
  EXPECT_DOUBLE_EQ(usr_scores(model, mapping, batch, NormStats::kFrozen)[0], 2.0);
}

TEST(RegressionJson, RoundTrip) {
  auto m = fit_regression(linear_rows(12, 8, {1, 2, 3, 4, 5}, 1));
  m.fingerprint = "abc";
  const auto m2 = regression_model_from_json(nlohmann::json::parse(
      regression_model_to_json(m).dump()));
  EXPECT_EQ(m2.weights, m.weights);
  EXPECT_EQ(m2.intercept, m.intercept);
  EXPECT_EQ(m2.normalizer.stddev, m.normalizer.stddev);
  EXPECT_EQ(m2.fingerprint, "abc");
}

TEST(MeanRatingRows, AveragesAnnotators) {
  const auto d = testing::three_system_dataset(3);
  const auto rows = mean_rating_rows(d);
  EXPECT_EQ(rows.size(), d.examples.size());
  const auto anns = d.annotations_for(d.examples[0].example_id);
  double overall = 0.0;
  for (const auto* a : anns) overall += a->overall;
  EXPECT_DOUBLE_EQ(rows[0].overall, overall / static_cast<double>(anns.size()));
  EXPECT_EQ(mean_rating_rows(d, false).size(), 9u);
}

}  // namespace
}  // namespace usr
