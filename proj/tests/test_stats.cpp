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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "usr/errors.hpp"
#include "usr/stats.hpp"

namespace usr {
namespace {

// Average ranks by counting: rank = #smaller + (#equal + 1) / 2.
std::vector<long double> oracle_ranks(const std::vector<double>& v) {
  std::vector<long double> r(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    long double less = 0, equal = 0;
    for (double w : v) {
      if (w < v[i]) ++less;
      if (w == v[i]) ++equal;
    }
    r[i] = less + (equal + 1) / 2;
  }
  return r;
}

long double oracle_pearson(const std::vector<long double>& x, const std::vector<long double>& y) {
  const long double n = static_cast<long double>(x.size());
  long double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) { mx += x[i]; my += y[i]; }
  mx /= n;
  my /= n;
  long double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

bool constant(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [&](double x) { return x == v[0]; });
}

TEST(Spearman, Examples) {
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{10, 20, 30}).coefficient, 1.0);
  EXPECT_DOUBLE_EQ(spearman(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}).coefficient, -1.0);
  // Ranks (1, 2.5, 2.5, 4) and (1, 3, 2, 4): Pearson of ranks is 3/sqrt(10).
  const auto r = spearman(std::vector<double>{1, 2, 2, 4}, std::vector<double>{1, 3, 2, 4});
  EXPECT_NEAR(r.coefficient, 3.0 / std::sqrt(10.0), 1e-15);
  EXPECT_NEAR(r.coefficient, 0.948683, 1e-6);
}

TEST(Spearman, ExhaustiveSmallInstances) {
  // Every pair of length-n vectors over {1, 2, 3} for n = 3, 4.
  for (std::size_t n = 3; n <= 4; ++n) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= 3;
    for (std::size_t a = 0; a < total; ++a) {
      std::vector<double> x(n);
      for (std::size_t i = 0, c = a; i < n; ++i, c /= 3) x[i] = 1.0 + static_cast<double>(c % 3);
      if (constant(x)) continue;
      for (std::size_t b = 0; b < total; ++b) {
        std::vector<double> y(n);
        for (std::size_t i = 0, c = b; i < n; ++i, c /= 3) y[i] = 1.0 + static_cast<double>(c % 3);
        if (constant(y)) continue;
        const double want = static_cast<double>(oracle_pearson(oracle_ranks(x), oracle_ranks(y)));
        ASSERT_NEAR(spearman(x, y).coefficient, want, 1e-12);
      }
    }
  }
}

TEST(Spearman, SampledUpToLengthEight) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> len(3, 8), val(1, 4);
  for (int t = 0; t < 5000; ++t) {
    const std::size_t n = static_cast<std::size_t>(len(rng));
    std::vector<double> x(n), y(n);
    for (auto& v : x) v = val(rng);
    for (auto& v : y) v = val(rng);
    if (constant(x) || constant(y)) continue;
    const double want = static_cast<double>(oracle_pearson(oracle_ranks(x), oracle_ranks(y)));
    ASSERT_NEAR(spearman(x, y).coefficient, want, 1e-12);
  }
}

TEST(Spearman, MonotoneInvarianceSymmetryRange) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 1000; ++t) {
    std::vector<double> x(10), y(10);
    for (auto& v : x) v = std::round(g(rng) * 3);
    for (auto& v : y) v = std::round(g(rng) * 3);
    if (constant(x) || constant(y)) continue;
    const double rho = spearman(x, y).coefficient;
    std::vector<double> fx(x);
    for (auto& v : fx) v = std::exp(v / 2) + 0.5 * v * v * v;
    EXPECT_NEAR(spearman(fx, y).coefficient, rho, 1e-9);
    EXPECT_NEAR(spearman(y, x).coefficient, rho, 1e-15);
    EXPECT_GE(rho, -1.0);
    EXPECT_LE(rho, 1.0);
  }
}

TEST(Pearson, Examples) {
  std::vector<double> x = {0, 1, 2, 5};
  std::vector<double> y2, yn;
  for (double v : x) { y2.push_back(2 * v + 1); yn.push_back(-v); }
  EXPECT_NEAR(pearson(x, y2).coefficient, 1.0, 1e-15);
  EXPECT_NEAR(pearson(x, yn).coefficient, -1.0, 1e-15);
  // sxy = 4, sxx = 2, syy = 8.667: 4 / sqrt(17.333).
  const double r = pearson(std::vector<double>{0, 1, 2}, std::vector<double>{0, 1, 4}).coefficient;
  EXPECT_NEAR(r, 4.0 / std::sqrt(2.0 * 26.0 / 3.0), 1e-15);
  EXPECT_NEAR(r, 0.9608, 1e-4);
}

TEST(Pearson, AffineInvariance) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> a(0.1, 10), b(-5, 5);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> x(12), y(12);
    for (auto& v : x) v = g(rng);
    for (auto& v : y) v = g(rng);
    const double r = pearson(x, y).coefficient;
    const double s = a(rng), c = b(rng);
    for (auto& v : x) v = s * v + c;
    EXPECT_NEAR(pearson(x, y).coefficient, r, 1e-9);
    EXPECT_NEAR(pearson(y, x).coefficient, r, 1e-12);
  }
}

TEST(Correlation, Undefined) {
  EXPECT_THROW(spearman(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
               UndefinedCorrelationError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2}, std::vector<double>{1, 2}),
               UndefinedCorrelationError);
  EXPECT_THROW(pearson(std::vector<double>{1, 2, 3}, std::vector<double>{1, 2}),
               UndefinedCorrelationError);
}

TEST(PValue, TApproximation) {
  // Reference values from the Student t survival function.
  EXPECT_NEAR(t_approximation_p_value(0.5, 10), 0.14111328125, 1e-9);
  EXPECT_NEAR(t_approximation_p_value(0.3, 30), 0.10724594805795437, 1e-9);
  EXPECT_DOUBLE_EQ(t_approximation_p_value(1.0, 5), 0.0);
  EXPECT_NEAR(t_approximation_p_value(0.0, 10), 1.0, 1e-12);
}

TEST(PValue, ExactPermutation) {
  // Only the identity and the reversal reach |rho| = 1 among 4! pairings.
  const auto r = spearman(std::vector<double>{1, 2, 3, 4}, std::vector<double>{2, 4, 6, 8},
                          PValueMethod::kPermutation);
  EXPECT_NEAR(r.p_value, 2.0 / 24.0, 1e-12);
  std::vector<double> big(10);
  std::iota(big.begin(), big.end(), 0.0);
  EXPECT_THROW(spearman(big, big, PValueMethod::kPermutation), ArgumentError);
}

TEST(Ranks, Averaged) {
  EXPECT_EQ(average_ranks(std::vector<double>{10, 20, 20, 5}),
            (std::vector<double>{2, 3.5, 3.5, 1}));
}

}  // namespace
}  // namespace usr
