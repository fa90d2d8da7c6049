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

#include "usr/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>
#include <string>

#include "usr/errors.hpp"

namespace usr {
namespace {

void check_inputs(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw UndefinedCorrelationError("correlation inputs differ in length (" +
                                    std::to_string(x.size()) + " vs " +
                                    std::to_string(y.size()) + ")");
  }
  if (x.size() < 3) {
    throw UndefinedCorrelationError("correlation needs at least 3 pairs, got " +
                                    std::to_string(x.size()));
  }
}

// Pearson r without input checks; throws on zero variance.
double product_moment(std::span<const double> x, std::span<const double> y) {
  const auto n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw UndefinedCorrelationError("correlation of a constant vector");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double permutation_p_value(std::span<const double> x, std::span<const double> y,
                           double observed) {
  if (x.size() > 9) {
    throw ArgumentError("exact permutation p-values support n <= 9, got " +
                        std::to_string(x.size()));
  }
  // Index permutations keep tied values distinct, as the exact null
  // distribution requires.
  std::vector<std::size_t> idx(y.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<double> yy(y.size());
  std::size_t total = 0;
  std::size_t extreme = 0;
  const double tol = 1e-12;
  do {
    for (std::size_t i = 0; i < idx.size(); ++i) yy[i] = y[idx[i]];
    ++total;
    if (std::abs(product_moment(x, yy)) >= std::abs(observed) - tol) ++extreme;
  } while (std::next_permutation(idx.begin(), idx.end()));
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace

PValueMethod parse_p_value_method(std::string_view name) {
  if (name == "t") return PValueMethod::kTApproximation;
  if (name == "permutation") return PValueMethod::kPermutation;
  throw ConfigError("unknown p-value method '" + std::string(name) +
                    "' (expected t or permutation)");
}

std::vector<double> average_ranks(std::span<const double> values) {
  std::vector<std::size_t> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return values[a] < values[b];
  });
  std::vector<double> ranks(values.size());
  std::size_t i = 0;
  while (i < order.size()) {
    std::size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = rank;
    i = j + 1;
  }
  return ranks;
}

double t_approximation_p_value(double r, std::size_t n) {
  if (n < 3) return 1.0;
  const double df = static_cast<double>(n - 2);
  const double r2 = r * r;
  if (r2 >= 1.0) return 0.0;
  const double t = std::abs(r) * std::sqrt(df / (1.0 - r2));
  const boost::math::students_t dist(df);
  return std::min(1.0, 2.0 * boost::math::cdf(boost::math::complement(dist, t)));
}

Correlation pearson(std::span<const double> x, std::span<const double> y,
                    PValueMethod method) {
  check_inputs(x, y);
  Correlation c;
  c.coefficient = product_moment(x, y);
  c.p_value = method == PValueMethod::kPermutation
                  ? permutation_p_value(x, y, c.coefficient)
                  : t_approximation_p_value(c.coefficient, x.size());
  return c;
}

Correlation spearman(std::span<const double> x, std::span<const double> y,
                     PValueMethod method) {
  check_inputs(x, y);
  const auto rx = average_ranks(x);
  const auto ry = average_ranks(y);
  return pearson(rx, ry, method);
}

}  // namespace usr
