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

#ifndef USR_STATS_HPP_
#define USR_STATS_HPP_

#include <span>
#include <string_view>
#include <vector>

namespace usr {

struct Correlation {
  double coefficient = 0.0;  // in [-1, 1]
  double p_value = 1.0;      // two-sided
};

enum class PValueMethod {
  kTApproximation,  // t = r sqrt((n-2)/(1-r^2)), Student t with n-2 dof
  kPermutation,     // exact over all n! pairings; n <= 9 only
};

PValueMethod parse_p_value_method(std::string_view name);

// 1-based ranks; tied values share the mean of the ranks they span.
std::vector<double> average_ranks(std::span<const double> values);

// Both throw UndefinedCorrelationError on length mismatch, n < 3, or a
// constant input.
Correlation pearson(std::span<const double> x, std::span<const double> y,
                    PValueMethod method = PValueMethod::kTApproximation);
Correlation spearman(std::span<const double> x, std::span<const double> y,
                     PValueMethod method = PValueMethod::kTApproximation);

// Two-sided p-value of a correlation coefficient over n pairs.
double t_approximation_p_value(double r, std::size_t n);

}  // namespace usr

#endif  // USR_STATS_HPP_
