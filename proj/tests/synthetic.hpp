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

// Deterministic synthetic corpora shared by the unit and acceptance tests.

#ifndef USR_TESTS_SYNTHETIC_HPP_
#define USR_TESTS_SYNTHETIC_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "usr/corpus.hpp"

namespace usr::testing {

// Three rated systems ("sys-good", "sys-mid", "sys-bad") plus ground truth
// for each of `contexts` dialogs, three annotators per response.
//   good: on-topic template response, same wording as the ground truth family
//   mid:  fluent template about another dialog's topic, two words swapped
//   bad:  shuffled vocabulary words
// Human ratings follow good > mid > bad with hashed jitter.
AnnotatedDataset three_system_dataset(std::size_t contexts = 20,
                                      std::uint64_t seed = 7);

// Dialogs where each context and its true response share a topic word that no
// other dialog uses; cheap to separate with overlap features.
std::vector<DialogExample> separable_corpus(std::size_t n, std::uint64_t seed);

TokenSequence toks(const std::string& text);

}  // namespace usr::testing

#endif  // USR_TESTS_SYNTHETIC_HPP_
