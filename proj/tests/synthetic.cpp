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

#include "synthetic.hpp"

#include <algorithm>

#include "usr/hashing.hpp"

namespace usr::testing {

namespace {

const std::vector<std::string> kTopics = {
    "jazz",   "soccer", "mars",    "pizza",  "python", "tennis", "violin",
    "ocean",  "chess",  "coffee",  "dragon", "tiger",  "castle", "rocket",
    "garden", "poetry", "cinema",  "bridge", "desert", "forest", "island",
    "museum", "winter", "volcano", "robot",  "comet",  "piano",  "cactus",
    "parrot", "glacier"};
const std::vector<std::string> kAttrs = {
    "old", "loud", "red", "famous", "huge", "rare", "fast", "quiet", "bright", "tiny"};

std::string topic(std::size_t i) {
  return i < kTopics.size() ? kTopics[i] : "topic" + std::to_string(i);
}

int jitter(std::uint64_t& state, int lo, int hi) {
  return lo + static_cast<int>(uniform_index(state, static_cast<std::uint64_t>(hi - lo + 1)));
}

}  // namespace

TokenSequence toks(const std::string& text) { return normalize_tokens(text); }

AnnotatedDataset three_system_dataset(std::size_t contexts, std::uint64_t seed) {
  AnnotatedDataset d;
  std::uint64_t state = seed;
  std::vector<std::string> vocab;
  for (std::size_t i = 0; i < contexts; ++i) vocab.push_back(topic(i));
  for (const auto& a : kAttrs) vocab.push_back(a);
  for (const char* w : {"i", "the", "is", "and", "like", "it", "do", "you", "know"}) {
    vocab.push_back(w);
  }

  for (std::size_t i = 0; i < contexts; ++i) {
    const std::string t = topic(i);
    const std::string a = kAttrs[i % kAttrs.size()];
    const std::string other = topic((i + 1 + i % 3) % contexts);
    const std::string other_a = kAttrs[(i + 3) % kAttrs.size()];

    DialogContext ctx;
    ctx.turns = {toks("do you know about " + t + " ?"),
                 toks("yes , i like " + t + " a lot .")};
    const TokenSequence fact = toks("the " + t + " is " + a + " .");
    const TokenSequence gt = toks("i know the " + t + " is " + a + " and i like it .");

    TokenSequence good = toks("yes the " + t + " is " + a + " and i like it .");
    TokenSequence mid = toks("i know the " + other + " is " + other_a + " and i like it .");
    std::swap(mid[5], mid[6]);
    TokenSequence bad;
    for (std::size_t k = 0; k < good.size(); ++k) {
      bad.push_back(vocab[uniform_index(state, vocab.size())]);
    }

    struct Resp {
      std::string system;
      TokenSequence tokens;
      int quality;  // 3 best
    };
    const std::vector<Resp> resps = {{std::string(kGroundTruthSystem), gt, 3},
                                     {"sys-good", good, 3},
                                     {"sys-mid", mid, 2},
                                     {"sys-bad", bad, 1}};
    for (const auto& r : resps) {
      DialogExample ex;
      ex.example_id = "syn-" + std::to_string(i) + "-" + r.system;
      ex.context = ctx;
      ex.fact = fact;
      ex.response = r.tokens;
      if (r.system != kGroundTruthSystem) ex.reference = gt;
      ex.system_id = r.system;
      d.examples.push_back(ex);
      for (int annotator = 0; annotator < 3; ++annotator) {
        QualityAnnotation ann;
        ann.example_id = ex.example_id;
        ann.annotator_id = "ann-" + std::to_string(annotator + 1);
        switch (r.quality) {
          case 3:
            ann.understandable = 1;
            ann.natural = jitter(state, 2, 3);
            ann.maintains_context = jitter(state, 2, 3);
            ann.interesting = jitter(state, 1, 3);
            ann.uses_knowledge = 1;
            ann.overall = jitter(state, 4, 5);
            break;
          case 2:
            ann.understandable = jitter(state, 0, 1);
            ann.natural = jitter(state, 1, 3);
            ann.maintains_context = jitter(state, 1, 2);
            ann.interesting = jitter(state, 1, 2);
            ann.uses_knowledge = jitter(state, 0, 1);
            ann.overall = jitter(state, 2, 3);
            break;
          default:
            ann.understandable = jitter(state, 0, 1) * jitter(state, 0, 1);
            ann.natural = 1;
            ann.maintains_context = jitter(state, 1, 2);
            ann.interesting = 1;
            ann.uses_knowledge = 0;
            ann.overall = jitter(state, 1, 2);
        }
        d.annotations.push_back(ann);
      }
    }
  }
  d.validate();
  return d;
}

std::vector<DialogExample> separable_corpus(std::size_t n, std::uint64_t seed) {
  std::vector<DialogExample> out;
  std::uint64_t state = seed;
  const std::vector<std::string> filler = {"well", "so", "maybe", "really", "okay",
                                           "sure", "hmm", "right"};
  for (std::size_t i = 0; i < n; ++i) {
    const std::string key = "key" + std::to_string(i);
    const std::string key2 = "mark" + std::to_string(i);
    DialogExample ex;
    ex.example_id = "sep-" + std::to_string(i);
    ex.context.turns = {{filler[uniform_index(state, filler.size())], "tell", "me",
                         "about", key, key2}};
    ex.fact = {key, "has", key2};
    ex.response = {filler[uniform_index(state, filler.size())], key, "and", key2,
                   filler[uniform_index(state, filler.size())]};
    ex.system_id = std::string(kGroundTruthSystem);
    out.push_back(ex);
  }
  return out;
}

}  // namespace usr::testing
