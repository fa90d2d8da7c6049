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

#include <algorithm>
#include <cmath>
#include <limits>

#include "usr/errors.hpp"
#include "usr/overlap_metrics.hpp"

namespace usr {

NGramProfile::NGramProfile(const TokenSequence& tokens, int n) : n_(n) {
  if (n < 1) throw ArgumentError("n-gram order must be >= 1");
  const auto len = static_cast<std::size_t>(n);
  if (tokens.size() < len) return;
  total_ = tokens.size() - len + 1;
  for (std::size_t i = 0; i < total_; ++i) {
    ++counts_[std::vector<std::string>(tokens.begin() + i,
                                       tokens.begin() + i + len)];
  }
}

std::size_t NGramProfile::count(const std::vector<std::string>& ngram) const {
  auto it = counts_.find(ngram);
  return it == counts_.end() ? 0 : it->second;
}

double f1_score(const TokenSequence& candidate, const TokenSequence& reference) {
  if (reference.empty()) {
    throw PreconditionError("f1_score: reference must be non-empty");
  }
  if (candidate.empty()) return 0.0;
  const auto overlap =
      static_cast<double>(clipped_matches(candidate, {reference}, 1));
  if (overlap == 0.0) return 0.0;
  const double precision = overlap / static_cast<double>(candidate.size());
  const double recall = overlap / static_cast<double>(reference.size());
  return 2.0 * precision * recall / (precision + recall);
}

std::size_t clipped_matches(const TokenSequence& candidate,
                            const std::vector<TokenSequence>& references,
                            int n) {
  NGramProfile cand(candidate, n);
  std::vector<NGramProfile> refs;
  refs.reserve(references.size());
  for (const auto& r : references) refs.emplace_back(r, n);
  std::size_t matched = 0;
  for (const auto& [gram, count] : cand.counts()) {
    std::size_t max_ref = 0;
    for (const auto& r : refs) max_ref = std::max(max_ref, r.count(gram));
    matched += std::min(count, max_ref);
  }
  return matched;
}

double bleu_score(const TokenSequence& candidate,
                  const std::vector<TokenSequence>& references, int max_n,
                  BleuSmoothing smoothing) {
  if (max_n < 1 || max_n > 4) {
    throw ArgumentError("bleu_score: max_n must be in 1..4, got " +
                        std::to_string(max_n));
  }
  if (references.empty()) {
    throw PreconditionError("bleu_score: at least one reference required");
  }
  if (candidate.empty()) return 0.0;

  const auto cand_len = static_cast<double>(candidate.size());
  // Closest reference length; ties go to the shorter reference.
  double ref_len = 0.0;
  double best_gap = std::numeric_limits<double>::infinity();
  for (const auto& r : references) {
    const auto len = static_cast<double>(r.size());
    const double gap = std::abs(len - cand_len);
    if (gap < best_gap || (gap == best_gap && len < ref_len)) {
      best_gap = gap;
      ref_len = len;
    }
  }

  double log_sum = 0.0;
  for (int n = 1; n <= max_n; ++n) {
    double matched = static_cast<double>(clipped_matches(candidate, references, n));
    const std::size_t len = candidate.size();
    double total = len >= static_cast<std::size_t>(n)
                       ? static_cast<double>(len - n + 1)
                       : 0.0;
    if (smoothing == BleuSmoothing::kAddOne && n > 1) {
      matched += 1.0;
      total += 1.0;
    }
    if (matched == 0.0 || total == 0.0) return 0.0;
    log_sum += std::log(matched / total);
  }
  const double bp = cand_len > ref_len ? 1.0 : std::exp(1.0 - ref_len / cand_len);
  return bp * std::exp(log_sum / max_n);
}

void SynonymTable::add_synset(const std::vector<std::string>& words) {
  const std::size_t id = next_id_++;
  for (const auto& w : words) synsets_[w].insert(id);
}

bool SynonymTable::synonyms(const std::string& a, const std::string& b) const {
  auto ia = synsets_.find(a);
  auto ib = synsets_.find(b);
  if (ia == synsets_.end() || ib == synsets_.end()) return false;
  for (std::size_t id : ia->second) {
    if (ib->second.contains(id)) return true;
  }
  return false;
}

MeteorAlignment meteor_align(const TokenSequence& candidate,
                             const TokenSequence& reference,
                             const SynonymTable& synonyms) {
  std::vector<bool> cand_used(candidate.size(), false);
  std::vector<bool> ref_used(reference.size(), false);
  MeteorAlignment out;

  std::vector<std::string> cand_stems, ref_stems;
  for (const auto& w : candidate) cand_stems.push_back(stem(w));
  for (const auto& w : reference) ref_stems.push_back(stem(w));

  auto run_stage = [&](auto&& same) {
    for (std::size_t i = 0; i < candidate.size(); ++i) {
      if (cand_used[i]) continue;
      for (std::size_t j = 0; j < reference.size(); ++j) {
        if (ref_used[j] || !same(i, j)) continue;
        cand_used[i] = ref_used[j] = true;
        out.matches.emplace_back(i, j);
        break;
      }
    }
  };
  run_stage([&](std::size_t i, std::size_t j) {
    return candidate[i] == reference[j];
  });
  run_stage([&](std::size_t i, std::size_t j) {
    return cand_stems[i] == ref_stems[j];
  });
  if (!synonyms.empty()) {
    run_stage([&](std::size_t i, std::size_t j) {
      return synonyms.synonyms(candidate[i], reference[j]);
    });
  }

  std::sort(out.matches.begin(), out.matches.end());
  for (std::size_t k = 0; k < out.matches.size(); ++k) {
    if (k == 0 || out.matches[k].first != out.matches[k - 1].first + 1 ||
        out.matches[k].second != out.matches[k - 1].second + 1) {
      ++out.chunks;
    }
  }
  return out;
}

double meteor_score(const TokenSequence& candidate,
                    const TokenSequence& reference, const MeteorParams& params,
                    const SynonymTable& synonyms) {
  if (candidate.empty() || reference.empty()) {
    throw PreconditionError("meteor_score: both sequences must be non-empty");
  }
  const auto alignment = meteor_align(candidate, reference, synonyms);
  const auto m = static_cast<double>(alignment.matches.size());
  if (m == 0.0) return 0.0;
  const double p = m / static_cast<double>(candidate.size());
  const double r = m / static_cast<double>(reference.size());
  const double fmean = p * r / (params.alpha * p + (1.0 - params.alpha) * r);
  const double frag = static_cast<double>(alignment.chunks) / m;
  const double penalty = params.gamma * std::pow(frag, params.beta);
  return fmean * (1.0 - penalty);
}

std::size_t lcs_length(const TokenSequence& a, const TokenSequence& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_score(const TokenSequence& candidate,
                     const TokenSequence& reference) {
  if (candidate.empty() || reference.empty()) {
    throw PreconditionError("rouge_l_score: both sequences must be non-empty");
  }
  const auto lcs = static_cast<double>(lcs_length(candidate, reference));
  if (lcs == 0.0) return 0.0;
  const double p = lcs / static_cast<double>(candidate.size());
  const double r = lcs / static_cast<double>(reference.size());
  return 2.0 * p * r / (p + r);
}

}  // namespace usr
