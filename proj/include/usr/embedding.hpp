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

#ifndef USR_EMBEDDING_HPP_
#define USR_EMBEDDING_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "usr/tokenize.hpp"

namespace usr {

using Vector = std::vector<double>;

enum class OovPolicy { kSkip, kZeroVector };

// Static token -> vector lookup. Implementations are immutable after
// construction and safe for concurrent lookups.
class WordEmbedder {
 public:
  virtual ~WordEmbedder() = default;

  virtual std::size_t dimension() const = 0;
  // std::nullopt when the token is out of vocabulary.
  virtual std::optional<Vector> find(const std::string& token) const = 0;

  OovPolicy oov_policy() const { return oov_policy_; }
  void set_oov_policy(OovPolicy policy) { oov_policy_ = policy; }

  // Vectors for the tokens after applying the OOV policy.
  std::vector<Vector> embed(const TokenSequence& tokens) const;

 private:
  OovPolicy oov_policy_ = OovPolicy::kSkip;
};

// Embeddings read from the whitespace-separated "token v1 ... vd" text format.
// A leading word2vec-style "<count> <dim>" header line is tolerated.
class StaticEmbeddings : public WordEmbedder {
 public:
  StaticEmbeddings() = default;
  explicit StaticEmbeddings(std::unordered_map<std::string, Vector> table);

  static StaticEmbeddings load(const std::filesystem::path& path);
  static StaticEmbeddings parse(std::istream& in);

  std::size_t dimension() const override { return dim_; }
  std::optional<Vector> find(const std::string& token) const override;
  std::size_t size() const { return table_.size(); }

 private:
  std::unordered_map<std::string, Vector> table_;
  std::size_t dim_ = 0;
};

// Deterministic pseudo-random vectors in [-1, 1]^d keyed by token hash. Every
// token is in vocabulary. Meant for tests and desk-scale smoke runs.
class HashEmbedder : public WordEmbedder {
 public:
  HashEmbedder(std::size_t dimension, std::uint64_t seed);

  std::size_t dimension() const override { return dim_; }
  std::optional<Vector> find(const std::string& token) const override;

 private:
  std::size_t dim_;
  std::uint64_t seed_;
};

// Context-sensitive per-token encoder. encode() returns exactly one vector per
// input token.
class ContextualEmbedder {
 public:
  virtual ~ContextualEmbedder() = default;
  virtual std::size_t dimension() const = 0;
  virtual std::vector<Vector> encode(const TokenSequence& tokens) const = 0;
};

// v_i = e_i + w * mean(e_{i-1}, e_{i+1}) over a static embedder, with
// zero vectors for unknown tokens.
class ToyContextualEncoder : public ContextualEmbedder {
 public:
  explicit ToyContextualEncoder(std::shared_ptr<const WordEmbedder> base,
                                double neighbor_weight = 0.5);

  std::size_t dimension() const override { return base_->dimension(); }
  std::vector<Vector> encode(const TokenSequence& tokens) const override;

 private:
  std::shared_ptr<const WordEmbedder> base_;
  double neighbor_weight_;
};

double dot(const Vector& a, const Vector& b);
double norm(const Vector& a);
// 0 when either vector has zero norm.
double cosine(const Vector& a, const Vector& b);

}  // namespace usr

#endif  // USR_EMBEDDING_HPP_
