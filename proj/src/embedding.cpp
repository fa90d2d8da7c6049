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

#include "usr/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "usr/errors.hpp"
#include "usr/hashing.hpp"

namespace usr {

std::vector<Vector> WordEmbedder::embed(const TokenSequence& tokens) const {
  std::vector<Vector> out;
  out.reserve(tokens.size());
  for (const auto& tok : tokens) {
    if (auto v = find(tok)) {
      out.push_back(std::move(*v));
    } else if (oov_policy_ == OovPolicy::kZeroVector) {
      out.emplace_back(dimension(), 0.0);
    }
  }
  return out;
}

StaticEmbeddings::StaticEmbeddings(std::unordered_map<std::string, Vector> table)
    : table_(std::move(table)) {
  for (const auto& [tok, vec] : table_) {
    if (dim_ == 0) dim_ = vec.size();
    if (vec.size() != dim_ || dim_ == 0) {
      throw ParseError("embedding for '" + tok + "' has dimension " +
                       std::to_string(vec.size()) + ", expected " +
                       std::to_string(dim_));
    }
  }
}

StaticEmbeddings StaticEmbeddings::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ParseError("cannot open embedding file '" + path.string() + "'");
  }
  return parse(in);
}

StaticEmbeddings StaticEmbeddings::parse(std::istream& in) {
  std::unordered_map<std::string, Vector> table;
  std::size_t dim = 0;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream fields(line);
    std::string token;
    if (!(fields >> token)) continue;
    Vector vec;
    std::string field;
    while (fields >> field) {
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (end == field.c_str() || *end != '\0') {
        throw ParseError("embedding line " + std::to_string(lineno) +
                         ": bad number '" + field + "'");
      }
      vec.push_back(v);
    }
    if (lineno == 1 && vec.size() == 1 &&
        token.find_first_not_of("0123456789") == std::string::npos) {
      continue;  // word2vec header
    }
    if (vec.empty()) {
      throw ParseError("embedding line " + std::to_string(lineno) +
                       ": no vector values");
    }
    if (dim == 0) dim = vec.size();
    if (vec.size() != dim) {
      throw ParseError("embedding line " + std::to_string(lineno) +
                       ": dimension " + std::to_string(vec.size()) +
                       " differs from " + std::to_string(dim));
    }
    table.emplace(std::move(token), std::move(vec));
  }
  return StaticEmbeddings(std::move(table));
}

std::optional<Vector> StaticEmbeddings::find(const std::string& token) const {
  auto it = table_.find(token);
  if (it == table_.end()) return std::nullopt;
  return it->second;
}

HashEmbedder::HashEmbedder(std::size_t dimension, std::uint64_t seed)
    : dim_(dimension), seed_(seed) {
  if (dimension == 0) throw ArgumentError("embedding dimension must be > 0");
}

std::optional<Vector> HashEmbedder::find(const std::string& token) const {
  std::uint64_t state = fnv1a64(token) ^ seed_;
  Vector v(dim_);
  for (auto& x : v) {
    x = static_cast<double>(splitmix64(state) >> 11) * 0x1.0p-53 * 2.0 - 1.0;
  }
  return v;
}

ToyContextualEncoder::ToyContextualEncoder(
    std::shared_ptr<const WordEmbedder> base, double neighbor_weight)
    : base_(std::move(base)), neighbor_weight_(neighbor_weight) {
  if (!base_) throw ArgumentError("contextual encoder needs a base embedder");
}

std::vector<Vector> ToyContextualEncoder::encode(
    const TokenSequence& tokens) const {
  const std::size_t d = base_->dimension();
  std::vector<Vector> word;
  word.reserve(tokens.size());
  for (const auto& t : tokens) {
    auto v = base_->find(t);
    word.push_back(v ? std::move(*v) : Vector(d, 0.0));
  }
  std::vector<Vector> out(tokens.size(), Vector(d, 0.0));
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    int neighbors = 0;
    Vector ctx(d, 0.0);
    if (i > 0) {
      for (std::size_t k = 0; k < d; ++k) ctx[k] += word[i - 1][k];
      ++neighbors;
    }
    if (i + 1 < tokens.size()) {
      for (std::size_t k = 0; k < d; ++k) ctx[k] += word[i + 1][k];
      ++neighbors;
    }
    for (std::size_t k = 0; k < d; ++k) {
      out[i][k] = word[i][k] +
                  (neighbors > 0 ? neighbor_weight_ * ctx[k] / neighbors : 0.0);
    }
  }
  return out;
}

double dot(const Vector& a, const Vector& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(const Vector& a) { return std::sqrt(dot(a, a)); }

double cosine(const Vector& a, const Vector& b) {
  const double na = norm(a);
  const double nb = norm(b);
  if (na == 0.0 || nb == 0.0) return 0.0;
  const double c = dot(a, b) / (na * nb);
  return std::clamp(c, -1.0, 1.0);
}

}  // namespace usr
