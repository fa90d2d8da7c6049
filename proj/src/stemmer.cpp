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

#include <string>

#include "usr/overlap_metrics.hpp"

namespace usr {
namespace {

bool ends_with(std::string_view w, std::string_view suffix) {
  return w.size() >= suffix.size() &&
         w.substr(w.size() - suffix.size()) == suffix;
}

bool is_vowel(char c) {
  return c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u' || c == 'y';
}

bool has_vowel(std::string_view w) {
  for (char c : w) {
    if (is_vowel(c)) return true;
  }
  return false;
}

// "running" -> "runn" -> "run"; l, s and z doubles are kept ("falling").
std::string undouble(std::string w) {
  const std::size_t n = w.size();
  if (n >= 2 && w[n - 1] == w[n - 2] && !is_vowel(w[n - 1]) &&
      w[n - 1] != 'l' && w[n - 1] != 's' && w[n - 1] != 'z') {
    w.pop_back();
  }
  return w;
}

}  // namespace

std::string stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 3) return w;
  if (ends_with(w, "sses")) return w.substr(0, w.size() - 2);
  if (ends_with(w, "ies")) {
    return w.size() > 4 ? w.substr(0, w.size() - 3) + "y"
                        : w.substr(0, w.size() - 1);
  }
  if (ends_with(w, "ss") || ends_with(w, "us") || ends_with(w, "is")) return w;
  if (ends_with(w, "s")) return w.substr(0, w.size() - 1);
  if (ends_with(w, "ing")) {
    std::string base = w.substr(0, w.size() - 3);
    if (base.size() >= 3 && has_vowel(base)) return undouble(base);
    return w;
  }
  if (ends_with(w, "ed")) {
    std::string base = w.substr(0, w.size() - 2);
    if (base.size() >= 3 && has_vowel(base)) return undouble(base);
    return w;
  }
  if (ends_with(w, "ly")) {
    std::string base = w.substr(0, w.size() - 2);
    if (base.size() >= 3) return base;
  }
  return w;
}

}  // namespace usr
