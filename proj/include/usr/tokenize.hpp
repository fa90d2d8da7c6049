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

#ifndef USR_TOKENIZE_HPP_
#define USR_TOKENIZE_HPP_

#include <string>
#include <string_view>
#include <vector>

namespace usr {

// Lowercase word tokens, no whitespace inside a token.
using TokenSequence = std::vector<std::string>;

// Version tag of the tokenizer below. Word-overlap scores depend on it, so it
// is written into score files next to the config hash.
inline constexpr std::string_view kTokenizerVersion = "usr-tok-1";

// Lowercases ASCII letters, isolates every ASCII punctuation character as its
// own token and splits on whitespace. Non-ASCII bytes are kept as word
// characters. Idempotent: normalize(join(normalize(s))) == normalize(s).
TokenSequence normalize_tokens(std::string_view text);

// Space-joined tokens.
std::string join_tokens(const TokenSequence& tokens);

}  // namespace usr

#endif  // USR_TOKENIZE_HPP_
