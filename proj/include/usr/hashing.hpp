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

#ifndef USR_HASHING_HPP_
#define USR_HASHING_HPP_

#include <cstdint>
#include <string>
#include <string_view>

namespace usr {

// 64-bit FNV-1a. Used for dataset fingerprints, config hashes and the
// deterministic hash embedder; stable across platforms.
std::uint64_t fnv1a64(std::string_view data,
                      std::uint64_t seed = 0xcbf29ce484222325ULL);

// Lowercase 16-digit hex.
std::string to_hex(std::uint64_t value);

// SplitMix64 step; advances `state` and returns the next output.
std::uint64_t splitmix64(std::uint64_t& state);

// Uniform index in [0, bound) from a 64-bit generator state, by rejection.
// Independent of the standard library's distribution implementations so that
// seeded runs reproduce across toolchains.
std::uint64_t uniform_index(std::uint64_t& state, std::uint64_t bound);

}  // namespace usr

#endif  // USR_HASHING_HPP_
