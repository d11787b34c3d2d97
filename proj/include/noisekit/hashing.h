// Copyright 2026 The noisekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NOISEKIT_HASHING_H_
#define NOISEKIT_HASHING_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace noisekit {

// Lowercase hex SHA-256 of `data`.
std::string Sha256Hex(std::string_view data);

// Child seed for a labeled stage: the first eight bytes (little endian) of
// SHA-256 over the root seed's eight little-endian bytes followed by `label`.
std::uint64_t DeriveSeed(std::uint64_t root, std::string_view label);

}  // namespace noisekit

#endif  // NOISEKIT_HASHING_H_
