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

#ifndef NOISEKIT_RECORD_H_
#define NOISEKIT_RECORD_H_

#include <string>
#include <string_view>

namespace noisekit {

enum class NoiseKind { kNone, kWordFlip, kCharFlip, kIrrelevant, kCounterfactual };

enum class Role { kPlain, kPositive, kNegative };

// Serialized names: "none", "word_flip", "char_flip", "irrelevant",
// "counterfactual" and "plain", "positive", "negative".
std::string_view ToString(NoiseKind kind);
std::string_view ToString(Role role);
NoiseKind ParseNoiseKind(std::string_view name);
Role ParseRole(std::string_view name);

inline bool IsFlip(NoiseKind kind) {
  return kind == NoiseKind::kWordFlip || kind == NoiseKind::kCharFlip;
}

// One line of a dataset file. A freshly ingested instruction example is a
// Record with role kPlain and noise kNone whose `output` holds the answer;
// noise operators derive further Records from it.
struct Record {
  std::string id;
  std::string instruction;
  std::string input;
  std::string output;
  Role role = Role::kPlain;
  NoiseKind noise = NoiseKind::kNone;
  std::string source_id;
  std::string source;

  bool operator==(const Record&) const = default;
};

}  // namespace noisekit

#endif  // NOISEKIT_RECORD_H_
