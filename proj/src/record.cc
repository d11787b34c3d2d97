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

#include "noisekit/record.h"

#include <string>

#include "noisekit/errors.h"

namespace noisekit {

std::string_view ToString(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kNone:
      return "none";
    case NoiseKind::kWordFlip:
      return "word_flip";
    case NoiseKind::kCharFlip:
      return "char_flip";
    case NoiseKind::kIrrelevant:
      return "irrelevant";
    case NoiseKind::kCounterfactual:
      return "counterfactual";
  }
  return "none";
}

std::string_view ToString(Role role) {
  switch (role) {
    case Role::kPlain:
      return "plain";
    case Role::kPositive:
      return "positive";
    case Role::kNegative:
      return "negative";
  }
  return "plain";
}

NoiseKind ParseNoiseKind(std::string_view name) {
  if (name == "none") return NoiseKind::kNone;
  if (name == "word_flip") return NoiseKind::kWordFlip;
  if (name == "char_flip") return NoiseKind::kCharFlip;
  if (name == "irrelevant") return NoiseKind::kIrrelevant;
  if (name == "counterfactual") return NoiseKind::kCounterfactual;
  throw ValidationError("unknown noise kind '" + std::string(name) + "'");
}

Role ParseRole(std::string_view name) {
  if (name == "plain") return Role::kPlain;
  if (name == "positive") return Role::kPositive;
  if (name == "negative") return Role::kNegative;
  throw ValidationError("unknown role '" + std::string(name) + "'");
}

}  // namespace noisekit
