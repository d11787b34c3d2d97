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

#ifndef NOISEKIT_PROMPTS_H_
#define NOISEKIT_PROMPTS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisekit/corpus.h"
#include "noisekit/record.h"

namespace noisekit::prompts {

struct GoldShot {
  std::string question;
  std::string answer;
};

struct Shot {
  std::string question;
  std::string flipped_answer;
};

struct FewShotProbe {
  std::vector<Shot> shots;
  std::string final_question;
  NoiseKind kind = NoiseKind::kWordFlip;

  std::size_t k() const { return shots.size(); }
};

// The five geography/astronomy shots used for every item by default.
const std::vector<GoldShot>& DefaultShots();

// Flips each shot answer with `kind`. Throws InvalidInputError unless `kind`
// is a flip kind.
FewShotProbe MakeProbe(std::span<const GoldShot> shots,
                       std::string final_question, NoiseKind kind);

inline constexpr std::string_view kProbeHeader[] = {
    "Identify the pattern in the way answers are generated for each question "
    "given below and generate the answer for the final question in the same "
    "pattern.",
    "Make sure you generate only the answer to the question and no additional "
    "explanations or details.",
};

// Header lines, "Question: "/"Answer: " per shot, the final "Question: " and
// a bare "Answer:" slot, joined with '\n' and no trailing newline. With no
// shots the bare final question is returned.
std::string RenderProbe(const FewShotProbe& probe);

enum class ShotMode { kFixed, kSampled };

struct SuiteConfig {
  std::size_t k = 5;
  ShotMode mode = ShotMode::kFixed;
  // kFixed: the first k shots are used for every item.
  std::vector<GoldShot> fixed_shots = DefaultShots();
  // kSampled: k shots per item drawn from this pool, skipping any shot whose
  // question equals the item's question.
  std::vector<GoldShot> pool;
  std::uint64_t seed = 0;
};

struct TestSuites {
  corpus::Dataset test;   // bare questions
  corpus::Dataset wtest;  // word-flipped shots
  corpus::Dataset ctest;  // char-flipped shots
};

// Every suite record keeps the test item id, holds the rendered prompt in
// `instruction` and the unflipped gold answer in `output`. Throws ConfigError
// when fewer than k shots are available and ValidationError for test items
// with a non-empty input.
TestSuites BuildTestSuites(const corpus::Dataset& test_set,
                           const SuiteConfig& config);

// ---------------------------------------------------------------------------
// Judge prompts

enum class JudgeKind { kSimilarity, kGrammar };

struct JudgePrompt {
  JudgeKind kind = JudgeKind::kSimilarity;
  std::string rendered;
};

// Raw template text with {question}, {actual_answer} and {response} slots.
std::string_view JudgeTemplate(JudgeKind kind);

// Substitutes the slots in one pass, so slot-like text inside the arguments
// is left alone. Throws ValidationError when a field the template uses is
// empty.
JudgePrompt RenderJudgePrompt(JudgeKind kind, std::string_view question,
                              std::string_view gold, std::string_view response);

}  // namespace noisekit::prompts

#endif  // NOISEKIT_PROMPTS_H_
