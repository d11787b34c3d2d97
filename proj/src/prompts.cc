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

#include "noisekit/prompts.h"

#include <string>

#include "noisekit/errors.h"
#include "noisekit/hashing.h"
#include "noisekit/noise.h"
#include "noisekit/random.h"
#include "noisekit/text.h"

namespace noisekit::prompts {
namespace {

constexpr std::string_view kSimilarityTemplate =
    "Read the following instructions clearly and give a response.\n"
    "- You will be given an 'actual_answer' and 'answer_model' for a "
    "'question'.\n"
    "- Your job is to compare the 'actual_answer' and the 'answer_model'.\n"
    "- If the 'actual_answer' and the 'answer_model' are very similar, your "
    "response should be 'Accurate'.\n"
    "- If the 'actual_answer' and the 'answer_model' are different, your "
    "response should be 'Inaccurate'.\n"
    "- Make sure you respond the way you are asked to do without adding any "
    "details or explanations.\n"
    "\n"
    "question: {question}\n"
    "actual_answer: {actual_answer}\n"
    "answer_model: {response}";

constexpr std::string_view kGrammarTemplate =
    "Read the following instructions clearly and give a response.\n"
    "- You will be given an 'answer_model' for a 'question'.\n"
    "- Your job is to check whether the 'answer_model' is grammatically "
    "correct.\n"
    "- If the 'answer_model' is grammatically correct, your response should "
    "be 'Yes'.\n"
    "- If the 'answer_model' is not grammatically correct, your response "
    "should be 'No'.\n"
    "- Make sure you respond the way you are asked to do without adding any "
    "details or explanations.\n"
    "\n"
    "question: {question}\n"
    "answer_model: {response}";

Record SuiteRecord(const Record& item, std::string prompt, NoiseKind kind,
                   const std::string& source) {
  Record r;
  r.id = item.id;
  r.instruction = std::move(prompt);
  r.output = item.output;
  r.role = Role::kPlain;
  r.noise = kind;
  r.source_id = item.id;
  r.source = source;
  return r;
}

}  // namespace

const std::vector<GoldShot>& DefaultShots() {
  static const std::vector<GoldShot> kShots = {
      {"What is the tallest mountain in the world?",
       "Mount Everest is the tallest mountain in the world."},
      {"What is the hottest planet in our solar system?",
       "Venus is the hottest planet in our solar system."},
      {"What is the largest ocean on Earth?",
       "The Pacific Ocean is the largest ocean on Earth."},
      {"Which planet is known as the Red Planet?",
       "Mars is known as the Red Planet."},
      {"What is the longest river in the world?",
       "The Nile River is the longest river in the world."},
  };
  return kShots;
}

FewShotProbe MakeProbe(std::span<const GoldShot> shots,
                       std::string final_question, NoiseKind kind) {
  if (!IsFlip(kind)) {
    throw InvalidInputError("probe kind must be word_flip or char_flip");
  }
  FewShotProbe probe;
  probe.kind = kind;
  probe.final_question = std::move(final_question);
  for (const auto& s : shots) {
    probe.shots.push_back({s.question, noise::Flip(kind, s.answer)});
  }
  return probe;
}

std::string RenderProbe(const FewShotProbe& probe) {
  if (probe.shots.empty()) return probe.final_question;
  std::string out;
  for (auto line : kProbeHeader) {
    out.append(line);
    out.push_back('\n');
  }
  for (const auto& shot : probe.shots) {
    out.append("Question: ").append(shot.question).push_back('\n');
    out.append("Answer: ").append(shot.flipped_answer).push_back('\n');
  }
  out.append("Question: ").append(probe.final_question).append("\nAnswer:");
  return out;
}

TestSuites BuildTestSuites(const corpus::Dataset& test_set,
                           const SuiteConfig& config) {
  if (config.mode == ShotMode::kFixed && config.fixed_shots.size() < config.k) {
    throw ConfigError("fixed shot set has " +
                      std::to_string(config.fixed_shots.size()) +
                      " shots, need k=" + std::to_string(config.k));
  }
  TestSuites suites;
  const std::pair<corpus::Dataset*, std::pair<const char*, NoiseKind>> specs[] = {
      {&suites.test, {"test", NoiseKind::kNone}},
      {&suites.wtest, {"wtest", NoiseKind::kWordFlip}},
      {&suites.ctest, {"ctest", NoiseKind::kCharFlip}},
  };
  for (const auto& [suite, entry] : specs) {
    suite->name = entry.first;
    suite->noise_kind = entry.second;
    suite->parents = {test_set.name};
    if (config.mode == ShotMode::kSampled) suite->seed = config.seed;
  }

  for (const auto& item : test_set.records) {
    if (!item.input.empty()) {
      throw ValidationError("test item '" + item.id +
                            "' has a non-empty input; test questions go in "
                            "'instruction'");
    }
    std::vector<GoldShot> shots;
    if (config.mode == ShotMode::kFixed) {
      shots.assign(config.fixed_shots.begin(),
                   config.fixed_shots.begin() +
                       static_cast<std::ptrdiff_t>(config.k));
    } else {
      std::vector<const GoldShot*> eligible;
      for (const auto& s : config.pool) {
        if (s.question != item.instruction) eligible.push_back(&s);
      }
      if (eligible.size() < config.k) {
        throw ConfigError("shot pool has " + std::to_string(eligible.size()) +
                          " eligible shots for item '" + item.id +
                          "', need k=" + std::to_string(config.k));
      }
      Rng rng(DeriveSeed(config.seed, item.id));
      for (auto idx : rng.Sample(eligible.size(), config.k)) {
        shots.push_back(*eligible[idx]);
      }
    }
    suites.test.records.push_back(
        SuiteRecord(item, item.instruction, NoiseKind::kNone, "test"));
    suites.wtest.records.push_back(SuiteRecord(
        item, RenderProbe(MakeProbe(shots, item.instruction, NoiseKind::kWordFlip)),
        NoiseKind::kWordFlip, "wtest"));
    suites.ctest.records.push_back(SuiteRecord(
        item, RenderProbe(MakeProbe(shots, item.instruction, NoiseKind::kCharFlip)),
        NoiseKind::kCharFlip, "ctest"));
  }
  return suites;
}

std::string_view JudgeTemplate(JudgeKind kind) {
  return kind == JudgeKind::kSimilarity ? kSimilarityTemplate
                                        : kGrammarTemplate;
}

JudgePrompt RenderJudgePrompt(JudgeKind kind, std::string_view question,
                              std::string_view gold,
                              std::string_view response) {
  const std::string_view tmpl = JudgeTemplate(kind);
  struct Slot {
    std::string_view name;
    std::string_view value;
  };
  const Slot slots[] = {{"{question}", question},
                        {"{actual_answer}", gold},
                        {"{response}", response}};
  JudgePrompt prompt;
  prompt.kind = kind;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    bool replaced = false;
    if (tmpl[i] == '{') {
      for (const auto& slot : slots) {
        if (tmpl.substr(i, slot.name.size()) != slot.name) continue;
        if (text::Trim(slot.value).empty()) {
          throw ValidationError("judge prompt field " + std::string(slot.name) +
                                " is empty");
        }
        prompt.rendered.append(slot.value);
        i += slot.name.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) prompt.rendered.push_back(tmpl[i++]);
  }
  return prompt;
}

}  // namespace noisekit::prompts
