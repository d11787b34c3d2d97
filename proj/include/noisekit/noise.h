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

#ifndef NOISEKIT_NOISE_H_
#define NOISEKIT_NOISE_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "noisekit/corpus.h"
#include "noisekit/inference.h"
#include "noisekit/record.h"

namespace noisekit::noise {

// Splits on ASCII whitespace, then peels each of . , ! ? ; : " ( ) [ ] off
// the front and back of a chunk as its own token. Other characters, interior
// apostrophes and hyphens included, stay inside the token.
std::vector<std::string> TokenizeWords(std::string_view text);

bool IsPunctuationToken(std::string_view token);

// Reverses the token order of TokenizeWords and joins with single spaces.
std::string FlipWord(std::string_view text);

// Reverses the sequence of code points. Malformed UTF-8 bytes are moved as
// single units.
std::string FlipChar(std::string_view text);

// kWordFlip -> FlipWord, kCharFlip -> FlipChar, anything else is identity.
std::string Flip(NoiseKind kind, std::string_view text);

// Positive record (output flipped) followed by the negative record (output
// verbatim). Ids are "<id>#pos" and "<id>#neg"; source_id is the example id.
// Throws InvalidInputError unless `kind` is a flip kind.
std::array<Record, 2> MakePosNeg(const Record& example, NoiseKind kind);

// MakePosNeg over every record, in order, into a dataset named `name`.
corpus::Dataset FlipDataset(const corpus::Dataset& base, NoiseKind kind,
                            std::string name);

// Uniform derangement of [0, n) by rejecting uniform permutations that have a
// fixed point. Throws InvalidInputError for n < 2.
std::vector<std::size_t> SampleDerangement(std::size_t n, std::uint64_t seed);

// Record i keeps its question fields and takes the output of record pi(i).
corpus::Dataset DerangeAnswers(const corpus::Dataset& base, std::uint64_t seed,
                               std::string name);

// ---------------------------------------------------------------------------
// Counterfactual answers

enum class CfactStatus { kAccepted, kFlagged, kExhausted };

std::string_view ToString(CfactStatus status);
CfactStatus ParseCfactStatus(std::string_view name);

struct CfactOutcome {
  std::string question_id;
  std::string candidate;
  CfactStatus status = CfactStatus::kAccepted;
  int attempts = 0;

  bool operator==(const CfactOutcome&) const = default;
};

struct CfactPolicy {
  int max_attempts = 5;
};

struct CfactItem {
  std::string question_id;
  std::string question;
  std::string fact;
};

enum class ValidatorLabel { kIncorrect, kCorrect, kUnparsed };

// First whole-word occurrence of "incorrect" or "correct", case-insensitive.
ValidatorLabel ParseValidatorLabel(std::string_view reply);

// `rejected` lists earlier candidates the validator still judged correct.
std::string RenderGenerationPrompt(
    const CfactItem& item, const std::vector<std::string>& rejected = {});
std::string RenderValidationPrompt(const CfactItem& item,
                                   const std::string& candidate);

// Outcome of one item plus every flagged candidate seen on the way.
struct CfactTrace {
  CfactOutcome outcome;
  std::vector<CfactOutcome> flagged;
};

// Generates a candidate, asks the validator, and regenerates while the
// validator does not confirm the candidate as incorrect, up to
// policy.max_attempts. Client failures become a StageError naming the item.
CfactTrace CounterfactualRound(const CfactItem& item,
                               inference::ModelClient& generator,
                               inference::ModelClient& validator,
                               const CfactPolicy& policy);

// Append-only line-delimited store of flagged and exhausted outcomes.
class ReviewQueue {
 public:
  explicit ReviewQueue(std::filesystem::path path) : path_(std::move(path)) {}
  void Append(const std::vector<CfactOutcome>& outcomes);
  std::vector<CfactOutcome> Load() const;
  const std::filesystem::path& path() const { return path_; }

  static std::string Serialize(const CfactOutcome& outcome);
  static CfactOutcome Parse(std::string_view line, const std::string& source,
                            std::size_t line_number);

 private:
  std::filesystem::path path_;
};

struct CfactRun {
  std::vector<CfactOutcome> outcomes;  // one per item, input order
  std::size_t accepted = 0;
  std::size_t exhausted = 0;
  std::size_t queued = 0;
};

// Runs CounterfactualRound for every item with at most `max_in_flight` items
// in progress. Queue entries are appended in item order once all items are
// done, so the file content is independent of scheduling.
CfactRun RunCounterfactuals(const std::vector<CfactItem>& items,
                            inference::ModelClient& generator,
                            inference::ModelClient& validator,
                            const CfactPolicy& policy, std::size_t max_in_flight,
                            ReviewQueue& queue);

// Builds the counterfactual dataset from accepted outcomes: question fields
// of the matching fact record, output = accepted candidate.
corpus::Dataset CounterfactualDataset(const corpus::Dataset& facts,
                                      const std::vector<CfactOutcome>& outcomes,
                                      std::string name);

}  // namespace noisekit::noise

#endif  // NOISEKIT_NOISE_H_
