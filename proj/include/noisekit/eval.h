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

#ifndef NOISEKIT_EVAL_H_
#define NOISEKIT_EVAL_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "noisekit/corpus.h"
#include "noisekit/inference.h"
#include "noisekit/plans.h"
#include "noisekit/record.h"

namespace noisekit::eval {

enum class Similarity { kAccurate, kInaccurate };
enum class Grammar { kYes, kNo };

std::string_view ToString(Similarity s);  // "Accurate" / "Inaccurate"
std::string_view ToString(Grammar g);     // "Yes" / "No"
Similarity ParseSimilarity(std::string_view name);
Grammar ParseGrammar(std::string_view name);

// ---------------------------------------------------------------------------
// Rule judges

inline constexpr double kDefaultF1Threshold = 0.6;

// Lowercase, drop punctuation, collapse whitespace.
std::string NormalizeForJudge(std::string_view text);

// Order-sensitive token F1 over normalized text: the longest common
// subsequence of tokens stands in for the overlap count.
double TokenF1(std::string_view response, std::string_view gold);

// Accurate iff either normalized text contains the other at token
// boundaries, or TokenF1 >= threshold.
Similarity RuleJudge(std::string_view response, std::string_view gold,
                     double f1_threshold = kDefaultF1Threshold);

// Yes iff the response has at least one word token and a '.', '!' or '?'.
Grammar RuleGrammar(std::string_view response);

// The response with the flip of `kind` undone; unchanged for other kinds.
std::string Unflip(NoiseKind kind, std::string_view response);

using SimilarityJudge =
    std::function<Similarity(std::string_view response, std::string_view gold)>;

// Throws ValidationError for an empty gold.
Similarity FlipAwareCompare(std::string_view response, std::string_view gold,
                            NoiseKind kind, const SimilarityJudge& judge);
Similarity FlipAwareCompare(std::string_view response, std::string_view gold,
                            NoiseKind kind,
                            double f1_threshold = kDefaultF1Threshold);

// ---------------------------------------------------------------------------
// Model judges

// First whole-word, case-insensitive label in the reply.
std::optional<Similarity> ParseSimilarityLabel(std::string_view reply);
std::optional<Grammar> ParseGrammarLabel(std::string_view reply);

// Throw ParseError when the reply carries no label.
Similarity LlmJudge(std::string_view question, std::string_view gold,
                    std::string_view response, inference::ModelClient& client,
                    const std::string& request_id = "judge");
Grammar LlmGrammarJudge(std::string_view question, std::string_view response,
                        inference::ModelClient& client,
                        const std::string& request_id = "grammar");

// ---------------------------------------------------------------------------
// Dictionary

class Dictionary {
 public:
  // One word per line; blank lines skipped. Throws ValidationError when the
  // list ends up empty.
  static Dictionary Load(const std::filesystem::path& path);
  static Dictionary FromWords(const std::vector<std::string>& words,
                              std::string label);

  // ASCII case-insensitive.
  bool Contains(std::string_view word) const;
  std::size_t size() const { return words_.size(); }
  const std::string& label() const { return label_; }
  // SHA-256 over the sorted, deduplicated, lowercased list.
  const std::string& hash() const { return hash_; }

 private:
  Dictionary() = default;
  void Finish();

  std::unordered_set<std::string> words_;
  std::string label_;
  std::string hash_;
};

// Dictionary hits over word tokens, punctuation tokens excluded; 0 when the
// response has no word tokens.
double EnglishWordRatio(std::string_view response, const Dictionary& dictionary);

// True when the gold has exactly one non-punctuation token.
bool IsOneWordGold(std::string_view gold);

// ---------------------------------------------------------------------------
// Suite evaluation

enum class JudgeMode { kRule, kModel };

std::string_view ToString(JudgeMode mode);
JudgeMode ParseJudgeMode(std::string_view name);

struct JudgeConfig {
  JudgeMode similarity = JudgeMode::kRule;
  JudgeMode grammar = JudgeMode::kRule;
  double f1_threshold = kDefaultF1Threshold;
  // Required when either mode is kModel.
  std::shared_ptr<inference::ModelClient> client;
};

struct EvalOptions {
  std::size_t max_in_flight = 1;
  std::string label;       // defaults to the model label
  std::string transcript;  // path recorded in the report
};

struct Judgment {
  std::string item_id;
  std::string response;
  std::string scored_response;  // response after undoing the suite's flip
  std::string gold;
  std::optional<Similarity> similarity;
  std::optional<Grammar> grammatical;
  double english_word_ratio = 0.0;
  bool one_word_gold = false;
  std::string error;  // non-empty iff the item was not scored

  bool ok() const { return error.empty(); }
  bool operator==(const Judgment&) const = default;
};

struct ConfigSnapshot {
  std::string similarity_judge;
  std::string grammar_judge;
  std::string judge_backend;
  double f1_threshold = kDefaultF1Threshold;
  double temperature = 0.0;
  int max_tokens = 0;
  std::string dictionary;
  std::string dictionary_hash;
  std::string transcript;

  bool operator==(const ConfigSnapshot&) const = default;
};

struct EvalReport {
  std::string label;
  std::string suite;
  std::string model;
  NoiseKind kind = NoiseKind::kNone;
  ConfigSnapshot config;
  std::vector<Judgment> judgments;

  // Aggregates, recomputable from `judgments` via Aggregate().
  std::size_t items = 0;
  std::size_t evaluated = 0;
  std::size_t errors = 0;
  std::size_t accurate = 0;
  std::size_t multi_word_evaluated = 0;
  std::size_t multi_word_accurate = 0;
  std::size_t grammatical = 0;
  double accuracy_percent = 0.0;
  // Accuracy over items whose gold is not a single word; nullopt when every
  // evaluated gold is one word.
  std::optional<double> accuracy_excluding_one_word_percent;
  double grammar_percent = 0.0;
  double mean_word_ratio = 0.0;

  void Aggregate();
  bool operator==(const EvalReport&) const = default;
};

// Prompt text sent for a record: the instruction, followed by a blank line and
// the input when there is one.
std::string PromptText(const Record& record);

// Maps record id to the record's output, for oracle backends.
inference::GoldLookup GoldFor(const corpus::Dataset& suite);

// Throws ValidationError for an empty suite and ConfigError when a model judge
// has no client.
EvalReport EvaluateSuite(inference::ModelClient& client,
                         const corpus::Dataset& suite, NoiseKind kind,
                         const JudgeConfig& judge, const Dictionary& dictionary,
                         const EvalOptions& options = {});

// EvaluateSuite on a wtest/ctest suite with the probe's flip kind. Throws
// ValidationError when the suite's noise kind disagrees with the config.
EvalReport RetentionEval(inference::ModelClient& client,
                         const corpus::Dataset& suite,
                         const plans::RetentionProbeConfig& probe,
                         const JudgeConfig& judge, const Dictionary& dictionary,
                         const EvalOptions& options = {});

inline constexpr std::size_t kReplicationSamples = 50;

// Seeded sample of n training records, negative examples excluded. Each
// sampled record keeps its prompt; its output is the unflipped answer the
// flip-aware comparison scores against. Throws InvalidInputError when n
// exceeds the eligible records.
corpus::Dataset ReplicationSuite(const corpus::Dataset& train, std::size_t n,
                                 std::uint64_t seed);

// Kind used to score a training dataset: its flip kind, otherwise none.
NoiseKind ReplicationKind(const corpus::Dataset& train);

EvalReport TrainReplicationCheck(inference::ModelClient& client,
                                 const corpus::Dataset& train, std::size_t n,
                                 std::uint64_t seed, const JudgeConfig& judge,
                                 const Dictionary& dictionary,
                                 const EvalOptions& options = {});

// ---------------------------------------------------------------------------
// Reports

std::string RenderReport(const EvalReport& report);
// Throws IntegrityError when stored aggregates disagree with the items.
EvalReport ParseReport(std::string_view text, const std::string& source);

// Markdown table, one row per report, percentages to two decimals.
std::string SummaryTable(const std::vector<EvalReport>& reports);

}  // namespace noisekit::eval

#endif  // NOISEKIT_EVAL_H_
