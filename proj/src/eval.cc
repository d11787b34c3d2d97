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

#include "noisekit/eval.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <utility>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/hashing.h"
#include "noisekit/noise.h"
#include "noisekit/prompts.h"
#include "noisekit/random.h"
#include "noisekit/text.h"

namespace noisekit::eval {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

bool IsJudgePunctuation(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
  }
  return (cp >= 0x2010 && cp <= 0x2027) || cp == 0x00A1 || cp == 0x00BF ||
         cp == 0x00AB || cp == 0x00BB;
}

bool IsWordChar(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

// Index of the first whole-word, case-insensitive occurrence of any label,
// paired with the label's position in `labels`.
std::optional<std::size_t> FirstLabel(std::string_view reply,
                                      std::initializer_list<std::string_view> labels) {
  const std::string lower = text::AsciiLower(reply);
  std::size_t i = 0;
  while (i < lower.size()) {
    if (!IsWordChar(static_cast<unsigned char>(lower[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < lower.size() && IsWordChar(static_cast<unsigned char>(lower[j]))) {
      ++j;
    }
    const std::string_view word(lower.data() + i, j - i);
    std::size_t idx = 0;
    for (auto label : labels) {
      if (word == label) return idx;
      ++idx;
    }
    i = j;
  }
  return std::nullopt;
}

std::size_t LcsLength(const std::vector<std::string>& a,
                      const std::vector<std::string>& b) {
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1
                                    : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

bool ContainsAtTokenBoundary(const std::string& haystack,
                             const std::string& needle) {
  return (" " + haystack + " ").find(" " + needle + " ") != std::string::npos;
}

std::string JoinPromptParts(std::string_view a, std::string_view b) {
  std::string out(a);
  out.append("\n\n").append(b);
  return out;
}

double Percent(std::size_t num, std::size_t den) {
  return den == 0 ? 0.0 : 100.0 * static_cast<double>(num) /
                              static_cast<double>(den);
}

std::string Fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

template <typename T>
T Field(const json& obj, const char* key, const std::string& source) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(source, 1, std::string("missing key '") + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ParseError(source, 1, std::string("bad value for '") + key + "'");
  }
}

}  // namespace

std::string_view ToString(Similarity s) {
  return s == Similarity::kAccurate ? "Accurate" : "Inaccurate";
}

std::string_view ToString(Grammar g) {
  return g == Grammar::kYes ? "Yes" : "No";
}

Similarity ParseSimilarity(std::string_view name) {
  if (name == "Accurate") return Similarity::kAccurate;
  if (name == "Inaccurate") return Similarity::kInaccurate;
  throw ValidationError("unknown similarity label '" + std::string(name) + "'");
}

Grammar ParseGrammar(std::string_view name) {
  if (name == "Yes") return Grammar::kYes;
  if (name == "No") return Grammar::kNo;
  throw ValidationError("unknown grammar label '" + std::string(name) + "'");
}

std::string NormalizeForJudge(std::string_view input) {
  std::string out;
  out.reserve(input.size());
  for (const auto& unit : text::DecodeUtf8(input)) {
    if (unit.valid && IsJudgePunctuation(unit.code_point)) {
      continue;
    }
    if (unit.bytes.size() == 1) {
      out.push_back(static_cast<char>(
          std::tolower(static_cast<unsigned char>(unit.bytes[0]))));
    } else {
      out.append(unit.bytes);
    }
  }
  return text::CollapseWhitespace(out);
}

double TokenF1(std::string_view response, std::string_view gold) {
  const auto r = text::SplitWhitespace(NormalizeForJudge(response));
  const auto g = text::SplitWhitespace(NormalizeForJudge(gold));
  if (r.empty() || g.empty()) return 0.0;
  const auto lcs = LcsLength(r, g);
  return 2.0 * static_cast<double>(lcs) / static_cast<double>(r.size() + g.size());
}

Similarity RuleJudge(std::string_view response, std::string_view gold,
                     double f1_threshold) {
  const std::string r = NormalizeForJudge(response);
  const std::string g = NormalizeForJudge(gold);
  if (g.empty()) {
    return text::CollapseWhitespace(response) == text::CollapseWhitespace(gold)
               ? Similarity::kAccurate
               : Similarity::kInaccurate;
  }
  if (r.empty()) return Similarity::kInaccurate;
  if (ContainsAtTokenBoundary(r, g) || ContainsAtTokenBoundary(g, r)) {
    return Similarity::kAccurate;
  }
  return TokenF1(response, gold) >= f1_threshold ? Similarity::kAccurate
                                                 : Similarity::kInaccurate;
}

Grammar RuleGrammar(std::string_view response) {
  bool has_word = false;
  for (const auto& tok : noise::TokenizeWords(response)) {
    if (!noise::IsPunctuationToken(tok)) has_word = true;
  }
  const bool terminated = response.find_first_of(".!?") != std::string_view::npos;
  return has_word && terminated ? Grammar::kYes : Grammar::kNo;
}

std::string Unflip(NoiseKind kind, std::string_view response) {
  return noise::Flip(kind, response);
}

Similarity FlipAwareCompare(std::string_view response, std::string_view gold,
                            NoiseKind kind, const SimilarityJudge& judge) {
  if (text::Trim(gold).empty()) {
    throw ValidationError("flip-aware comparison needs a non-empty gold");
  }
  return judge(Unflip(kind, response), gold);
}

Similarity FlipAwareCompare(std::string_view response, std::string_view gold,
                            NoiseKind kind, double f1_threshold) {
  return FlipAwareCompare(
      response, gold, kind,
      [f1_threshold](std::string_view r, std::string_view g) {
        return RuleJudge(r, g, f1_threshold);
      });
}

std::optional<Similarity> ParseSimilarityLabel(std::string_view reply) {
  auto idx = FirstLabel(reply, {"accurate", "inaccurate"});
  if (!idx) return std::nullopt;
  return *idx == 0 ? Similarity::kAccurate : Similarity::kInaccurate;
}

std::optional<Grammar> ParseGrammarLabel(std::string_view reply) {
  auto idx = FirstLabel(reply, {"yes", "no"});
  if (!idx) return std::nullopt;
  return *idx == 0 ? Grammar::kYes : Grammar::kNo;
}

Similarity LlmJudge(std::string_view question, std::string_view gold,
                    std::string_view response, inference::ModelClient& client,
                    const std::string& request_id) {
  auto prompt = prompts::RenderJudgePrompt(prompts::JudgeKind::kSimilarity,
                                           question, gold, response);
  auto reply = client.Complete({request_id, prompt.rendered, request_id});
  auto label = ParseSimilarityLabel(reply.text);
  if (!label) {
    throw ParseError(request_id, 1,
                     "no Accurate/Inaccurate label in judge reply");
  }
  return *label;
}

Grammar LlmGrammarJudge(std::string_view question, std::string_view response,
                        inference::ModelClient& client,
                        const std::string& request_id) {
  auto prompt = prompts::RenderJudgePrompt(prompts::JudgeKind::kGrammar,
                                           question, "", response);
  auto reply = client.Complete({request_id, prompt.rendered, request_id});
  auto label = ParseGrammarLabel(reply.text);
  if (!label) {
    throw ParseError(request_id, 1, "no Yes/No label in grammar judge reply");
  }
  return *label;
}

// ---------------------------------------------------------------------------

Dictionary Dictionary::Load(const std::filesystem::path& path) {
  const std::string content = ReadFile(path);
  Dictionary d;
  d.label_ = path.filename().string();
  std::string_view rest = content;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    auto line = text::Trim(rest.substr(0, nl));
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    if (!line.empty()) d.words_.insert(text::AsciiLower(line));
  }
  d.Finish();
  return d;
}

Dictionary Dictionary::FromWords(const std::vector<std::string>& words,
                                 std::string label) {
  Dictionary d;
  d.label_ = std::move(label);
  for (const auto& w : words) {
    auto t = text::Trim(w);
    if (!t.empty()) d.words_.insert(text::AsciiLower(t));
  }
  d.Finish();
  return d;
}

void Dictionary::Finish() {
  if (words_.empty()) {
    throw ValidationError("dictionary '" + label_ + "' has no words");
  }
  std::vector<std::string_view> sorted(words_.begin(), words_.end());
  std::sort(sorted.begin(), sorted.end());
  std::string joined;
  for (auto w : sorted) joined.append(w).push_back('\n');
  hash_ = Sha256Hex(joined);
}

bool Dictionary::Contains(std::string_view word) const {
  return words_.count(text::AsciiLower(word)) > 0;
}

double EnglishWordRatio(std::string_view response, const Dictionary& dictionary) {
  std::size_t words = 0, hits = 0;
  for (const auto& tok : noise::TokenizeWords(response)) {
    if (noise::IsPunctuationToken(tok)) continue;
    ++words;
    if (dictionary.Contains(tok)) ++hits;
  }
  return words == 0 ? 0.0
                    : static_cast<double>(hits) / static_cast<double>(words);
}

bool IsOneWordGold(std::string_view gold) {
  std::size_t words = 0;
  for (const auto& tok : noise::TokenizeWords(gold)) {
    if (!noise::IsPunctuationToken(tok)) ++words;
  }
  return words == 1;
}

// ---------------------------------------------------------------------------

std::string_view ToString(JudgeMode mode) {
  return mode == JudgeMode::kRule ? "rule" : "model";
}

JudgeMode ParseJudgeMode(std::string_view name) {
  if (name == "rule") return JudgeMode::kRule;
  if (name == "model") return JudgeMode::kModel;
  throw ConfigError("unknown judge mode '" + std::string(name) +
                    "' (expected rule or model)");
}

void EvalReport::Aggregate() {
  items = judgments.size();
  evaluated = errors = accurate = 0;
  multi_word_evaluated = multi_word_accurate = grammatical = 0;
  double ratio_sum = 0.0;
  for (const auto& j : judgments) {
    if (!j.ok()) {
      ++errors;
      continue;
    }
    ++evaluated;
    const bool acc = j.similarity == Similarity::kAccurate;
    if (acc) ++accurate;
    if (!j.one_word_gold) {
      ++multi_word_evaluated;
      if (acc) ++multi_word_accurate;
    }
    if (j.grammatical == Grammar::kYes) ++grammatical;
    ratio_sum += j.english_word_ratio;
  }
  accuracy_percent = Percent(accurate, evaluated);
  accuracy_excluding_one_word_percent =
      multi_word_evaluated == 0
          ? std::nullopt
          : std::optional<double>(Percent(multi_word_accurate, multi_word_evaluated));
  grammar_percent = Percent(grammatical, evaluated);
  mean_word_ratio =
      evaluated == 0 ? 0.0 : ratio_sum / static_cast<double>(evaluated);
}

std::string PromptText(const Record& record) {
  return record.input.empty() ? record.instruction
                              : JoinPromptParts(record.instruction, record.input);
}

inference::GoldLookup GoldFor(const corpus::Dataset& suite) {
  inference::GoldLookup gold;
  for (const auto& r : suite.records) gold[r.id] = r.output;
  return gold;
}

EvalReport EvaluateSuite(inference::ModelClient& client,
                         const corpus::Dataset& suite, NoiseKind kind,
                         const JudgeConfig& judge, const Dictionary& dictionary,
                         const EvalOptions& options) {
  if (suite.records.empty()) {
    throw ValidationError("suite '" + suite.name + "' has no items");
  }
  const bool model_judge = judge.similarity == JudgeMode::kModel ||
                           judge.grammar == JudgeMode::kModel;
  if (model_judge && !judge.client) {
    throw ConfigError("model judge selected but no judge client configured");
  }

  EvalReport report;
  report.suite = suite.name;
  report.model = client.label();
  report.label = options.label.empty() ? report.model : options.label;
  report.kind = kind;
  auto& cfg = report.config;
  cfg.similarity_judge = ToString(judge.similarity);
  cfg.grammar_judge = ToString(judge.grammar);
  cfg.judge_backend = model_judge ? judge.client->label() : "rule";
  cfg.f1_threshold = judge.f1_threshold;
  cfg.temperature = client.params().temperature;
  cfg.max_tokens = client.params().max_tokens;
  cfg.dictionary = dictionary.label();
  cfg.dictionary_hash = dictionary.hash();
  cfg.transcript = options.transcript;

  std::vector<inference::CompletionRequest> requests;
  requests.reserve(suite.records.size());
  for (const auto& r : suite.records) {
    requests.push_back({suite.name + "/" + r.id, PromptText(r), r.id});
  }
  const auto responses =
      inference::BatchComplete(client, requests, options.max_in_flight);

  report.judgments.resize(suite.records.size());
  for (std::size_t i = 0; i < suite.records.size(); ++i) {
    const Record& r = suite.records[i];
    Judgment& j = report.judgments[i];
    j.item_id = r.id;
    j.gold = r.output;
    j.one_word_gold = IsOneWordGold(r.output);
    if (!responses[i].ok()) {
      j.error = responses[i].error;
      continue;
    }
    j.response = responses[i].completion->text;
    j.scored_response = Unflip(kind, j.response);
    if (text::Trim(r.output).empty()) {
      j.error = "item has an empty gold answer";
      continue;
    }
    if (judge.similarity == JudgeMode::kRule) {
      j.similarity = RuleJudge(j.scored_response, j.gold, judge.f1_threshold);
    }
    if (judge.grammar == JudgeMode::kRule) {
      j.grammatical = RuleGrammar(j.scored_response);
    }
    j.english_word_ratio = EnglishWordRatio(j.scored_response, dictionary);
  }

  if (model_judge) {
    // One similarity and one grammar request per scored item, in item order.
    struct Pending {
      std::size_t item;
      bool similarity;
    };
    std::vector<Pending> pending;
    std::vector<inference::CompletionRequest> judge_requests;
    for (std::size_t i = 0; i < report.judgments.size(); ++i) {
      Judgment& j = report.judgments[i];
      if (!j.ok()) continue;
      const std::string question = inference::FinalQuestion(PromptText(suite.records[i]));
      const std::string base = suite.name + "/" + j.item_id;
      try {
        if (judge.similarity == JudgeMode::kModel) {
          auto p = prompts::RenderJudgePrompt(prompts::JudgeKind::kSimilarity,
                                              question, j.gold, j.scored_response);
          judge_requests.push_back({base + "/similarity", p.rendered, base});
          pending.push_back({i, true});
        }
        if (judge.grammar == JudgeMode::kModel) {
          auto p = prompts::RenderJudgePrompt(prompts::JudgeKind::kGrammar,
                                              question, "", j.scored_response);
          judge_requests.push_back({base + "/grammar", p.rendered, base});
          pending.push_back({i, false});
        }
      } catch (const Error& e) {
        j.error = std::string("judge prompt: ") + e.what();
      }
    }
    const auto verdicts =
        inference::BatchComplete(*judge.client, judge_requests, options.max_in_flight);
    for (std::size_t k = 0; k < pending.size(); ++k) {
      Judgment& j = report.judgments[pending[k].item];
      if (!j.ok()) continue;
      if (!verdicts[k].ok()) {
        j.error = "judge: " + verdicts[k].error;
        continue;
      }
      const std::string& reply = verdicts[k].completion->text;
      if (pending[k].similarity) {
        j.similarity = ParseSimilarityLabel(reply);
        if (!j.similarity) j.error = "judge: no Accurate/Inaccurate label";
      } else {
        j.grammatical = ParseGrammarLabel(reply);
        if (!j.grammatical) j.error = "grammar judge: no Yes/No label";
      }
    }
  }

  for (auto& j : report.judgments) {
    if (!j.ok()) {
      j.similarity.reset();
      j.grammatical.reset();
      j.english_word_ratio = 0.0;
    }
  }
  report.Aggregate();
  return report;
}

EvalReport RetentionEval(inference::ModelClient& client,
                         const corpus::Dataset& suite,
                         const plans::RetentionProbeConfig& probe,
                         const JudgeConfig& judge, const Dictionary& dictionary,
                         const EvalOptions& options) {
  const NoiseKind kind = plans::SuiteKind(probe.suite);
  if (suite.noise_kind != kind) {
    throw ValidationError("retention probe " + probe.name() + " expects a " +
                          std::string(ToString(kind)) + " suite, got '" +
                          suite.name + "' (" +
                          std::string(ToString(suite.noise_kind)) + ")");
  }
  EvalOptions opts = options;
  if (opts.label.empty()) opts.label = probe.name();
  return EvaluateSuite(client, suite, kind, judge, dictionary, opts);
}

NoiseKind ReplicationKind(const corpus::Dataset& train) {
  return IsFlip(train.noise_kind) ? train.noise_kind : NoiseKind::kNone;
}

corpus::Dataset ReplicationSuite(const corpus::Dataset& train, std::size_t n,
                                 std::uint64_t seed) {
  std::vector<const Record*> pool;
  for (const auto& r : train.records) {
    if (r.role != Role::kNegative) pool.push_back(&r);
  }
  if (n > pool.size()) {
    throw InvalidInputError("replication check asks for " + std::to_string(n) +
                            " samples but '" + train.name + "' has " +
                            std::to_string(pool.size()) + " eligible records");
  }
  const NoiseKind kind = ReplicationKind(train);
  corpus::Dataset out;
  out.name = train.name + ".replication";
  out.noise_kind = kind;
  out.parents = {train.name};
  out.seed = seed;
  Rng rng(seed);
  for (auto idx : rng.Sample(pool.size(), n)) {
    Record r = *pool[idx];
    if (r.role == Role::kPositive) r.output = noise::Flip(kind, r.output);
    out.records.push_back(std::move(r));
  }
  return out;
}

EvalReport TrainReplicationCheck(inference::ModelClient& client,
                                 const corpus::Dataset& train, std::size_t n,
                                 std::uint64_t seed, const JudgeConfig& judge,
                                 const Dictionary& dictionary,
                                 const EvalOptions& options) {
  const auto suite = ReplicationSuite(train, n, seed);
  return EvaluateSuite(client, suite, suite.noise_kind, judge, dictionary,
                       options);
}

// ---------------------------------------------------------------------------

std::string RenderReport(const EvalReport& report) {
  ordered_json cfg;
  cfg["similarity_judge"] = report.config.similarity_judge;
  cfg["grammar_judge"] = report.config.grammar_judge;
  cfg["judge_backend"] = report.config.judge_backend;
  cfg["f1_threshold"] = report.config.f1_threshold;
  cfg["temperature"] = report.config.temperature;
  cfg["max_tokens"] = report.config.max_tokens;
  cfg["dictionary"] = report.config.dictionary;
  cfg["dictionary_hash"] = report.config.dictionary_hash;
  cfg["transcript"] = report.config.transcript;

  ordered_json summary;
  summary["items"] = report.items;
  summary["evaluated"] = report.evaluated;
  summary["errors"] = report.errors;
  summary["accurate"] = report.accurate;
  summary["accuracy_percent"] = report.accuracy_percent;
  summary["multi_word_evaluated"] = report.multi_word_evaluated;
  summary["multi_word_accurate"] = report.multi_word_accurate;
  summary["accuracy_excluding_one_word_percent"] =
      report.accuracy_excluding_one_word_percent
          ? ordered_json(*report.accuracy_excluding_one_word_percent)
          : ordered_json(nullptr);
  summary["grammatical"] = report.grammatical;
  summary["grammar_percent"] = report.grammar_percent;
  summary["mean_word_ratio"] = report.mean_word_ratio;

  ordered_json items = ordered_json::array();
  for (const auto& j : report.judgments) {
    ordered_json e;
    e["id"] = j.item_id;
    e["response"] = j.response;
    e["scored_response"] = j.scored_response;
    e["gold"] = j.gold;
    e["similarity"] = j.similarity ? ordered_json(ToString(*j.similarity))
                                   : ordered_json(nullptr);
    e["grammatical"] = j.grammatical ? ordered_json(ToString(*j.grammatical))
                                     : ordered_json(nullptr);
    e["english_word_ratio"] = j.english_word_ratio;
    e["one_word_gold"] = j.one_word_gold;
    e["error"] = j.error;
    items.push_back(std::move(e));
  }

  ordered_json doc;
  doc["label"] = report.label;
  doc["suite"] = report.suite;
  doc["model"] = report.model;
  doc["kind"] = ToString(report.kind);
  doc["config"] = std::move(cfg);
  doc["summary"] = std::move(summary);
  doc["items"] = std::move(items);
  return doc.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

EvalReport ParseReport(std::string_view text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, e.what());
  }
  if (!doc.is_object()) throw ParseError(source, 1, "report is not an object");
  EvalReport r;
  r.label = Field<std::string>(doc, "label", source);
  r.suite = Field<std::string>(doc, "suite", source);
  r.model = Field<std::string>(doc, "model", source);
  try {
    r.kind = ParseNoiseKind(Field<std::string>(doc, "kind", source));
  } catch (const ValidationError& e) {
    throw ParseError(source, 1, e.what());
  }
  const json cfg = Field<json>(doc, "config", source);
  r.config.similarity_judge = Field<std::string>(cfg, "similarity_judge", source);
  r.config.grammar_judge = Field<std::string>(cfg, "grammar_judge", source);
  r.config.judge_backend = Field<std::string>(cfg, "judge_backend", source);
  r.config.f1_threshold = Field<double>(cfg, "f1_threshold", source);
  r.config.temperature = Field<double>(cfg, "temperature", source);
  r.config.max_tokens = Field<int>(cfg, "max_tokens", source);
  r.config.dictionary = Field<std::string>(cfg, "dictionary", source);
  r.config.dictionary_hash = Field<std::string>(cfg, "dictionary_hash", source);
  r.config.transcript = Field<std::string>(cfg, "transcript", source);

  for (const auto& e : Field<json>(doc, "items", source)) {
    Judgment j;
    j.item_id = Field<std::string>(e, "id", source);
    j.response = Field<std::string>(e, "response", source);
    j.scored_response = Field<std::string>(e, "scored_response", source);
    j.gold = Field<std::string>(e, "gold", source);
    try {
      if (!e.at("similarity").is_null()) {
        j.similarity = ParseSimilarity(e.at("similarity").get<std::string>());
      }
      if (!e.at("grammatical").is_null()) {
        j.grammatical = ParseGrammar(e.at("grammatical").get<std::string>());
      }
    } catch (const std::exception& ex) {
      throw ParseError(source, 1, "item '" + j.item_id + "': " + ex.what());
    }
    j.english_word_ratio = Field<double>(e, "english_word_ratio", source);
    j.one_word_gold = Field<bool>(e, "one_word_gold", source);
    j.error = Field<std::string>(e, "error", source);
    r.judgments.push_back(std::move(j));
  }
  r.Aggregate();

  const json s = Field<json>(doc, "summary", source);
  const bool counts_match =
      Field<std::size_t>(s, "items", source) == r.items &&
      Field<std::size_t>(s, "evaluated", source) == r.evaluated &&
      Field<std::size_t>(s, "errors", source) == r.errors &&
      Field<std::size_t>(s, "accurate", source) == r.accurate &&
      Field<std::size_t>(s, "grammatical", source) == r.grammatical &&
      Field<std::size_t>(s, "multi_word_accurate", source) == r.multi_word_accurate;
  const bool pct_match =
      std::abs(Field<double>(s, "accuracy_percent", source) - r.accuracy_percent) < 1e-9 &&
      std::abs(Field<double>(s, "grammar_percent", source) - r.grammar_percent) < 1e-9;
  if (!counts_match || !pct_match) {
    throw IntegrityError(source + ": summary does not match per-item records");
  }
  return r;
}

std::string SummaryTable(const std::vector<EvalReport>& reports) {
  std::string out =
      "| Run | Suite | Kind | Accuracy (%) | Accuracy excl. one-word (%) | "
      "Grammar (%) | English words (%) | Items | Errors |\n"
      "|---|---|---|---:|---:|---:|---:|---:|---:|\n";
  for (const auto& r : reports) {
    out += "| " + r.label + " | " + r.suite + " | " +
           std::string(ToString(r.kind)) + " | " + Fixed2(r.accuracy_percent) +
           " | " +
           (r.accuracy_excluding_one_word_percent
                ? Fixed2(*r.accuracy_excluding_one_word_percent)
                : std::string("n/a")) +
           " | " + Fixed2(r.grammar_percent) + " | " +
           Fixed2(100.0 * r.mean_word_ratio) + " | " + std::to_string(r.items) +
           " | " + std::to_string(r.errors) + " |\n";
  }
  return out;
}

}  // namespace noisekit::eval
