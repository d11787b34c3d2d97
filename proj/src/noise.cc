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

#include "noisekit/noise.h"

#include <algorithm>
#include <cctype>
#include <exception>
#include <fstream>
#include <unordered_map>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/parallel.h"
#include "noisekit/random.h"
#include "noisekit/text.h"

namespace noisekit::noise {
namespace {

constexpr std::string_view kDetachable = ".,!?;:\"()[]";

bool IsDetachable(char c) {
  return kDetachable.find(c) != std::string_view::npos;
}

}  // namespace

std::vector<std::string> TokenizeWords(std::string_view text) {
  std::vector<std::string> tokens;
  for (const auto& chunk : text::SplitWhitespace(text)) {
    std::size_t b = 0;
    std::size_t e = chunk.size();
    while (b < e && IsDetachable(chunk[b])) {
      tokens.emplace_back(1, chunk[b]);
      ++b;
    }
    std::size_t tail = e;
    while (tail > b && IsDetachable(chunk[tail - 1])) --tail;
    if (tail > b) tokens.push_back(chunk.substr(b, tail - b));
    for (std::size_t i = tail; i < e; ++i) tokens.emplace_back(1, chunk[i]);
  }
  return tokens;
}

bool IsPunctuationToken(std::string_view token) {
  if (token.empty()) return false;
  return std::all_of(token.begin(), token.end(), [](char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && std::ispunct(u);
  });
}

std::string FlipWord(std::string_view text) {
  auto tokens = TokenizeWords(text);
  std::reverse(tokens.begin(), tokens.end());
  return text::Join(tokens, " ");
}

std::string FlipChar(std::string_view text) {
  const auto units = text::DecodeUtf8(text);
  std::string out;
  out.reserve(text.size());
  for (auto it = units.rbegin(); it != units.rend(); ++it) {
    out.append(it->bytes);
  }
  return out;
}

std::string Flip(NoiseKind kind, std::string_view text) {
  switch (kind) {
    case NoiseKind::kWordFlip:
      return FlipWord(text);
    case NoiseKind::kCharFlip:
      return FlipChar(text);
    default:
      return std::string(text);
  }
}

std::array<Record, 2> MakePosNeg(const Record& example, NoiseKind kind) {
  if (!IsFlip(kind)) {
    throw InvalidInputError("positive/negative pairs need a flip kind, got " +
                            std::string(ToString(kind)));
  }
  Record positive = example;
  positive.id = example.id + "#pos";
  positive.output = Flip(kind, example.output);
  positive.role = Role::kPositive;
  positive.noise = kind;
  positive.source_id = example.id;

  Record negative = example;
  negative.id = example.id + "#neg";
  negative.role = Role::kNegative;
  negative.noise = kind;
  negative.source_id = example.id;
  return {std::move(positive), std::move(negative)};
}

corpus::Dataset FlipDataset(const corpus::Dataset& base, NoiseKind kind,
                            std::string name) {
  corpus::Dataset out;
  out.name = std::move(name);
  out.noise_kind = kind;
  out.parents = {base.name};
  out.records.reserve(base.records.size() * 2);
  for (const auto& r : base.records) {
    for (auto& rec : MakePosNeg(r, kind)) out.records.push_back(std::move(rec));
  }
  return out;
}

std::vector<std::size_t> SampleDerangement(std::size_t n, std::uint64_t seed) {
  if (n < 2) {
    throw InvalidInputError("a derangement needs at least 2 records, got " +
                            std::to_string(n));
  }
  Rng rng(seed);
  std::vector<std::size_t> perm(n);
  for (;;) {
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    rng.Shuffle(perm);
    bool fixed = false;
    for (std::size_t i = 0; i < n && !fixed; ++i) fixed = perm[i] == i;
    if (!fixed) return perm;
  }
}

corpus::Dataset DerangeAnswers(const corpus::Dataset& base, std::uint64_t seed,
                               std::string name) {
  const auto perm = SampleDerangement(base.records.size(), seed);
  corpus::Dataset out;
  out.name = std::move(name);
  out.noise_kind = NoiseKind::kIrrelevant;
  out.parents = {base.name};
  out.seed = seed;
  out.records.reserve(base.records.size());
  for (std::size_t i = 0; i < base.records.size(); ++i) {
    Record r = base.records[i];
    r.output = base.records[perm[i]].output;
    r.role = Role::kPlain;
    r.noise = NoiseKind::kIrrelevant;
    r.source_id = base.records[i].id;
    out.records.push_back(std::move(r));
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string_view ToString(CfactStatus status) {
  switch (status) {
    case CfactStatus::kAccepted:
      return "accepted";
    case CfactStatus::kFlagged:
      return "flagged";
    case CfactStatus::kExhausted:
      return "exhausted";
  }
  return "";
}

CfactStatus ParseCfactStatus(std::string_view name) {
  if (name == "accepted") return CfactStatus::kAccepted;
  if (name == "flagged") return CfactStatus::kFlagged;
  if (name == "exhausted") return CfactStatus::kExhausted;
  throw ValidationError("unknown counterfactual status '" + std::string(name) +
                        "'");
}

ValidatorLabel ParseValidatorLabel(std::string_view reply) {
  const std::string lower = text::AsciiLower(reply);
  std::size_t i = 0;
  while (i < lower.size()) {
    if (!std::isalpha(static_cast<unsigned char>(lower[i]))) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < lower.size() && std::isalpha(static_cast<unsigned char>(lower[j]))) {
      ++j;
    }
    const std::string_view word(lower.data() + i, j - i);
    if (word == "incorrect") return ValidatorLabel::kIncorrect;
    if (word == "correct") return ValidatorLabel::kCorrect;
    i = j;
  }
  return ValidatorLabel::kUnparsed;
}

std::string RenderGenerationPrompt(const CfactItem& item,
                                   const std::vector<std::string>& rejected) {
  std::string avoid;
  if (!rejected.empty()) {
    avoid = "\nThese earlier answers were judged factually correct and must "
            "not be repeated:";
    for (const auto& r : rejected) avoid += "\n- " + r;
  }
  return "Rewrite the answer to the question below so that it becomes "
         "factually incorrect. Keep the topic, tone and approximate length of "
         "the correct answer.\n"
         "Make sure you generate only the new answer and no additional "
         "explanations or details.\n"
         "Question: " +
         item.question + "\nCorrect answer: " + item.fact + avoid +
         "\nIncorrect answer:";
}

std::string RenderValidationPrompt(const CfactItem& item,
                                   const std::string& candidate) {
  return "Decide whether the answer given for the question below is factually "
         "correct.\n"
         "Respond with 'Correct' if it is factually correct and 'Incorrect' if "
         "it is not, without adding any details or explanations.\n"
         "Question: " +
         item.question + "\nAnswer: " + candidate;
}

CfactTrace CounterfactualRound(const CfactItem& item,
                               inference::ModelClient& generator,
                               inference::ModelClient& validator,
                               const CfactPolicy& policy) {
  if (policy.max_attempts < 1) {
    throw ConfigError("counterfactual retry bound must be at least 1");
  }
  CfactTrace trace;
  std::string candidate;
  std::vector<std::string> rejected;
  for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
    const std::string suffix = "#" + std::to_string(attempt);
    std::string reply;
    try {
      candidate = text::Trim(
          generator
              .Complete({item.question_id + "/gen" + suffix,
                         RenderGenerationPrompt(item, rejected),
                         item.question_id})
              .text);
      reply = validator
                  .Complete({item.question_id + "/val" + suffix,
                             RenderValidationPrompt(item, candidate),
                             item.question_id})
                  .text;
    } catch (const Error& e) {
      throw StageError("counterfactual", item.question_id, e.what());
    }
    if (!candidate.empty() &&
        ParseValidatorLabel(reply) == ValidatorLabel::kIncorrect) {
      trace.outcome = {item.question_id, candidate, CfactStatus::kAccepted,
                       attempt};
      return trace;
    }
    trace.flagged.push_back(
        {item.question_id, candidate, CfactStatus::kFlagged, attempt});
    rejected.push_back(candidate);
  }
  trace.outcome = {item.question_id, candidate, CfactStatus::kExhausted,
                   policy.max_attempts};
  return trace;
}

std::string ReviewQueue::Serialize(const CfactOutcome& o) {
  nlohmann::ordered_json j;
  j["question_id"] = o.question_id;
  j["candidate"] = o.candidate;
  j["status"] = std::string(ToString(o.status));
  j["attempts"] = o.attempts;
  return j.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);
}

CfactOutcome ReviewQueue::Parse(std::string_view line, const std::string& source,
                                std::size_t line_number) {
  try {
    const auto j = nlohmann::json::parse(line);
    CfactOutcome o;
    o.question_id = j.at("question_id").get<std::string>();
    o.candidate = j.at("candidate").get<std::string>();
    o.status = ParseCfactStatus(j.at("status").get<std::string>());
    o.attempts = j.at("attempts").get<int>();
    if (o.attempts < 1) throw ValidationError("attempts must be positive");
    return o;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, line_number, e.what());
  } catch (const ValidationError& e) {
    throw ParseError(source, line_number, e.what());
  }
}

void ReviewQueue::Append(const std::vector<CfactOutcome>& outcomes) {
  if (path_.has_parent_path()) {
    std::filesystem::create_directories(path_.parent_path());
  }
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw IoError(path_.string(), "cannot open review queue");
  for (const auto& o : outcomes) out << Serialize(o) << '\n';
  if (!out) throw IoError(path_.string(), "write failed");
}

std::vector<CfactOutcome> ReviewQueue::Load() const {
  std::vector<CfactOutcome> out;
  if (!std::filesystem::exists(path_)) return out;
  const std::string content = ReadFile(path_);
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string::npos) end = content.size();
    ++line_no;
    out.push_back(Parse(std::string_view(content).substr(start, end - start),
                        path_.string(), line_no));
    start = end + 1;
  }
  return out;
}

CfactRun RunCounterfactuals(const std::vector<CfactItem>& items,
                            inference::ModelClient& generator,
                            inference::ModelClient& validator,
                            const CfactPolicy& policy, std::size_t max_in_flight,
                            ReviewQueue& queue) {
  if (max_in_flight < 1) throw InvalidInputError("max_in_flight must be >= 1");
  std::vector<CfactTrace> traces(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  ParallelFor(items.size(), max_in_flight, [&](std::size_t i) {
    try {
      traces[i] = CounterfactualRound(items[i], generator, validator, policy);
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  CfactRun run;
  std::vector<CfactOutcome> queued;
  for (auto& t : traces) {
    for (auto& f : t.flagged) queued.push_back(std::move(f));
    if (t.outcome.status == CfactStatus::kExhausted) {
      queued.push_back(t.outcome);
      ++run.exhausted;
    } else {
      ++run.accepted;
    }
    run.outcomes.push_back(std::move(t.outcome));
  }
  run.queued = queued.size();
  if (!queued.empty()) queue.Append(queued);
  return run;
}

corpus::Dataset CounterfactualDataset(const corpus::Dataset& facts,
                                      const std::vector<CfactOutcome>& outcomes,
                                      std::string name) {
  std::unordered_map<std::string, const CfactOutcome*> accepted;
  for (const auto& o : outcomes) {
    if (o.status == CfactStatus::kAccepted) accepted[o.question_id] = &o;
  }
  corpus::Dataset out;
  out.name = std::move(name);
  out.noise_kind = NoiseKind::kCounterfactual;
  out.parents = {facts.name};
  for (const auto& r : facts.records) {
    auto it = accepted.find(r.id);
    if (it == accepted.end()) continue;
    Record c = r;
    c.output = it->second->candidate;
    c.role = Role::kPlain;
    c.noise = NoiseKind::kCounterfactual;
    c.source_id = r.id;
    out.records.push_back(std::move(c));
  }
  return out;
}

}  // namespace noisekit::noise
