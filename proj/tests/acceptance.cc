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

// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero when a gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "noisekit/cli.h"
#include "noisekit/corpus.h"
#include "noisekit/eval.h"
#include "noisekit/fileio.h"
#include "noisekit/inference.h"
#include "noisekit/noise.h"
#include "noisekit/plans.h"
#include "noisekit/prompts.h"
#include "noisekit/random.h"
#include "noisekit/tokscan.h"
#include "examples.h"
#include "test_util.h"

namespace noisekit {
namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

class Failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void Check(bool ok, const std::string& what) {
  if (!ok) throw Failure(what);
}

template <typename A, typename B>
void CheckEq(const A& actual, const B& expected, const std::string& what) {
  if (!(actual == expected)) {
    std::ostringstream s;
    s << what << ": got " << actual << ", want " << expected;
    throw Failure(s.str());
  }
}

double MillisSince(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

void CheckRuntime(Clock::time_point start, double limit_ms) {
  const double ms = MillisSince(start);
  std::ostringstream s;
  s << "runtime " << std::fixed << std::setprecision(1) << ms << " ms exceeds "
    << limit_ms << " ms";
  Check(ms < limit_ms, s.str());
}

const eval::Dictionary& Web2() {
  static const eval::Dictionary d =
      eval::Dictionary::Load(testing::DataDir() / "dictionary" / "web2.txt");
  return d;
}

std::shared_ptr<const inference::GoldLookup> GoldOf(const corpus::Dataset& suite) {
  return std::make_shared<const inference::GoldLookup>(eval::GoldFor(suite));
}

double Accuracy(inference::ModelClient& client, const corpus::Dataset& suite) {
  return eval::EvaluateSuite(client, suite, suite.noise_kind, {}, Web2()).accuracy_percent;
}

std::vector<std::string> StageNames(const plans::TrainingPlan& plan) {
  std::vector<std::string> out;
  for (const auto& s : plan.stages) out.push_back(s.dataset);
  return out;
}

// ---------------------------------------------------------------------------

void TableOneRows() {
  Check(noise::FlipWord(testing::kUniverse) == testing::kUniverseWordFlip, "word flip row differs");
  Check(noise::FlipChar(testing::kUniverse) == testing::kUniverseCharFlip, "char flip row differs");
  // Median of repeated timings keeps scheduler noise out of a sub-millisecond bound.
  std::vector<double> samples;
  for (int i = 0; i < 101; ++i) {
    const auto start = Clock::now();
    const auto w = noise::FlipWord(testing::kUniverse);
    const auto c = noise::FlipChar(testing::kUniverse);
    samples.push_back(MillisSince(start));
    Check(!w.empty() && !c.empty(), "empty flip");
  }
  std::nth_element(samples.begin(), samples.begin() + 50, samples.end());
  Check(samples[50] < 1.0, "flip runtime is not below 1 ms");
}

void TableSixRows() {
  CheckEq(noise::FlipWord(testing::kDialogueAnswer), std::string(testing::kDialogueWordFlip),
          "dialogue word flip");
  CheckEq(noise::FlipChar(testing::kDialogueAnswer), std::string(testing::kDialogueCharFlip),
          "dialogue char flip");

  Record irrelevant;
  irrelevant.id = "irr_train:1";
  irrelevant.instruction = testing::kDialogueInstruction;
  irrelevant.input = testing::kDialogueInput;
  irrelevant.output = testing::kIrrelevantAnswer;
  irrelevant.noise = NoiseKind::kIrrelevant;
  irrelevant.source_id = "ad_train:1";
  irrelevant.source = "irr_train";

  Record cfact;
  cfact.id = "cfact_train:1";
  cfact.instruction = testing::kCommunicationQuestion;
  cfact.output = testing::kCommunicationCounterfactual;
  cfact.noise = NoiseKind::kCounterfactual;
  cfact.source_id = "gk:1";
  cfact.source = "cfact_train";

  for (const auto& r : {irrelevant, cfact}) {
    Check(corpus::ParseRecordLine(corpus::SerializeRecord(r), "row", 1) == r,
          "record " + r.id + " does not round-trip");
  }
  testing::TempDir dir;
  corpus::Dataset d;
  d.name = "table_six";
  d.records = {irrelevant, cfact};
  corpus::WriteDataset(dir.path(), d);
  Check(corpus::ReadDataset(corpus::DataPath(dir.path(), "table_six")).records == d.records,
        "dataset file does not round-trip");

  // The generate-validate loop reproduces the printed counterfactual row.
  inference::ScriptedClient gen({std::string(testing::kCommunicationCounterfactual)});
  inference::ScriptedClient val({std::string("Incorrect")});
  const auto trace = noise::CounterfactualRound(
      {"gk:1", testing::kCommunicationQuestion, testing::kCommunicationFact}, gen, val, {});
  Check(trace.outcome.status == noise::CfactStatus::kAccepted &&
            trace.outcome.candidate == testing::kCommunicationCounterfactual,
        "counterfactual round did not accept the printed answer");
}

std::string RandomString(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "a", "b", "Z", "word", " ", "  ", "\n", "\t", "\r\n", ".", ",", "!", "?", ";", ":",
      "\"", "(", ")", "[", "]", "'", "-", "é", "ß", "日本", "語", "🙂", "👍🏽", "Ω", "ж",
      "١٢", "x.y", "don't", "e.g."};
  std::string s;
  const auto n = rng.UniformBelow(40);
  for (std::uint64_t i = 0; i < n; ++i) s += pieces[rng.UniformBelow(pieces.size())];
  return s;
}

void Involutions() {
  const auto start = Clock::now();
  Rng rng(20240601);
  std::size_t failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const std::string s = RandomString(rng);
    if (noise::FlipChar(noise::FlipChar(s)) != s) ++failures;
    const std::string w = noise::FlipWord(s);
    if (noise::FlipWord(noise::FlipWord(w)) != w) ++failures;
  }
  CheckEq(failures, std::size_t{0}, "involution failures");
  CheckRuntime(start, 5000);
}

void Derangements() {
  const auto start = Clock::now();
  for (std::size_t n : {2u, 3u, 10u, 100000u}) {
    const auto perm = noise::SampleDerangement(n, 17);
    CheckEq(perm.size(), n, "permutation size");
    std::vector<bool> seen(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      Check(perm[i] != i, "fixed point at n=" + std::to_string(n));
      Check(perm[i] < n && !seen[perm[i]], "not a permutation at n=" + std::to_string(n));
      seen[perm[i]] = true;
    }
  }
  const std::set<std::vector<std::size_t>> valid = {{1, 2, 0}, {2, 0, 1}};
  std::map<std::vector<std::size_t>, int> counts;
  constexpr int kSeeds = 10000;
  for (int seed = 0; seed < kSeeds; ++seed) ++counts[noise::SampleDerangement(3, seed)];
  CheckEq(counts.size(), std::size_t{2}, "distinct size-3 derangements");
  const double sigma = std::sqrt(kSeeds * 0.5 * 0.5);
  for (const auto& [perm, count] : counts) {
    Check(valid.count(perm) > 0, "invalid size-3 derangement");
    Check(std::abs(count - kSeeds / 2.0) <= 3 * sigma,
          "size-3 frequency " + std::to_string(count) + " outside 3 sigma");
  }
  CheckRuntime(start, 5000);
}

corpus::Dataset Synthetic(std::size_t n) {
  corpus::Dataset d;
  d.name = "ad_train";
  d.records.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Record r;
    r.id = "ad_train:" + std::to_string(i + 1);
    r.instruction = "Question " + std::to_string(i) + "?";
    r.output = "Answer " + std::to_string(i) + " is here.";
    r.source = "ad_train";
    d.records.push_back(std::move(r));
  }
  return d;
}

void DatasetShape() {
  for (std::size_t n : {1u, 7u, 11265u}) {
    const auto base = Synthetic(n);
    for (auto kind : {NoiseKind::kWordFlip, NoiseKind::kCharFlip}) {
      const auto flipped = noise::FlipDataset(base, kind, "flipped");
      CheckEq(flipped.records.size(), 2 * n, "flipped size");
      for (std::size_t i = 0; i < flipped.records.size(); ++i) {
        const auto& r = flipped.records[i];
        const auto& src = base.records[i / 2];
        const bool positive = i % 2 == 0;
        Check(r.role == (positive ? Role::kPositive : Role::kNegative), "roles do not alternate");
        Check(r.output == (positive ? noise::Flip(kind, src.output) : src.output),
              "record output mismatch");
      }
    }
  }
  CheckEq(noise::FlipDataset(Synthetic(11265), NoiseKind::kWordFlip, "w").records.size(),
          std::size_t{22530}, "flipped size for 11265");
}

void CatalogCounts() {
  const auto c = plans::EnumerateCombinations();
  CheckEq(c.baseline.size(), std::size_t{1}, "baseline plans");
  CheckEq(c.learning.size(), std::size_t{15}, "learning plans");
  CheckEq(c.unlearning.size(), std::size_t{10}, "unlearning plans");
  CheckEq(c.retention.size(), std::size_t{6}, "retention configs");
  Check(StageNames(c.baseline[0]) == std::vector<std::string>{"ad_train"}, "baseline stages");
  for (std::size_t i = 0; i < 15; ++i) {
    Check(StageNames(c.learning[i]) == testing::kLearningRows[i],
          "learning row " + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < 10; ++i) {
    Check(StageNames(c.unlearning[i]) == testing::kUnlearningRows[i],
          "unlearning row " + std::to_string(i + 1));
  }
  for (std::size_t i = 0; i < 6; ++i) {
    const auto* plan = c.Find(c.retention[i].plan);
    Check(plan && StageNames(*plan) == testing::kRetentionRows[i].first &&
              plans::ToString(c.retention[i].suite) == testing::kRetentionRows[i].second,
          "retention row " + std::to_string(i + 1));
  }
}

void PlanFidelity() {
  testing::TempDir dir;
  for (const char* name : {"ad_train", "ad_wflipped", "ad_cflipped", "irr_train", "ch_train",
                           "gk", "cfact_train"}) {
    auto d = Synthetic(2);
    d.name = name;
    d.noise_kind = plans::StageNoiseKind(name).value_or(NoiseKind::kNone);
    corpus::WriteDataset(dir / "data", d);
  }
  const auto resolver = plans::DirectoryResolver(dir / "data");
  const auto catalog = plans::EnumerateCombinations();
  for (const auto* plan : catalog.All()) {
    const auto& hp = plan->hyperparameters;
    Check(hp.epochs == 5 && hp.lr_schedule == "cosine" && hp.lr_start == 3e-6 &&
              hp.weight_decay == 0.1 && hp.beta1 == 0.9 && hp.beta2 == 0.95 &&
              hp.warmup_steps == 100,
          plan->name + " hyperparameters");
    const auto path = plans::EmitPlan(*plan, resolver, dir / "plans");
    const auto parsed = plans::ParsePlan(ReadFile(path), path.string());
    Check(parsed.hyperparameters == hp, plan->name + " hyperparameters lost in round trip");
    Check(StageNames(parsed) == StageNames(*plan), plan->name + " stages lost in round trip");
    Check(plans::RenderPlan(parsed) == ReadFile(path), plan->name + " does not re-render identically");
    for (const auto& s : parsed.stages) Check(s.content_hash.size() == 64, plan->name + " hash");
  }
}

corpus::Dataset LoadJsonl(const fs::path& path) {
  auto d = corpus::LoadRecords(path);
  d.name = path.stem().string();
  return d;
}

void OracleRun() {
  const auto start = Clock::now();
  const auto test_set = LoadJsonl(testing::DataDir() / "fixtures" / "test_set_100.jsonl");
  CheckEq(test_set.records.size(), std::size_t{100}, "fixture size");
  for (const auto& r : test_set.records) Check(!eval::IsOneWordGold(r.output), "one-word gold in fixture");
  const auto suites = prompts::BuildTestSuites(test_set, {});
  const auto gold = GoldOf(suites.test);
  inference::OracleClient word(gold, NoiseKind::kWordFlip);
  inference::OracleClient chr(gold, NoiseKind::kCharFlip);
  inference::OracleClient plain(gold, NoiseKind::kNone);
  CheckEq(Accuracy(word, suites.wtest), 100.0, "flip_oracle(word) on wtest");
  CheckEq(Accuracy(chr, suites.ctest), 100.0, "flip_oracle(char) on ctest");
  CheckEq(Accuracy(plain, suites.wtest), 0.0, "gold_oracle on wtest");
  CheckEq(Accuracy(plain, suites.ctest), 0.0, "gold_oracle on ctest");
  CheckEq(Accuracy(plain, suites.test), 100.0, "gold_oracle on test");
  CheckRuntime(start, 10000);
}

void RetentionCaveat() {
  const auto test_set = LoadJsonl(testing::TestData() / "retention_one_word.jsonl");
  std::size_t one_word = 0;
  for (const auto& r : test_set.records) one_word += eval::IsOneWordGold(r.output);
  const double fraction = 100.0 * static_cast<double>(one_word) /
                          static_cast<double>(test_set.records.size());
  CheckEq(fraction, 10.0, "one-word fraction of the fixture");
  const auto suites = prompts::BuildTestSuites(test_set, {});
  inference::OracleClient plain(GoldOf(suites.wtest), NoiseKind::kNone);
  const plans::RetentionProbeConfig probe{"unlearn.ad_train-ad_wflipped-ad_train",
                                          plans::ProbeSuite::kWordTest};
  const auto report = eval::RetentionEval(plain, suites.wtest, probe, {}, Web2());
  CheckEq(report.accuracy_percent, fraction, "headline accuracy");
  Check(report.accuracy_excluding_one_word_percent.has_value(), "missing excluding-one-word value");
  CheckEq(*report.accuracy_excluding_one_word_percent, 0.0, "excluding-one-word accuracy");
}

void PromptFidelity() {
  const std::string france = "What is the capital of France?";
  CheckEq(prompts::RenderProbe(prompts::MakeProbe(prompts::DefaultShots(), france, NoiseKind::kWordFlip)),
          ReadFile(testing::Golden() / "wtest_probe.txt"), "wtest probe");
  CheckEq(prompts::RenderProbe(prompts::MakeProbe(prompts::DefaultShots(), france, NoiseKind::kCharFlip)),
          ReadFile(testing::Golden() / "ctest_probe.txt"), "ctest probe");
  CheckEq(prompts::RenderJudgePrompt(prompts::JudgeKind::kSimilarity, france,
                                     "The capital of France is Paris.",
                                     "Paris is the capital of France.").rendered,
          ReadFile(testing::Golden() / "similarity_judge_prompt.txt"), "similarity prompt");
  CheckEq(prompts::RenderJudgePrompt(prompts::JudgeKind::kGrammar, france, "",
                                     "Paris is the capital of France.").rendered,
          ReadFile(testing::Golden() / "grammar_judge_prompt.txt"), "grammar prompt");
}

void TokenizationDivergence() {
  const auto vocab = tokscan::LoadBpe(testing::DataDir() / "bpe" / "gpt2" / "vocab.json",
                                      testing::DataDir() / "bpe" / "gpt2" / "merges.txt");
  const auto report = tokscan::CompareTokenizations(vocab, testing::kDesktop);
  Check(report.char_flip().overlap_with_original < report.word_flip().overlap_with_original,
        "char-flip overlap is not below word-flip overlap");
  const auto lines = ReadFile(testing::TestData() / "bpe_reference.jsonl");
  std::istringstream in(lines);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto j = nlohmann::json::parse(line);
    const auto text = j.at("text").get<std::string>();
    Check(tokscan::BpeEncode(vocab, text) == j.at("tokens").get<std::vector<std::string>>(),
          "reference mismatch on '" + text + "'");
    ++n;
  }
  CheckEq(n, std::size_t{50}, "reference encodings");
}

void CounterfactualProtocol() {
  constexpr int kItems = 100;
  constexpr int kBound = 5;
  std::vector<noise::CfactItem> items;
  inference::ScriptedClient gen, val;
  std::size_t expected_queue = 0;
  for (int i = 0; i < kItems; ++i) {
    const std::string id = "gk:" + std::to_string(i + 1);
    items.push_back({id, "Question " + std::to_string(i) + "?", "Fact " + std::to_string(i) + "."});
    // Item i is rejected (i % 7) times before acceptance; 5 and 6 exhaust the bound.
    const int rejections = i % 7;
    const int attempts = std::min(rejections + 1, kBound);
    for (int a = 1; a <= attempts; ++a) {
      gen.Push("Counterfactual " + std::to_string(i) + " try " + std::to_string(a));
      val.Push(std::string(a <= rejections ? "Correct" : "Incorrect"));
    }
    expected_queue += rejections >= kBound ? kBound + 1 : rejections;
  }
  testing::TempDir dir;
  noise::ReviewQueue queue(dir / "review_queue.jsonl");
  const auto run = noise::RunCounterfactuals(items, gen, val, {kBound}, 1, queue);
  CheckEq(run.outcomes.size(), std::size_t{kItems}, "outcomes");
  for (int i = 0; i < kItems; ++i) {
    const auto& o = run.outcomes[i];
    Check(o.attempts >= 1 && o.attempts <= kBound, "attempts outside the bound");
    const bool exhausted = i % 7 >= kBound;
    Check(o.status == (exhausted ? noise::CfactStatus::kExhausted : noise::CfactStatus::kAccepted),
          "wrong status for item " + o.question_id);
  }
  CheckEq(run.accepted + run.exhausted, std::size_t{kItems}, "accepted + exhausted");
  CheckEq(run.queued, expected_queue, "queued outcomes");
  Check(gen.remaining() == 0 && val.remaining() == 0, "scripted replies left over");
  const auto back = queue.Load();
  CheckEq(back.size(), expected_queue, "queue lines");
  std::string rewritten;
  for (const auto& o : back) rewritten += noise::ReviewQueue::Serialize(o) + "\n";
  CheckEq(rewritten, ReadFile(queue.path()), "queue re-serialization");
}

// Non-gating: rebuilds from downloaded public sources described by
// $NOISEKIT_REAL_DATA_DIR/config.json.
std::string RealData() {
  const char* env = std::getenv("NOISEKIT_REAL_DATA_DIR");
  if (!env || !*env) throw Failure("skipped: NOISEKIT_REAL_DATA_DIR is not set");
  testing::TempDir out;
  std::ostringstream so, se;
  const int code = cli::Run({"--config", (fs::path(env) / "config.json").string(),
                             "--output-dir", out.path().string(), "build"},
                            so, se);
  if (code != 0) throw Failure("build failed: " + se.str());
  const auto ad = corpus::ReadManifest(corpus::ManifestPath(out / "data", "ad_train"));
  std::smatch m;
  const std::string log = so.str();
  if (!std::regex_search(log, m, std::regex("ch_train: removed (\\d+) duplicates"))) {
    throw Failure("no ch_train dedup count in build output");
  }
  const double removed = std::stod(m[1]);
  const double ad_dev = std::abs(static_cast<double>(ad.record_count) - 11265.0) / 11265.0;
  const double dup_dev = std::abs(removed - 165.0) / 165.0;
  std::ostringstream s;
  s << "ad_train " << ad.record_count << " (" << std::fixed << std::setprecision(1)
    << 100 * ad_dev << "% off), removed " << removed << " (" << 100 * dup_dev << "% off)";
  if (ad_dev > 0.05 || dup_dev > 0.15) throw Failure(s.str());
  return s.str();
}

struct Criterion {
  int id;
  std::string name;
  bool gating;
  std::function<void()> run;
};

}  // namespace
}  // namespace noisekit

int main() {
  using namespace noisekit;
  std::string real_data_note;
  const std::vector<Criterion> criteria = {
      {1, "word/char flips reproduce the printed universe rows", true, TableOneRows},
      {2, "dialogue flips and noisy rows reproduce and round-trip", true, TableSixRows},
      {3, "flip involutions over 10000 random strings", true, Involutions},
      {4, "derangements have no fixed points and are uniform for n=3", true, Derangements},
      {5, "flipped datasets double with alternating roles", true, DatasetShape},
      {6, "catalog counts and stage orders", true, CatalogCounts},
      {7, "plans embed the fine-tuning hyperparameters and round-trip", true, PlanFidelity},
      {8, "oracle scores on the 100-item fixture", true, OracleRun},
      {9, "one-word caveat metric on the retention fixture", true, RetentionCaveat},
      {10, "probe and judge prompts match golden files", true, PromptFidelity},
      {11, "char flips diverge more than word flips; encoder matches reference", true,
       TokenizationDivergence},
      {12, "scripted counterfactual run terminates and the queue round-trips", true,
       CounterfactualProtocol},
      {13, "real-data counts near 11265 records and 165 duplicates", false,
       [&] { real_data_note = RealData(); }},
  };
  int gating_failures = 0;
  for (const auto& c : criteria) {
    const auto start = Clock::now();
    std::string status = "PASS";
    std::string detail;
    try {
      c.run();
      if (c.id == 13) detail = real_data_note;
    } catch (const std::exception& e) {
      detail = e.what();
      status = c.gating ? "FAIL" : (detail.rfind("skipped", 0) == 0 ? "SKIP" : "WARN");
      if (c.gating) ++gating_failures;
    }
    std::cout << status << "  " << std::setw(2) << c.id << "  " << c.name << "  ["
              << std::fixed << std::setprecision(1) << MillisSince(start) << " ms]";
    if (!c.gating) std::cout << " (non-gating)";
    if (!detail.empty()) std::cout << "  " << detail;
    std::cout << "\n";
  }
  std::cout << (gating_failures == 0 ? "all gating criteria passed"
                                     : std::to_string(gating_failures) + " gating criteria failed")
            << "\n";
  return gating_failures == 0 ? 0 : 1;
}
