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

#include "noisekit/cli.h"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <utility>

#include <CLI11.hpp>
#include <json.hpp>

#include "noisekit/corpus.h"
#include "noisekit/errors.h"
#include "noisekit/eval.h"
#include "noisekit/fileio.h"
#include "noisekit/hashing.h"
#include "noisekit/net.h"
#include "noisekit/noise.h"
#include "noisekit/plans.h"
#include "noisekit/prompts.h"
#include "noisekit/text.h"
#include "noisekit/tokscan.h"

#ifndef NOISEKIT_DATA_DIR
#define NOISEKIT_DATA_DIR "data"
#endif

namespace noisekit::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

constexpr std::string_view kFigureSentence = "A powerful desktop computer.";

// ---------------------------------------------------------------------------
// Config parsing

class Reader {
 public:
  Reader(const json& obj, std::string where, const std::string& source)
      : obj_(obj), where_(std::move(where)), source_(source) {
    if (!obj_.is_object()) Fail("must be an object");
  }

  // Call once every key has been read.
  void Finish(std::initializer_list<std::string_view> allowed) const {
    for (const auto& [key, value] : obj_.items()) {
      bool known = false;
      for (auto a : allowed) known = known || key == a;
      if (!known) Fail("unknown key '" + key + "'");
    }
  }

  const json* Find(const char* key) const {
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  template <typename T>
  void Get(const char* key, T& out) const {
    const json* v = Find(key);
    if (!v) return;
    try {
      out = v->get<T>();
    } catch (const json::exception&) {
      Fail(std::string("bad value for '") + key + "'");
    }
  }

  void Path(const char* key, fs::path& out, const fs::path& base) const {
    std::string s;
    Get(key, s);
    if (Find(key)) out = s.empty() ? fs::path() : base / s;
  }

  [[noreturn]] void Fail(const std::string& what) const {
    throw ConfigError(source_ + ": " + where_ + ": " + what);
  }

  const std::string& where() const { return where_; }
  const std::string& source() const { return source_; }

 private:
  const json& obj_;
  std::string where_;
  const std::string& source_;
};

std::string ResolveUri(const std::string& uri, const fs::path& base) {
  if (net::IsHttpUrl(uri) || uri.empty()) return uri;
  return (base / uri).string();
}

ClientConfig ParseClient(const json& j, const std::string& where,
                         const fs::path& base, const std::string& source) {
  Reader r(j, where, source);
  ClientConfig c;
  r.Get("backend", c.backend);
  r.Get("flip", c.flip);
  r.Get("endpoint", c.endpoint);
  r.Get("model", c.model);
  r.Get("credential_env", c.credential_env);
  r.Path("script", c.script, base);
  r.Get("temperature", c.temperature);
  r.Get("max_tokens", c.max_tokens);
  r.Get("timeout_ms", c.timeout_ms);
  r.Get("retries", c.retries);
  r.Get("backoff_ms", c.backoff_ms);
  r.Finish({"backend", "flip", "endpoint", "model", "credential_env", "script",
            "temperature", "max_tokens", "timeout_ms", "retries", "backoff_ms"});
  return c;
}

SourceConfig ParseSource(const json& j, const std::string& where,
                         const fs::path& base, const std::string& source) {
  Reader r(j, where, source);
  SourceConfig s;
  r.Get("name", s.name);
  r.Get("uri", s.uri);
  r.Finish({"name", "uri"});
  if (s.name.empty() || s.uri.empty()) r.Fail("needs 'name' and 'uri'");
  s.uri = ResolveUri(s.uri, base);
  return s;
}

std::vector<SourceConfig> ParseSourceList(const json& j, const std::string& where,
                                          const fs::path& base,
                                          const std::string& source) {
  if (!j.is_array()) throw ConfigError(source + ": " + where + ": must be a list");
  std::vector<SourceConfig> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(ParseSource(j[i], where + "[" + std::to_string(i) + "]", base,
                              source));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Helpers shared by commands

struct Context {
  Config config;
  std::ostream& out;
  std::ostream& err;

  fs::path DataDir() const { return config.output_dir / "data"; }
  fs::path SuiteDir() const { return config.output_dir / "suites"; }
  fs::path PlanDir() const { return config.output_dir / "plans"; }
  fs::path ReportDir() const { return config.output_dir / "reports"; }
  fs::path CacheDir() const {
    return config.cache_dir.empty() ? config.output_dir / "cache"
                                    : config.cache_dir;
  }
};

std::string SafeName(std::string_view s) {
  std::string out;
  for (char c : s) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    out.push_back(ok ? c : '_');
  }
  return out;
}

// Reads a dataset with its manifest when one sits next to it.
corpus::Dataset LoadAny(const fs::path& path) {
  const auto manifest = path.parent_path() / (path.stem().string() + ".manifest");
  return fs::exists(manifest) ? corpus::ReadDataset(path)
                              : corpus::LoadRecords(path);
}

// A bare name refers to a dataset in `dir`; anything else is a path.
fs::path ResolveDataset(const std::string& ref, const fs::path& dir) {
  if (ref.find('/') == std::string::npos && fs::path(ref).extension().empty()) {
    return corpus::DataPath(dir, ref);
  }
  return ref;
}

corpus::RuleSet BuiltinRules() {
  std::vector<corpus::CleaningRule> rules;
  const auto defaults = corpus::RuleSet::Defaults(corpus::CleaningAction::kStrip);
  for (const auto& rule : defaults.rules()) {
    corpus::CleaningRule r = rule;
    const bool strip = r.kind == corpus::CleaningKind::kNonEnglishChars ||
                       r.kind == corpus::CleaningKind::kNonEnglishWords ||
                       r.kind == corpus::CleaningKind::kEmoji;
    r.action = strip ? corpus::CleaningAction::kStrip
                     : corpus::CleaningAction::kRejectRecord;
    rules.push_back(std::move(r));
  }
  return corpus::RuleSet(std::move(rules), "builtin");
}

corpus::RuleSet LoadRules(const Config& c) {
  return c.cleaning_rules.empty() ? BuiltinRules()
                                  : corpus::RuleSet::Load(c.cleaning_rules);
}

eval::Dictionary LoadDictionary(const Config& c) {
  return eval::Dictionary::Load(c.dictionary.empty()
                                    ? DefaultDataDir() / "dictionary" / "web2.txt"
                                    : c.dictionary);
}

std::vector<inference::ScriptedClient::Entry> LoadScript(const fs::path& path) {
  const std::string text = ReadFile(path);
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(path.string(), 1, e.what());
  }
  if (!doc.is_array()) throw ParseError(path.string(), 1, "script must be a list");
  std::vector<inference::ScriptedClient::Entry> out;
  for (const auto& e : doc) {
    if (e.is_string()) {
      out.emplace_back(e.get<std::string>());
    } else if (e.is_object() && e.size() == 1 && e.contains("error") &&
               e["error"].is_string()) {
      out.emplace_back(inference::ScriptedClient::Failure{e["error"].get<std::string>()});
    } else {
      throw ParseError(path.string(), 1,
                       "script entries are strings or {\"error\": message}");
    }
  }
  return out;
}

eval::JudgeConfig MakeJudge(const Config& c) {
  eval::JudgeConfig judge;
  judge.similarity = eval::ParseJudgeMode(c.judge_similarity);
  judge.grammar = eval::ParseJudgeMode(c.judge_grammar);
  judge.f1_threshold = c.f1_threshold;
  if (judge.similarity == eval::JudgeMode::kModel ||
      judge.grammar == eval::JudgeMode::kModel) {
    judge.client = MakeClient(c.judge, nullptr, NoiseKind::kNone);
  }
  return judge;
}

void WriteAndLog(Context& ctx, const fs::path& dir, const corpus::Dataset& ds) {
  const auto m = corpus::WriteDataset(dir, ds);
  ctx.out << "wrote " << corpus::DataPath(dir, ds.name).string() << " ("
          << m.record_count << " records, " << ToString(m.noise_kind) << ", "
          << m.content_hash.substr(0, 12) << ")\n";
}

// Runs `fn` as a named stage; failures are reported and counted.
template <typename Fn>
bool Stage(Context& ctx, std::string_view name, int& failures, Fn&& fn) {
  try {
    fn();
    return true;
  } catch (const std::exception& e) {
    ctx.err << "stage " << name << ": " << e.what() << "\n";
    ++failures;
    return false;
  }
}

corpus::Dataset IngestSource(Context& ctx, const SourceConfig& src,
                             const corpus::RuleSet& rules) {
  fs::path local;
  try {
    local = corpus::FetchSource(src.uri, ctx.CacheDir());
  } catch (const Error& e) {
    throw IoError(src.uri, "source '" + src.name + "' is unavailable: " + e.what());
  }
  corpus::IngestStats ingest;
  auto raw = corpus::IngestExamples(local, src.name, &ingest);
  corpus::CleanStats clean;
  auto ds = corpus::CleanDataset(raw, rules, &clean);
  ds.name = src.name;
  ds.noise_kind = NoiseKind::kNone;
  ctx.out << "source " << src.name << ": read " << ingest.read << ", skipped "
          << ingest.skipped << ", kept " << clean.kept << " after cleaning\n";
  WriteAndLog(ctx, ctx.DataDir(), ds);
  return ds;
}

std::vector<noise::CfactItem> CfactItems(const corpus::Dataset& facts) {
  std::vector<noise::CfactItem> items;
  for (const auto& r : facts.records) {
    items.push_back({r.id, eval::PromptText(r), r.output});
  }
  return items;
}

void RunCounterfactualStage(Context& ctx, const corpus::Dataset& facts,
                           const std::string& name, const fs::path& queue_path) {
  const auto& c = ctx.config;
  if (!c.generator || !c.validator) {
    throw ConfigError("counterfactual stage needs 'counterfactual.generator' "
                      "and 'counterfactual.validator' clients");
  }
  auto generator = MakeClient(*c.generator, nullptr, NoiseKind::kNone);
  auto validator = MakeClient(*c.validator, nullptr, NoiseKind::kNone);
  noise::ReviewQueue queue(queue_path);
  if (fs::exists(queue_path)) fs::remove(queue_path);
  auto run = noise::RunCounterfactuals(CfactItems(facts), *generator, *validator,
                                       {c.cfact_max_attempts}, c.max_in_flight,
                                       queue);
  auto ds = noise::CounterfactualDataset(facts, run.outcomes, name);
  ctx.out << "counterfactual: accepted " << run.accepted << ", exhausted "
          << run.exhausted << ", queued " << run.queued << " -> "
          << queue_path.string() << "\n";
  WriteAndLog(ctx, ctx.DataDir(), ds);
}

std::string FlipName(const std::string& base, NoiseKind kind) {
  std::string stem = base;
  const std::string suffix = "_train";
  if (stem.size() > suffix.size() &&
      stem.compare(stem.size() - suffix.size(), suffix.size(), suffix) == 0) {
    stem.resize(stem.size() - suffix.size());
  }
  return stem + (kind == NoiseKind::kWordFlip ? "_wflipped" : "_cflipped");
}

// ---------------------------------------------------------------------------
// Commands

int CmdBuild(Context& ctx) {
  const auto& c = ctx.config;
  if (c.ad_sources.empty()) {
    throw ConfigError("config lists no 'sources.ad_train' entries");
  }
  const auto rules = LoadRules(c);
  int failures = 0;

  std::optional<corpus::Dataset> ad_train;
  Stage(ctx, "ad_train", failures, [&] {
    std::vector<corpus::Dataset> parts;
    for (const auto& src : c.ad_sources) parts.push_back(IngestSource(ctx, src, rules));
    auto ds = corpus::Combine(parts, "ad_train");
    ds.noise_kind = NoiseKind::kNone;
    WriteAndLog(ctx, ctx.DataDir(), ds);
    ad_train = std::move(ds);
  });
  if (ad_train) {
    for (auto kind : {NoiseKind::kWordFlip, NoiseKind::kCharFlip}) {
      const auto name = FlipName(ad_train->name, kind);
      Stage(ctx, name, failures, [&] {
        WriteAndLog(ctx, ctx.DataDir(), noise::FlipDataset(*ad_train, kind, name));
      });
    }
    Stage(ctx, "irr_train", failures, [&] {
      WriteAndLog(ctx, ctx.DataDir(),
                  noise::DerangeAnswers(*ad_train, DeriveSeed(c.seed, "irr_train"),
                                        "irr_train"));
    });
  }
  if (c.ch_source) {
    Stage(ctx, "ch_train", failures, [&] {
      auto ch = IngestSource(ctx, *c.ch_source, rules);
      std::vector<corpus::Dataset> refs;
      for (const auto& src : c.ch_references) refs.push_back(IngestSource(ctx, src, rules));
      auto deduped = corpus::Dedup(ch, refs);
      deduped.dataset.name = "ch_train";
      deduped.dataset.parents = {ch.name};
      for (const auto& r : refs) deduped.dataset.parents.push_back(r.name);
      ctx.out << "ch_train: removed " << deduped.removed << " duplicates\n";
      WriteAndLog(ctx, ctx.DataDir(), deduped.dataset);
    });
  }
  if (c.gk_source) {
    std::optional<corpus::Dataset> gk;
    Stage(ctx, "gk", failures, [&] {
      auto ds = IngestSource(ctx, *c.gk_source, rules);
      ds.name = "gk";
      ds.parents = {c.gk_source->name};
      WriteAndLog(ctx, ctx.DataDir(), ds);
      gk = std::move(ds);
    });
    if (gk && c.generator && c.validator) {
      Stage(ctx, "cfact_train", failures, [&] {
        RunCounterfactualStage(ctx, *gk, "cfact_train",
                               c.output_dir / "review_queue.jsonl");
      });
    }
  }
  return failures == 0 ? 0 : 1;
}

int CmdFlip(Context& ctx, const std::string& input, const std::string& kind_name,
            std::string name) {
  const NoiseKind kind = ParseNoiseKind(kind_name);
  auto base = LoadAny(ResolveDataset(input, ctx.DataDir()));
  if (name.empty()) name = FlipName(base.name, kind);
  WriteAndLog(ctx, ctx.DataDir(), noise::FlipDataset(base, kind, name));
  return 0;
}

int CmdIrrelevant(Context& ctx, const std::string& input, const std::string& name) {
  auto base = LoadAny(ResolveDataset(input, ctx.DataDir()));
  WriteAndLog(ctx, ctx.DataDir(),
              noise::DerangeAnswers(base, DeriveSeed(ctx.config.seed, name), name));
  return 0;
}

int CmdCounterfactual(Context& ctx, const std::string& input,
                      const std::string& name, fs::path queue) {
  auto facts = LoadAny(ResolveDataset(input, ctx.DataDir()));
  if (queue.empty()) queue = ctx.config.output_dir / "review_queue.jsonl";
  int failures = 0;
  Stage(ctx, "counterfactual", failures,
        [&] { RunCounterfactualStage(ctx, facts, name, queue); });
  return failures == 0 ? 0 : 1;
}

int CmdProbes(Context& ctx) {
  const auto& c = ctx.config;
  const fs::path path = c.test_set.empty()
                            ? DefaultDataDir() / "fixtures" / "test_set_100.jsonl"
                            : c.test_set;
  auto test_set = LoadAny(path);
  prompts::SuiteConfig sc;
  sc.k = c.shots_k;
  if (c.shots_mode == "sampled") {
    sc.mode = prompts::ShotMode::kSampled;
    if (c.shot_pool.empty()) throw ConfigError("sampled shots need 'shots.pool'");
    for (const auto& r : LoadAny(c.shot_pool).records) {
      sc.pool.push_back({r.instruction, r.output});
    }
    sc.seed = DeriveSeed(c.seed, "shots");
  } else if (c.shots_mode != "fixed") {
    throw ConfigError("shots.mode must be 'fixed' or 'sampled'");
  }
  auto suites = prompts::BuildTestSuites(test_set, sc);
  for (const auto* ds : {&suites.test, &suites.wtest, &suites.ctest}) {
    WriteAndLog(ctx, ctx.SuiteDir(), *ds);
  }
  return 0;
}

int CmdPlan(Context& ctx, bool list, bool list_retention, bool all,
            const std::vector<std::string>& names, int dispatch, int complete,
            const std::string& artifact) {
  const auto catalog = plans::EnumerateCombinations();
  if (list) {
    for (const auto* p : catalog.All()) {
      ctx.out << p->name << "\t" << ToString(p->category) << "\n";
    }
  }
  if (list_retention) {
    for (const auto& r : catalog.retention) ctx.out << r.name() << "\n";
  }
  std::vector<const plans::TrainingPlan*> selected;
  if (all) selected = catalog.All();
  for (const auto& n : names) {
    const auto* p = catalog.Find(n);
    if (!p) throw ConfigError("no plan named '" + n + "' (see plan --list)");
    selected.push_back(p);
  }

  if (dispatch > 0 || complete > 0) {
    if (selected.size() != 1) {
      throw ConfigError("--dispatch/--complete need exactly one --name");
    }
    const auto path = plans::RunStatePath(ctx.PlanDir(), selected[0]->name);
    if (!fs::exists(path)) {
      throw StateError("no run state at " + path.string() + "; emit the plan first");
    }
    auto state = plans::LoadRunState(path);
    if (dispatch > 0) state = plans::Dispatch(state, static_cast<std::size_t>(dispatch - 1));
    if (complete > 0) {
      state = plans::AdvanceRun(state, static_cast<std::size_t>(complete - 1), artifact);
    }
    plans::SaveRunState(state, path);
    auto next = state.Next();
    ctx.out << selected[0]->name << ": "
            << (next ? "next stage " + std::to_string(*next + 1) : std::string("complete"))
            << "\n";
    return 0;
  }

  int failures = 0;
  const auto resolver = plans::DirectoryResolver(ctx.DataDir());
  for (const auto* p : selected) {
    Stage(ctx, p->name, failures, [&] {
      const auto path = plans::EmitPlan(*p, resolver, ctx.PlanDir());
      const auto state_path = plans::RunStatePath(ctx.PlanDir(), p->name);
      if (!fs::exists(state_path)) plans::SaveRunState(plans::NewRun(*p), state_path);
      ctx.out << "wrote " << path.string() << "\n";
    });
  }
  return failures == 0 ? 0 : 1;
}

int WriteReport(Context& ctx, const eval::EvalReport& report) {
  const auto path =
      ctx.ReportDir() / (SafeName(report.label) + "." + SafeName(report.suite) + ".json");
  WriteFileAtomic(path, eval::RenderReport(report));
  ctx.out << eval::SummaryTable({report});
  ctx.out << "wrote " << path.string() << "\n";
  if (report.errors > 0) {
    ctx.err << report.errors << " of " << report.items << " items failed\n";
    return 1;
  }
  return 0;
}

std::shared_ptr<inference::ModelClient> EvalClient(Context& ctx,
                                                   const corpus::Dataset& suite,
                                                   NoiseKind kind,
                                                   const std::string& transcript) {
  auto gold = std::make_shared<const inference::GoldLookup>(eval::GoldFor(suite));
  auto client = MakeClient(ctx.config.model, gold, kind);
  return std::make_shared<inference::TranscriptClient>(
      client, std::make_shared<inference::Transcript>(transcript));
}

int CmdEval(Context& ctx, const std::string& suite_ref, const std::string& train_ref,
            const std::string& kind_name, std::size_t n, std::string label) {
  const auto& c = ctx.config;
  if (suite_ref.empty() == train_ref.empty()) {
    throw ConfigError("eval needs exactly one of --suite or --train");
  }
  const auto dictionary = LoadDictionary(c);
  const auto judge = MakeJudge(c);
  corpus::Dataset suite;
  NoiseKind kind;
  if (!suite_ref.empty()) {
    suite = LoadAny(ResolveDataset(suite_ref, ctx.SuiteDir()));
    kind = kind_name.empty() ? suite.noise_kind : ParseNoiseKind(kind_name);
  } else {
    auto train = LoadAny(ResolveDataset(train_ref, ctx.DataDir()));
    suite = eval::ReplicationSuite(train, n, DeriveSeed(c.seed, "replication"));
    kind = suite.noise_kind;
  }
  if (label.empty()) label = c.model.backend;
  const auto transcript = (ctx.ReportDir() / "transcripts" /
                           (SafeName(label) + "." + SafeName(suite.name) + ".jsonl"))
                              .string();
  auto client = EvalClient(ctx, suite, kind, transcript);
  eval::EvalOptions opts{c.max_in_flight, label, transcript};
  return WriteReport(ctx, eval::EvaluateSuite(*client, suite, kind, judge,
                                              dictionary, opts));
}

int CmdRetention(Context& ctx, const std::string& probe_name, bool list,
                 std::string label) {
  const auto catalog = plans::EnumerateCombinations();
  if (list) {
    for (const auto& r : catalog.retention) ctx.out << r.name() << "\n";
    if (probe_name.empty()) return 0;
  }
  const plans::RetentionProbeConfig* probe = nullptr;
  for (const auto& r : catalog.retention) {
    if (r.name() == probe_name) probe = &r;
  }
  if (!probe) {
    throw ConfigError("no retention probe '" + probe_name + "' (see retention --list)");
  }
  const auto& c = ctx.config;
  const auto dictionary = LoadDictionary(c);
  const auto judge = MakeJudge(c);
  const std::string suite_name(plans::ToString(probe->suite));
  const auto suite_path = corpus::DataPath(ctx.SuiteDir(), suite_name);
  if (!fs::exists(suite_path)) {
    throw ConfigError("missing probe suite " + suite_path.string() +
                      "; run the probes command first");
  }
  auto suite = LoadAny(suite_path);
  if (label.empty()) label = probe->name();
  const auto transcript = (ctx.ReportDir() / "transcripts" /
                           (SafeName(label) + "." + suite_name + ".jsonl"))
                              .string();
  auto client = EvalClient(ctx, suite, plans::SuiteKind(probe->suite), transcript);
  eval::EvalOptions opts{c.max_in_flight, label, transcript};
  return WriteReport(ctx, eval::RetentionEval(*client, suite, *probe, judge,
                                              dictionary, opts));
}

int CmdTokscan(Context& ctx, std::vector<std::string> texts, const std::string& input,
               const std::string& alphabet, bool no_marker, bool byte_fallback) {
  const auto& c = ctx.config;
  if (!input.empty()) {
    std::istringstream lines(ReadFile(input));
    for (std::string line; std::getline(lines, line);) {
      if (!text::Trim(line).empty()) texts.push_back(line);
    }
  }
  if (texts.empty()) texts.emplace_back(kFigureSentence);
  tokscan::BpeOptions opts;
  if (alphabet == "char") {
    opts.alphabet = tokscan::Alphabet::kCharacters;
  } else if (alphabet != "byte") {
    throw ConfigError("--alphabet must be 'byte' or 'char'");
  }
  opts.leading_space = !no_marker;
  opts.byte_fallback = byte_fallback;
  const fs::path bpe_dir = DefaultDataDir() / "bpe" / "gpt2";
  const auto vocab = tokscan::LoadBpe(
      c.bpe_vocab.empty() ? bpe_dir / "vocab.json" : c.bpe_vocab,
      c.bpe_merges.empty() ? bpe_dir / "merges.txt" : c.bpe_merges, opts);

  std::vector<tokscan::DivergenceReport> reports;
  for (const auto& t : texts) {
    reports.push_back(tokscan::CompareTokenizations(vocab, t));
    const auto& r = reports.back();
    ctx.out << t << "\n";
    for (const auto& e : r.encodings) {
      char overlap[16];
      std::snprintf(overlap, sizeof overlap, "%.3f", e.overlap_with_original);
      ctx.out << "  " << e.variant << ": " << e.tokens.size()
              << " tokens, overlap " << overlap << "\n";
    }
  }
  const fs::path dir = c.output_dir / "tokscan";
  WriteFileAtomic(dir / "divergence.json", tokscan::RenderDivergenceJson(reports));
  WriteFileAtomic(dir / "divergence.csv", tokscan::RenderDivergenceCsv(reports));
  ctx.out << "wrote " << (dir / "divergence.json").string() << "\n";
  return 0;
}

int CmdReport(Context& ctx, const std::vector<std::string>& inputs, fs::path out) {
  std::vector<fs::path> files;
  auto add_dir = [&](const fs::path& dir) {
    std::vector<fs::path> found;
    for (const auto& e : fs::directory_iterator(dir)) {
      if (e.is_regular_file() && e.path().extension() == ".json") found.push_back(e.path());
    }
    std::sort(found.begin(), found.end());
    files.insert(files.end(), found.begin(), found.end());
  };
  if (inputs.empty()) {
    if (!fs::exists(ctx.ReportDir())) {
      throw ConfigError("no reports under " + ctx.ReportDir().string());
    }
    add_dir(ctx.ReportDir());
  }
  for (const auto& in : inputs) {
    fs::is_directory(in) ? add_dir(in) : files.push_back(in);
  }
  std::vector<eval::EvalReport> reports;
  for (const auto& f : files) reports.push_back(eval::ParseReport(ReadFile(f), f.string()));
  if (reports.empty()) throw ConfigError("no report files given");
  if (out.empty()) out = ctx.config.output_dir / "summary.md";
  const std::string table = eval::SummaryTable(reports);
  WriteFileAtomic(out, table);
  ctx.out << table << "wrote " << out.string() << "\n";
  int errors = 0;
  for (const auto& r : reports) errors += r.errors > 0;
  return errors == 0 ? 0 : 1;
}

}  // namespace

// ---------------------------------------------------------------------------

Config ParseConfig(std::string_view json_text, const fs::path& base_dir,
                   const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(source + ": " + e.what());
  }
  Config c;
  Reader r(doc, "config", source);
  r.Path("output_dir", c.output_dir, base_dir);
  r.Get("seed", c.seed);
  r.Path("cache_dir", c.cache_dir, base_dir);
  r.Path("cleaning_rules", c.cleaning_rules, base_dir);
  r.Path("dictionary", c.dictionary, base_dir);
  r.Get("max_in_flight", c.max_in_flight);
  r.Path("test_set", c.test_set, base_dir);

  if (const json* s = r.Find("sources")) {
    Reader sr(*s, "sources", source);
    if (const json* v = sr.Find("ad_train")) {
      c.ad_sources = ParseSourceList(*v, "sources.ad_train", base_dir, source);
    }
    if (const json* v = sr.Find("ch_train")) {
      c.ch_source = ParseSource(*v, "sources.ch_train", base_dir, source);
    }
    if (const json* v = sr.Find("ch_references")) {
      c.ch_references = ParseSourceList(*v, "sources.ch_references", base_dir, source);
    }
    if (const json* v = sr.Find("gk")) {
      c.gk_source = ParseSource(*v, "sources.gk", base_dir, source);
    }
    sr.Finish({"ad_train", "ch_train", "ch_references", "gk"});
  }
  if (const json* s = r.Find("shots")) {
    Reader sr(*s, "shots", source);
    sr.Get("k", c.shots_k);
    sr.Get("mode", c.shots_mode);
    sr.Path("pool", c.shot_pool, base_dir);
    sr.Finish({"k", "mode", "pool"});
  }
  if (const json* s = r.Find("model")) c.model = ParseClient(*s, "model", base_dir, source);
  if (const json* s = r.Find("judge")) {
    Reader jr(*s, "judge", source);
    jr.Get("similarity", c.judge_similarity);
    jr.Get("grammar", c.judge_grammar);
    jr.Get("f1_threshold", c.f1_threshold);
    if (const json* v = jr.Find("client")) {
      c.judge = ParseClient(*v, "judge.client", base_dir, source);
    }
    jr.Finish({"similarity", "grammar", "f1_threshold", "client"});
  }
  if (const json* s = r.Find("counterfactual")) {
    Reader cr(*s, "counterfactual", source);
    if (const json* v = cr.Find("generator")) {
      c.generator = ParseClient(*v, "counterfactual.generator", base_dir, source);
    }
    if (const json* v = cr.Find("validator")) {
      c.validator = ParseClient(*v, "counterfactual.validator", base_dir, source);
    }
    cr.Get("max_attempts", c.cfact_max_attempts);
    cr.Finish({"generator", "validator", "max_attempts"});
  }
  if (const json* s = r.Find("tokscan")) {
    Reader tr(*s, "tokscan", source);
    tr.Path("vocab", c.bpe_vocab, base_dir);
    tr.Path("merges", c.bpe_merges, base_dir);
    tr.Finish({"vocab", "merges"});
  }
  r.Finish({"output_dir", "seed", "cache_dir", "cleaning_rules", "dictionary",
            "max_in_flight", "test_set", "sources", "shots", "model", "judge",
            "counterfactual", "tokscan"});

  std::set<std::string> source_names;
  std::vector<const SourceConfig*> all_sources;
  for (const auto& s : c.ad_sources) all_sources.push_back(&s);
  for (const auto& s : c.ch_references) all_sources.push_back(&s);
  if (c.ch_source) all_sources.push_back(&*c.ch_source);
  if (c.gk_source) all_sources.push_back(&*c.gk_source);
  for (const auto* s : all_sources) {
    if (plans::StageNoiseKind(s->name)) {
      throw ConfigError(source + ": source name '" + s->name +
                        "' is reserved for a built dataset");
    }
    if (!source_names.insert(s->name).second) {
      throw ConfigError(source + ": source name '" + s->name + "' repeats");
    }
  }
  if (c.max_in_flight < 1) throw ConfigError(source + ": max_in_flight must be >= 1");
  if (c.cfact_max_attempts < 1) {
    throw ConfigError(source + ": counterfactual.max_attempts must be >= 1");
  }
  eval::ParseJudgeMode(c.judge_similarity);
  eval::ParseJudgeMode(c.judge_grammar);
  return c;
}

Config LoadConfig(const fs::path& path) {
  return ParseConfig(ReadFile(path), path.parent_path(), path.string());
}

fs::path DefaultDataDir() {
  if (const char* env = std::getenv("NOISEKIT_DATA_DIR"); env && *env) return env;
  return NOISEKIT_DATA_DIR;
}

std::shared_ptr<inference::ModelClient> MakeClient(
    const ClientConfig& config, std::shared_ptr<const inference::GoldLookup> gold,
    NoiseKind suite_kind) {
  inference::ClientParams params;
  params.temperature = config.temperature;
  params.max_tokens = config.max_tokens;
  params.request_timeout = std::chrono::milliseconds(config.timeout_ms);
  params.retries = config.retries;
  params.initial_backoff = std::chrono::milliseconds(config.backoff_ms);

  const auto& b = config.backend;
  if (b == "echo") return std::make_shared<inference::EchoClient>(params);
  if (b == "gold-oracle" || b == "flip-oracle") {
    if (!gold) throw ConfigError("backend '" + b + "' needs gold answers");
    NoiseKind flip = NoiseKind::kNone;
    if (b == "flip-oracle") {
      flip = config.flip.empty() ? suite_kind : ParseNoiseKind(config.flip);
      if (!IsFlip(flip)) {
        throw ConfigError("flip-oracle needs a flip kind (--flip word_flip|char_flip)");
      }
    }
    return std::make_shared<inference::OracleClient>(std::move(gold), flip, params);
  }
  if (b == "scripted") {
    if (config.script.empty()) throw ConfigError("scripted backend needs a script file");
    return std::make_shared<inference::ScriptedClient>(LoadScript(config.script), params);
  }
  if (b == "http") {
    if (config.endpoint.empty()) throw ConfigError("http backend needs an endpoint");
    inference::HttpConfig hc{config.endpoint, config.model, ""};
    if (!config.credential_env.empty()) {
      const char* cred = std::getenv(config.credential_env.c_str());
      if (!cred || !*cred) {
        throw ConfigError("environment variable " + config.credential_env +
                          " holding the endpoint credential is not set");
      }
      hc.credential = cred;
    }
    return std::make_shared<inference::HttpClient>(std::move(hc), params);
  }
  throw ConfigError("unknown backend '" + b +
                    "' (http, echo, gold-oracle, flip-oracle, scripted)");
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Noise injection, training plans and flip-aware evaluation", "noisekit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path, output_dir, backend, flip, script;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_in_flight;
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--output-dir", output_dir, "Output directory (overrides config)");
  app.add_option("--seed", seed, "Root seed (overrides config)");
  app.add_option("--max-in-flight", max_in_flight, "Concurrent model requests");

  auto* build = app.add_subcommand("build", "Build every training dataset from the configured sources");

  std::string input, kind_name, name;
  auto* flip_cmd = app.add_subcommand("flip", "Write the positive/negative flipped dataset");
  flip_cmd->add_option("--input", input, "Dataset path or name")->required();
  flip_cmd->add_option("--kind", kind_name, "word_flip or char_flip")->required();
  flip_cmd->add_option("--name", name, "Output dataset name");

  std::string irr_name = "irr_train";
  auto* irr = app.add_subcommand("irrelevant", "Pair each question with a deranged answer");
  irr->add_option("--input", input, "Dataset path or name")->required();
  irr->add_option("--name", irr_name, "Output dataset name");

  std::string cfact_name = "cfact_train", queue;
  auto* cfact = app.add_subcommand("counterfactual", "Generate validated counterfactual answers");
  cfact->add_option("--input", input, "Fact dataset path or name")->required();
  cfact->add_option("--name", cfact_name, "Output dataset name");
  cfact->add_option("--queue", queue, "Review queue file");

  std::string test_set, shots_mode;
  std::optional<std::size_t> k;
  auto* probes = app.add_subcommand("probes", "Build the test, wtest and ctest suites");
  probes->add_option("--test-set", test_set, "Test set in dataset schema");
  probes->add_option("--k", k, "Shots per probe");
  probes->add_option("--shots", shots_mode, "fixed or sampled");

  bool list = false, list_retention = false, all = false;
  std::vector<std::string> plan_names;
  int dispatch = 0, complete = 0;
  std::string artifact;
  auto* plan = app.add_subcommand("plan", "List or emit training plans and track run state");
  plan->add_flag("--list", list, "Print every plan name");
  plan->add_flag("--list-retention", list_retention, "Print retention probe names");
  plan->add_flag("--all", all, "Emit every plan");
  plan->add_option("--name", plan_names, "Plan to emit");
  plan->add_option("--dispatch", dispatch, "Mark stage N (1-based) dispatched");
  plan->add_option("--complete", complete, "Mark stage N (1-based) complete");
  plan->add_option("--artifact", artifact, "Artifact reference for --complete");

  std::string suite_ref, train_ref, label, judge_mode;
  std::size_t n = eval::kReplicationSamples;
  auto* ev = app.add_subcommand("eval", "Score a model on a suite or a training sample");
  ev->add_option("--suite", suite_ref, "Suite name (test, wtest, ctest) or path");
  ev->add_option("--train", train_ref, "Training dataset for the replication check");
  ev->add_option("--n", n, "Replication sample size");
  ev->add_option("--kind", kind_name, "Flip kind to undo (defaults to the suite's)");
  ev->add_option("--label", label, "Row label in reports");

  std::string probe_name;
  bool list_probes = false;
  auto* ret = app.add_subcommand("retention", "Run a retention probe for an unlearning plan");
  ret->add_option("--probe", probe_name, "<plan>:<wtest|ctest>");
  ret->add_flag("--list", list_probes, "Print the retention probes");
  ret->add_option("--label", label, "Row label in reports");

  for (auto* cmd : {ev, ret}) {
    cmd->add_option("--backend", backend, "Model backend (overrides config)");
    cmd->add_option("--flip", flip, "Flip kind of flip-oracle");
    cmd->add_option("--script", script, "Reply list for the scripted backend");
    cmd->add_option("--judge", judge_mode, "rule or model for both judges");
  }

  std::vector<std::string> texts;
  std::string text_file, alphabet = "byte";
  bool no_marker = false, byte_fallback = false;
  auto* tok = app.add_subcommand("tokscan", "Compare BPE tokenizations of flipped text");
  tok->add_option("--text", texts, "Sentence to analyze (repeatable)");
  tok->add_option("--input", text_file, "File with one sentence per line");
  tok->add_option("--alphabet", alphabet, "byte or char");
  tok->add_flag("--no-space-marker", no_marker, "Do not mark leading spaces");
  tok->add_flag("--byte-fallback", byte_fallback, "Emit <0xNN> for unknown symbols");

  std::vector<std::string> report_inputs;
  std::string report_out;
  auto* rep = app.add_subcommand("report", "Merge evaluation reports into one summary table");
  rep->add_option("inputs", report_inputs, "Report files or directories");
  rep->add_option("--out", report_out, "Summary file");

  std::vector<std::string> argv_store(args);
  std::reverse(argv_store.begin(), argv_store.end());
  try {
    app.parse(argv_store);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    Config config = config_path.empty() ? Config{} : LoadConfig(config_path);
    if (!output_dir.empty()) config.output_dir = output_dir;
    if (seed) config.seed = *seed;
    if (max_in_flight) {
      if (*max_in_flight < 1) throw ConfigError("--max-in-flight must be >= 1");
      config.max_in_flight = *max_in_flight;
    }
    if (!backend.empty()) config.model.backend = backend;
    if (!flip.empty()) config.model.flip = flip;
    if (!script.empty()) config.model.script = script;
    if (!judge_mode.empty()) config.judge_similarity = config.judge_grammar = judge_mode;
    if (!test_set.empty()) config.test_set = test_set;
    if (k) config.shots_k = *k;
    if (!shots_mode.empty()) config.shots_mode = shots_mode;

    Context ctx{std::move(config), out, err};
    if (*build) return CmdBuild(ctx);
    if (*flip_cmd) return CmdFlip(ctx, input, kind_name, name);
    if (*irr) return CmdIrrelevant(ctx, input, irr_name);
    if (*cfact) return CmdCounterfactual(ctx, input, cfact_name, queue);
    if (*probes) return CmdProbes(ctx);
    if (*plan) {
      return CmdPlan(ctx, list, list_retention, all, plan_names, dispatch, complete,
                     artifact);
    }
    if (*ev) return CmdEval(ctx, suite_ref, train_ref, kind_name, n, label);
    if (*ret) return CmdRetention(ctx, probe_name, list_probes, label);
    if (*tok) return CmdTokscan(ctx, texts, text_file, alphabet, no_marker, byte_fallback);
    if (*rep) return CmdReport(ctx, report_inputs, report_out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return Run(args, std::cout, std::cerr);
}

}  // namespace noisekit::cli
