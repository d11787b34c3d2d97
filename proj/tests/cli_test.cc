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

#include <algorithm>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>
#include <json.hpp>

#include "noisekit/cli.h"
#include "noisekit/corpus.h"
#include "noisekit/errors.h"
#include "noisekit/eval.h"
#include "noisekit/fileio.h"
#include "test_util.h"

namespace noisekit::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code = 0;
  std::string out;
  std::string err;
};

Result RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  Result r;
  r.code = Run(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::size_t CountLines(const std::string& s) {
  return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n'));
}

// Writes two small instruction sources and a config pointing at them.
fs::path WriteFixtureConfig(const testing::TempDir& dir, const std::string& extra = "") {
  WriteFileAtomic(dir / "alpagasus.json", R"([
    {"instruction": "Name a primary color.", "input": "", "output": "Red is a primary color."},
    {"instruction": "What do bees make?", "input": "", "output": "Bees make honey."},
    {"instruction": "Visit the site", "input": "", "output": "See https://example.com now."}
  ])");
  WriteFileAtomic(dir / "dolly.jsonl",
                  "{\"instruction\":\"What is ice?\",\"context\":\"\",\"response\":\"Ice is frozen water.\"}\n"
                  "{\"instruction\":\"Where is Paris?\",\"context\":\"\",\"response\":\"Paris is in France.\"}\n");
  WriteFileAtomic(dir / "claude.json", R"([
    {"instruction": "What do bees make?", "output": "Bees make honey."},
    {"instruction": "Name a tree.", "output": "Oak is a tree."}
  ])");
  const std::string config = R"({
    "output_dir": "out",
    "seed": 7,
    "sources": {
      "ad_train": [{"name": "alpagasus", "uri": "alpagasus.json"},
                   {"name": "dolly", "uri": "dolly.jsonl"}],
      "ch_train": {"name": "claude", "uri": "claude.json"},
      "ch_references": [{"name": "alpagasus_ref", "uri": "alpagasus.json"}]
    })" + extra + "\n}";
  WriteFileAtomic(dir / "config.json", config);
  return dir / "config.json";
}

TEST(ConfigTest, UnknownKeyIsFatal) {
  testing::TempDir dir;
  WriteFileAtomic(dir / "c.json", R"({"output_dir": "o", "bogus": 1})");
  const auto r = RunCli({"--config", (dir / "c.json").string(), "plan", "--list"});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("bogus"), std::string::npos);
}

TEST(ConfigTest, RelativePathsFollowConfigDir) {
  const auto c = ParseConfig(R"({"output_dir": "out", "test_set": "t.jsonl",
                                 "sources": {"ad_train": [{"name": "a", "uri": "https://x.y/a.json"}]}})",
                             "/base", "c.json");
  EXPECT_EQ(c.output_dir, fs::path("/base/out"));
  EXPECT_EQ(c.test_set, fs::path("/base/t.jsonl"));
  EXPECT_EQ(c.ad_sources[0].uri, "https://x.y/a.json");
}

TEST(ConfigTest, ReservedSourceNameIsRejected) {
  EXPECT_THROW(ParseConfig(R"({"sources": {"ad_train": [{"name": "ad_train", "uri": "a"}]}})",
                           "/b", "c"),
               ConfigError);
  EXPECT_THROW(ParseConfig(R"({"sources": {"ad_train": [{"name": "a", "uri": "a"},
                                                         {"name": "a", "uri": "b"}]}})",
                           "/b", "c"),
               ConfigError);
}

TEST(CliTest, UsageErrorsExitTwo) {
  EXPECT_EQ(RunCli({}).code, 2);
  EXPECT_EQ(RunCli({"nonsense"}).code, 2);
  EXPECT_EQ(RunCli({"--help"}).code, 0);
}

TEST(CliTest, PlanListHasEveryPlan) {
  testing::TempDir dir;
  const auto r = RunCli({"--output-dir", dir.path().string(), "plan", "--list"});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(CountLines(r.out), 26u);
  const auto ret = RunCli({"--output-dir", dir.path().string(), "retention", "--list"});
  EXPECT_EQ(CountLines(ret.out), 6u);
}

TEST(CliTest, BuildDoublesFlippedAndIsReproducible) {
  testing::TempDir dir;
  const auto config = WriteFixtureConfig(dir);
  const auto first = RunCli({"--config", config.string(), "build"});
  ASSERT_EQ(first.code, 0) << first.err;
  const fs::path data = dir / "out" / "data";
  const auto ad = corpus::ReadManifest(corpus::ManifestPath(data, "ad_train"));
  EXPECT_EQ(ad.record_count, 4u);
  EXPECT_EQ(corpus::ReadManifest(corpus::ManifestPath(data, "ad_wflipped")).record_count, 8u);
  EXPECT_EQ(corpus::ReadManifest(corpus::ManifestPath(data, "ad_cflipped")).record_count, 8u);
  const auto irr = corpus::ReadManifest(corpus::ManifestPath(data, "irr_train"));
  EXPECT_EQ(irr.record_count, 4u);
  EXPECT_TRUE(irr.seed.has_value());
  const auto ch = corpus::ReadManifest(corpus::ManifestPath(data, "ch_train"));
  EXPECT_EQ(ch.record_count, 1u);
  EXPECT_NE(first.out.find("removed 1 duplicates"), std::string::npos);

  const std::vector<std::string> names = {"ad_train", "ad_wflipped", "ad_cflipped",
                                          "irr_train", "ch_train"};
  std::vector<std::string> before;
  for (const auto& name : names) before.push_back(ReadFile(corpus::DataPath(data, name)));
  const auto second = RunCli({"--config", config.string(), "build"});
  ASSERT_EQ(second.code, 0);
  for (std::size_t i = 0; i < names.size(); ++i) {
    EXPECT_EQ(ReadFile(corpus::DataPath(data, names[i])), before[i]) << names[i];
  }
  EXPECT_EQ(corpus::ReadManifest(corpus::ManifestPath(data, "ad_train")), ad);
  EXPECT_EQ(corpus::ReadManifest(corpus::ManifestPath(data, "irr_train")), irr);
}

TEST(CliTest, SeedFlagOverridesConfig) {
  testing::TempDir dir;
  const auto config = WriteFixtureConfig(dir);
  ASSERT_EQ(RunCli({"--config", config.string(), "--seed", "99", "build"}).code, 0);
  const auto irr = corpus::ReadManifest(corpus::ManifestPath(dir / "out" / "data", "irr_train"));
  ASSERT_EQ(RunCli({"--config", config.string(), "build"}).code, 0);
  const auto irr7 = corpus::ReadManifest(corpus::ManifestPath(dir / "out" / "data", "irr_train"));
  EXPECT_NE(irr.seed, irr7.seed);
}

TEST(CliTest, MissingSourceNamesIt) {
  testing::TempDir dir;
  const auto config = WriteFixtureConfig(dir);
  fs::remove(dir / "dolly.jsonl");
  const auto r = RunCli({"--config", config.string(), "build"});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("dolly"), std::string::npos);
  EXPECT_TRUE(fs::exists(corpus::ManifestPath(dir / "out" / "data", "ch_train")));
}

TEST(CliTest, FlipOracleEvalScoresFullMarks) {
  testing::TempDir dir;
  const auto out = dir.path().string();
  ASSERT_EQ(RunCli({"--output-dir", out, "probes"}).code, 0);
  const auto r = RunCli({"--output-dir", out, "eval", "--backend", "flip-oracle", "--suite", "wtest"});
  ASSERT_EQ(r.code, 0) << r.err;
  bool found = false;
  for (const auto& entry : fs::directory_iterator(dir / "reports")) {
    if (entry.path().extension() != ".json") continue;
    const auto report = eval::ParseReport(ReadFile(entry.path()), entry.path().string());
    EXPECT_EQ(report.items, 100u);
    EXPECT_DOUBLE_EQ(report.accuracy_percent, 100.0);
    found = true;
  }
  EXPECT_TRUE(found);
  EXPECT_TRUE(fs::exists(dir / "reports" / "transcripts"));
}

TEST(CliTest, PlanEmitAndRunState) {
  testing::TempDir dir;
  const auto config = WriteFixtureConfig(dir);
  ASSERT_EQ(RunCli({"--config", config.string(), "build"}).code, 0);
  const auto base = std::vector<std::string>{"--config", config.string(), "plan"};
  auto with = [&](std::vector<std::string> extra) {
    auto args = base;
    args.insert(args.end(), extra.begin(), extra.end());
    return RunCli(args);
  };
  ASSERT_EQ(with({"--name", "learn.ad_train-ad_wflipped"}).code, 0);
  EXPECT_TRUE(fs::exists(dir / "out" / "plans" / "learn.ad_train-ad_wflipped.plan.json"));
  EXPECT_EQ(with({"--name", "learn.gk"}).code, 1);
  EXPECT_EQ(with({"--name", "learn.ad_train-ad_wflipped", "--dispatch", "2"}).code, 2);
  EXPECT_EQ(with({"--name", "learn.ad_train-ad_wflipped", "--dispatch", "1"}).code, 0);
  const auto r = with({"--name", "learn.ad_train-ad_wflipped", "--complete", "1", "--artifact", "ckpt"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("next stage 2"), std::string::npos);
}

TEST(CliTest, TokscanAndReport) {
  testing::TempDir dir;
  const auto out = dir.path().string();
  const auto t = RunCli({"--output-dir", out, "tokscan", "--text", "A powerful desktop computer."});
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_TRUE(fs::exists(dir / "tokscan" / "divergence.json"));
  ASSERT_EQ(RunCli({"--output-dir", out, "probes"}).code, 0);
  ASSERT_EQ(RunCli({"--output-dir", out, "eval", "--backend", "gold-oracle", "--suite", "test"}).code, 0);
  ASSERT_EQ(RunCli({"--output-dir", out, "eval", "--backend", "gold-oracle", "--suite", "ctest"}).code, 0);
  const auto r = RunCli({"--output-dir", out, "report", (dir / "reports").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("100.00"), std::string::npos);
  EXPECT_NE(r.out.find("0.00"), std::string::npos);
  EXPECT_TRUE(fs::exists(dir / "summary.md"));
}

TEST(CliTest, ScriptedCounterfactualCommand) {
  testing::TempDir dir;
  WriteFileAtomic(dir / "gk.jsonl",
                  "{\"id\":\"gk:1\",\"instruction\":\"Q1\",\"input\":\"\",\"output\":\"F1\",\"role\":\"plain\",\"noise\":\"none\",\"source_id\":\"\",\"source\":\"gk\"}\n");
  WriteFileAtomic(dir / "gen.json", R"(["wrong one", "wrong two"])");
  WriteFileAtomic(dir / "val.json", R"(["Correct", "Incorrect"])");
  WriteFileAtomic(dir / "c.json", R"({"output_dir": "out", "counterfactual": {
      "generator": {"backend": "scripted", "script": "gen.json"},
      "validator": {"backend": "scripted", "script": "val.json"}}})");
  const auto r = RunCli({"--config", (dir / "c.json").string(), "counterfactual", "--input",
                         (dir / "gk.jsonl").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto ds = corpus::ReadDataset(corpus::DataPath(dir / "out" / "data", "cfact_train"));
  ASSERT_EQ(ds.records.size(), 1u);
  EXPECT_EQ(ds.records[0].output, "wrong two");
  EXPECT_EQ(CountLines(ReadFile(dir / "out" / "review_queue.jsonl")), 1u);
}

}  // namespace
}  // namespace noisekit::cli
