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

#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "noisekit/corpus.h"
#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/plans.h"
#include "examples.h"
#include "test_util.h"

namespace noisekit::plans {
namespace {

const Catalog& Cat() {
  static const Catalog catalog = EnumerateCombinations();
  return catalog;
}

std::vector<std::string> Datasets(const TrainingPlan& plan) {
  std::vector<std::string> out;
  for (const auto& s : plan.stages) out.push_back(s.dataset);
  return out;
}

void WriteManifests(const std::filesystem::path& dir, const std::vector<std::string>& names) {
  for (const auto& name : names) {
    corpus::Dataset d;
    d.name = name;
    d.noise_kind = StageNoiseKind(name).value_or(NoiseKind::kNone);
    Record r;
    r.id = name + ":1";
    r.instruction = "Q " + name;
    r.output = "A " + name;
    d.records.push_back(r);
    corpus::WriteDataset(dir, d);
  }
}

TEST(CatalogTest, RowCountsAndOrder) {
  const auto c = EnumerateCombinations();
  ASSERT_EQ(c.baseline.size(), 1u);
  EXPECT_EQ(Datasets(c.baseline[0]), std::vector<std::string>{"ad_train"});
  ASSERT_EQ(c.learning.size(), testing::kLearningRows.size());
  for (std::size_t i = 0; i < c.learning.size(); ++i) {
    EXPECT_EQ(Datasets(c.learning[i]), testing::kLearningRows[i]) << i;
    EXPECT_EQ(c.learning[i].category, Category::kLearning);
  }
  ASSERT_EQ(c.unlearning.size(), testing::kUnlearningRows.size());
  for (std::size_t i = 0; i < c.unlearning.size(); ++i) {
    EXPECT_EQ(Datasets(c.unlearning[i]), testing::kUnlearningRows[i]) << i;
  }
  ASSERT_EQ(c.retention.size(), testing::kRetentionRows.size());
  for (std::size_t i = 0; i < c.retention.size(); ++i) {
    const auto* plan = c.Find(c.retention[i].plan);
    ASSERT_NE(plan, nullptr);
    EXPECT_EQ(Datasets(*plan), testing::kRetentionRows[i].first);
    EXPECT_EQ(ToString(c.retention[i].suite), testing::kRetentionRows[i].second);
  }
  EXPECT_EQ(c.All().size(), 26u);
}

TEST(CatalogTest, UnlearningEndsNoiseFree) {
  for (const auto& plan : EnumerateCombinations().unlearning) {
    EXPECT_EQ(StageNoiseKind(plan.stages.back().dataset), NoiseKind::kNone) << plan.name;
    EXPECT_NO_THROW(ValidatePlan(plan));
  }
}

TEST(CatalogTest, NamesAreStable) {
  const auto c = EnumerateCombinations();
  EXPECT_EQ(c.baseline[0].name, "baseline.ad_train");
  EXPECT_EQ(c.learning[3].name, "learn.ad_train-ad_cflipped");
  EXPECT_EQ(c.unlearning[9].name, "unlearn.gk-cfact_train-gk");
  EXPECT_EQ(c.retention[0].name(), "unlearn.ad_train-ad_wflipped-ad_train:wtest");
  EXPECT_EQ(c.Find("learn.nothing"), nullptr);
}

TEST(CatalogTest, HyperparametersAreEmbedded) {
  for (const auto* plan : Cat().All()) {
    const auto& hp = plan->hyperparameters;
    EXPECT_EQ(hp.epochs, 5);
    EXPECT_EQ(hp.lr_schedule, "cosine");
    EXPECT_DOUBLE_EQ(hp.lr_start, 3e-6);
    EXPECT_DOUBLE_EQ(hp.weight_decay, 0.1);
    EXPECT_DOUBLE_EQ(hp.beta1, 0.9);
    EXPECT_DOUBLE_EQ(hp.beta2, 0.95);
    EXPECT_EQ(hp.warmup_steps, 100);
  }
}

TEST(ValidatePlanTest, RejectsNoisyUnlearningTail) {
  TrainingPlan plan;
  plan.name = "unlearn.bad";
  plan.category = Category::kUnlearning;
  plan.stages = {{"ad_train", ""}, {"ad_wflipped", ""}};
  EXPECT_THROW(ValidatePlan(plan), ValidationError);
  plan.stages.clear();
  EXPECT_THROW(ValidatePlan(plan), ValidationError);
}

TEST(PlanSerializationTest, RoundTripsEveryPlan) {
  for (const auto* plan : Cat().All()) {
    const auto text = RenderPlan(*plan);
    EXPECT_EQ(ParsePlan(text, "p"), *plan);
    EXPECT_EQ(RenderPlan(ParsePlan(text, "p")), text);
  }
}

TEST(PlanSerializationTest, UnknownKeyIsRejected) {
  auto text = RenderPlan(EnumerateCombinations().baseline[0]);
  text.insert(1, "\"extra\": 1, ");
  EXPECT_THROW(ParsePlan(text, "p"), ParseError);
}

TEST(EmitPlanTest, ResolvesHashesAndRoundTrips) {
  testing::TempDir dir;
  WriteManifests(dir / "data", {"ad_train", "ad_wflipped", "ch_train"});
  const auto c = EnumerateCombinations();
  const auto* plan = c.Find("unlearn.ad_train-ad_wflipped-ch_train");
  ASSERT_NE(plan, nullptr);
  const auto path = EmitPlan(*plan, DirectoryResolver(dir / "data"), dir / "plans");
  EXPECT_EQ(path, PlanPath(dir / "plans", plan->name));
  const auto parsed = ParsePlan(ReadFile(path), path.string());
  ASSERT_EQ(parsed.stages.size(), 3u);
  const auto m = corpus::ReadManifest(corpus::ManifestPath(dir / "data", "ad_wflipped"));
  EXPECT_EQ(parsed.stages[1].content_hash, m.content_hash);
  EXPECT_EQ(parsed.hyperparameters, plan->hyperparameters);
}

TEST(EmitPlanTest, MissingManifestsAreListed) {
  testing::TempDir dir;
  WriteManifests(dir / "data", {"ad_train"});
  const auto* plan = Cat().Find("learn.ad_train-ad_wflipped-ad_cflipped");
  try {
    EmitPlan(*plan, DirectoryResolver(dir / "data"), dir / "plans");
    FAIL();
  } catch (const ValidationError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("ad_wflipped.manifest"), std::string::npos);
    EXPECT_NE(what.find("ad_cflipped.manifest"), std::string::npos);
  }
  EXPECT_FALSE(std::filesystem::exists(PlanPath(dir / "plans", plan->name)));
}

TEST(RunStateTest, TransitionsInOrder) {
  const auto* plan = Cat().Find("learn.ad_train-ad_wflipped");
  auto state = NewRun(*plan, "t0");
  EXPECT_EQ(state.Next(), 0u);
  EXPECT_THROW(Dispatch(state, 1, "t1"), StateError);
  state = Dispatch(state, 0, "t1");
  EXPECT_EQ(state.stages[0].status, StageStatus::kDispatched);
  EXPECT_THROW(AdvanceRun(state, 1, "ckpt", "t2"), StateError);
  EXPECT_THROW(AdvanceRun(state, 0, "", "t2"), StateError);
  state = AdvanceRun(state, 0, "ckpt-1", "t2");
  EXPECT_EQ(state.Next(), 1u);
  state = AdvanceRun(Dispatch(state, 1, "t3"), 1, "ckpt-2", "t4");
  EXPECT_FALSE(state.Next().has_value());
  EXPECT_THROW(AdvanceRun(state, 1, "again", "t5"), StateError);
}

TEST(RunStateTest, PersistsAcrossReload) {
  testing::TempDir dir;
  const auto* plan = Cat().Find("unlearn.gk-cfact_train-gk");
  auto state = AdvanceRun(Dispatch(NewRun(*plan, "t0"), 0, "t1"), 0, "gk-ckpt", "t2");
  state = Dispatch(state, 1, "t3");
  const auto path = RunStatePath(dir.path(), plan->name);
  SaveRunState(state, path);
  const auto back = LoadRunState(path);
  EXPECT_EQ(back, state);
  EXPECT_EQ(back.Next(), 1u);
}

TEST(RunStateTest, NonMonotonicFileIsRejected) {
  RunState state;
  state.plan = "p";
  state.created_at = "t";
  state.stages = {{"a", StageStatus::kPending, "", ""}, {"b", StageStatus::kComplete, "x", ""}};
  EXPECT_THROW(ParseRunState(RenderRunState(state), "s"), ParseError);
}

}  // namespace
}  // namespace noisekit::plans
