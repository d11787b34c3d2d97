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

#ifndef NOISEKIT_PLANS_H_
#define NOISEKIT_PLANS_H_

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "noisekit/corpus.h"
#include "noisekit/record.h"

namespace noisekit::plans {

enum class Category { kBaseline, kLearning, kUnlearning };

std::string_view ToString(Category category);
Category ParseCategory(std::string_view name);

struct Hyperparameters {
  int epochs = 5;
  std::string lr_schedule = "cosine";
  double lr_start = 3e-6;
  std::string optimizer = "adamw";
  double weight_decay = 0.1;
  double beta1 = 0.9;
  double beta2 = 0.95;
  int warmup_steps = 100;
  std::string precision = "bfloat16";
  // Left to the trainer; serialized as null when unset.
  std::optional<int> batch_size;
  std::optional<int> max_seq_len;

  bool operator==(const Hyperparameters&) const = default;
};

// A stage names a dataset by manifest name; the content hash is filled in
// once the manifest has been resolved.
struct StageRef {
  std::string dataset;
  std::string content_hash;

  bool operator==(const StageRef&) const = default;
};

struct TrainingPlan {
  std::string name;
  Category category = Category::kLearning;
  std::vector<StageRef> stages;
  Hyperparameters hyperparameters;

  bool operator==(const TrainingPlan&) const = default;
};

enum class ProbeSuite { kWordTest, kCharTest };

std::string_view ToString(ProbeSuite suite);  // "wtest" / "ctest"
ProbeSuite ParseProbeSuite(std::string_view name);
NoiseKind SuiteKind(ProbeSuite suite);

struct RetentionProbeConfig {
  std::string plan;
  ProbeSuite suite = ProbeSuite::kWordTest;

  std::string name() const;  // "<plan>:<suite>"
  bool operator==(const RetentionProbeConfig&) const = default;
};

struct Catalog {
  std::vector<TrainingPlan> baseline;
  std::vector<TrainingPlan> learning;
  std::vector<TrainingPlan> unlearning;
  std::vector<RetentionProbeConfig> retention;

  std::vector<const TrainingPlan*> All() const&;
  const TrainingPlan* Find(std::string_view name) const&;
  // Pointers into a temporary catalog would dangle.
  std::vector<const TrainingPlan*> All() const&& = delete;
  const TrainingPlan* Find(std::string_view name) const&& = delete;
};

// "<category>.<stage>-<stage>-..." using the unprefixed category names
// "baseline", "learn" and "unlearn".
std::string PlanName(Category category, const std::vector<std::string>& stages);

// Noise kind of a catalog dataset name, or nullopt for names outside the
// catalog.
std::optional<NoiseKind> StageNoiseKind(std::string_view dataset);

// The fixed baseline, learning, unlearning and retention tables in row order.
Catalog EnumerateCombinations(const Hyperparameters& hyperparameters = {});

// Throws ValidationError for empty stages, bad names, or an unlearning plan
// whose final catalog dataset is noisy.
void ValidatePlan(const TrainingPlan& plan);

using ManifestResolver =
    std::function<std::optional<corpus::DatasetManifest>(const std::string&)>;

// Looks up <dir>/<name>.manifest.
ManifestResolver DirectoryResolver(std::filesystem::path dir);

// Fills every stage hash from its manifest. Throws ValidationError listing
// all unresolved names, or when an unlearning plan ends on a noisy manifest.
TrainingPlan ResolvePlan(const TrainingPlan& plan,
                         const ManifestResolver& resolver);

std::string RenderPlan(const TrainingPlan& plan);
TrainingPlan ParsePlan(std::string_view text, const std::string& source);

std::filesystem::path PlanPath(const std::filesystem::path& dir,
                               std::string_view plan_name);

// Resolves, renders and atomically writes <dir>/<name>.plan.json.
std::filesystem::path EmitPlan(const TrainingPlan& plan,
                               const ManifestResolver& resolver,
                               const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Run state

enum class StageStatus { kPending, kDispatched, kComplete };

std::string_view ToString(StageStatus status);
StageStatus ParseStageStatus(std::string_view name);

struct StageState {
  std::string dataset;
  StageStatus status = StageStatus::kPending;
  std::string artifact;
  std::string updated_at;

  bool operator==(const StageState&) const = default;
};

struct RunState {
  std::string plan;
  std::vector<StageState> stages;
  std::string created_at;

  // First stage that is not complete, or nullopt when the run is finished.
  std::optional<std::size_t> Next() const;
  bool operator==(const RunState&) const = default;
};

// ISO-8601 UTC with seconds precision.
std::string UtcNow();

RunState NewRun(const TrainingPlan& plan, std::string timestamp = UtcNow());

// Marks the next pending stage dispatched. Throws StateError otherwise.
RunState Dispatch(const RunState& state, std::size_t stage,
                  std::string timestamp = UtcNow());

// Marks `stage` complete when it is the dispatched stage or, with nothing
// dispatched, the next pending one. Throws StateError otherwise.
RunState AdvanceRun(const RunState& state, std::size_t stage,
                    std::string artifact, std::string timestamp = UtcNow());

std::string RenderRunState(const RunState& state);
RunState ParseRunState(std::string_view text, const std::string& source);

std::filesystem::path RunStatePath(const std::filesystem::path& dir,
                                   std::string_view plan_name);
void SaveRunState(const RunState& state, const std::filesystem::path& path);
RunState LoadRunState(const std::filesystem::path& path);

}  // namespace noisekit::plans

#endif  // NOISEKIT_PLANS_H_
