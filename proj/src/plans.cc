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

#include "noisekit/plans.h"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <set>
#include <utility>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"

namespace noisekit::plans {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr int kPlanFormat = 1;

struct DatasetKind {
  std::string_view name;
  NoiseKind kind;
};

constexpr DatasetKind kDatasets[] = {
    {"ad_train", NoiseKind::kNone},
    {"ad_wflipped", NoiseKind::kWordFlip},
    {"ad_cflipped", NoiseKind::kCharFlip},
    {"irr_train", NoiseKind::kIrrelevant},
    {"cfact_train", NoiseKind::kCounterfactual},
    {"gk", NoiseKind::kNone},
    {"ch_train", NoiseKind::kNone},
};

using Stages = std::vector<std::string>;

TrainingPlan MakePlan(Category category, const Stages& stages,
                      const Hyperparameters& hp) {
  TrainingPlan plan;
  plan.name = PlanName(category, stages);
  plan.category = category;
  plan.hyperparameters = hp;
  for (const auto& s : stages) plan.stages.push_back({s, ""});
  return plan;
}

// Rejects keys outside `allowed` so typos in hand-edited files surface.
void CheckKeys(const json& obj, std::initializer_list<std::string_view> allowed,
               const std::string& source, std::string_view where) {
  if (!obj.is_object()) {
    throw ParseError(source, 1, std::string(where) + " must be an object");
  }
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (auto a : allowed) known = known || key == a;
    if (!known) {
      throw ParseError(source, 1, "unknown key '" + key + "' in " +
                                      std::string(where));
    }
  }
}

template <typename T>
T Required(const json& obj, const char* key, const std::string& source) {
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

std::optional<int> OptionalInt(const json& obj, const char* key,
                               const std::string& source) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ParseError(source, 1, std::string("missing key '") + key + "'");
  }
  if (it->is_null()) return std::nullopt;
  if (!it->is_number_integer()) {
    throw ParseError(source, 1, std::string("bad value for '") + key + "'");
  }
  return it->get<int>();
}

json ParseDocument(std::string_view text, const std::string& source) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, e.what());
  }
}

void RequireFilePathSafe(std::string_view name) {
  if (name.empty()) throw ValidationError("plan name is empty");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) {
      throw ValidationError("plan name '" + std::string(name) +
                            "' may only use [A-Za-z0-9_.-]");
    }
  }
}

}  // namespace

std::string_view ToString(Category category) {
  switch (category) {
    case Category::kBaseline: return "baseline";
    case Category::kLearning: return "learning";
    case Category::kUnlearning: return "unlearning";
  }
  return "?";
}

Category ParseCategory(std::string_view name) {
  if (name == "baseline") return Category::kBaseline;
  if (name == "learning") return Category::kLearning;
  if (name == "unlearning") return Category::kUnlearning;
  throw ValidationError("unknown plan category '" + std::string(name) + "'");
}

std::string_view ToString(ProbeSuite suite) {
  return suite == ProbeSuite::kWordTest ? "wtest" : "ctest";
}

ProbeSuite ParseProbeSuite(std::string_view name) {
  if (name == "wtest") return ProbeSuite::kWordTest;
  if (name == "ctest") return ProbeSuite::kCharTest;
  throw ValidationError("unknown probe suite '" + std::string(name) +
                        "' (expected wtest or ctest)");
}

NoiseKind SuiteKind(ProbeSuite suite) {
  return suite == ProbeSuite::kWordTest ? NoiseKind::kWordFlip
                                        : NoiseKind::kCharFlip;
}

std::string RetentionProbeConfig::name() const {
  return plan + ":" + std::string(ToString(suite));
}

std::vector<const TrainingPlan*> Catalog::All() const& {
  std::vector<const TrainingPlan*> out;
  for (const auto* group : {&baseline, &learning, &unlearning}) {
    for (const auto& p : *group) out.push_back(&p);
  }
  return out;
}

const TrainingPlan* Catalog::Find(std::string_view name) const& {
  for (const auto* p : All()) {
    if (p->name == name) return p;
  }
  return nullptr;
}

std::string PlanName(Category category, const Stages& stages) {
  std::string name;
  switch (category) {
    case Category::kBaseline: name = "baseline."; break;
    case Category::kLearning: name = "learn."; break;
    case Category::kUnlearning: name = "unlearn."; break;
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (i) name.push_back('-');
    name += stages[i];
  }
  return name;
}

std::optional<NoiseKind> StageNoiseKind(std::string_view dataset) {
  for (const auto& d : kDatasets) {
    if (d.name == dataset) return d.kind;
  }
  return std::nullopt;
}

Catalog EnumerateCombinations(const Hyperparameters& hp) {
  Catalog c;
  c.baseline.push_back(MakePlan(Category::kBaseline, {"ad_train"}, hp));

  const Stages learning[] = {
      {"ad_wflipped"},
      {"ad_cflipped"},
      {"ad_train", "ad_wflipped"},
      {"ad_train", "ad_cflipped"},
      {"ad_cflipped", "ad_wflipped"},
      {"ad_wflipped", "ad_cflipped"},
      {"ad_train", "ad_wflipped", "ad_cflipped"},
      {"ad_train", "ad_cflipped", "ad_wflipped"},
      {"ad_wflipped", "ad_cflipped", "ad_train"},
      {"ad_cflipped", "ad_wflipped", "ad_train"},
      {"irr_train"},
      {"ad_train", "irr_train"},
      {"gk"},
      {"cfact_train"},
      {"gk", "cfact_train"},
  };
  for (const auto& s : learning) {
    c.learning.push_back(MakePlan(Category::kLearning, s, hp));
  }

  const Stages unlearning[] = {
      {"ad_train", "ad_wflipped", "ad_train"},
      {"ad_train", "ad_wflipped", "ch_train"},
      {"ad_train", "ad_cflipped", "ad_train"},
      {"ad_train", "ad_cflipped", "ch_train"},
      {"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"},
      {"ad_train", "ad_wflipped", "ad_cflipped", "ch_train"},
      {"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"},
      {"ad_train", "ad_cflipped", "ad_wflipped", "ch_train"},
      {"ad_train", "irr_train", "ad_train"},
      {"gk", "cfact_train", "gk"},
  };
  for (const auto& s : unlearning) {
    c.unlearning.push_back(MakePlan(Category::kUnlearning, s, hp));
  }

  const std::pair<Stages, ProbeSuite> retention[] = {
      {{"ad_train", "ad_wflipped", "ad_train"}, ProbeSuite::kWordTest},
      {{"ad_train", "ad_cflipped", "ad_train"}, ProbeSuite::kCharTest},
      {{"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"},
       ProbeSuite::kWordTest},
      {{"ad_train", "ad_wflipped", "ad_cflipped", "ad_train"},
       ProbeSuite::kCharTest},
      {{"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"},
       ProbeSuite::kCharTest},
      {{"ad_train", "ad_cflipped", "ad_wflipped", "ad_train"},
       ProbeSuite::kWordTest},
  };
  for (const auto& [stages, suite] : retention) {
    c.retention.push_back({PlanName(Category::kUnlearning, stages), suite});
  }
  return c;
}

void ValidatePlan(const TrainingPlan& plan) {
  RequireFilePathSafe(plan.name);
  if (plan.stages.empty()) {
    throw ValidationError("plan '" + plan.name + "' has no stages");
  }
  for (const auto& s : plan.stages) {
    if (s.dataset.empty()) {
      throw ValidationError("plan '" + plan.name + "' has an unnamed stage");
    }
  }
  if (plan.category == Category::kUnlearning) {
    auto kind = StageNoiseKind(plan.stages.back().dataset);
    if (kind && *kind != NoiseKind::kNone) {
      throw ValidationError("unlearning plan '" + plan.name +
                            "' must end with a noise-free dataset");
    }
  }
  const auto& hp = plan.hyperparameters;
  if (hp.epochs <= 0 || hp.lr_start <= 0 || hp.warmup_steps < 0) {
    throw ValidationError("plan '" + plan.name +
                          "' has non-positive epochs or learning rate");
  }
}

ManifestResolver DirectoryResolver(std::filesystem::path dir) {
  return [dir = std::move(dir)](const std::string& name)
             -> std::optional<corpus::DatasetManifest> {
    auto path = corpus::ManifestPath(dir, name);
    if (!std::filesystem::exists(path)) return std::nullopt;
    return corpus::ReadManifest(path);
  };
}

TrainingPlan ResolvePlan(const TrainingPlan& plan,
                         const ManifestResolver& resolver) {
  ValidatePlan(plan);
  TrainingPlan out = plan;
  std::vector<std::string> missing;
  std::optional<corpus::DatasetManifest> last;
  for (auto& stage : out.stages) {
    auto manifest = resolver(stage.dataset);
    if (!manifest) {
      if (std::find(missing.begin(), missing.end(), stage.dataset) ==
          missing.end()) {
        missing.push_back(stage.dataset);
      }
      continue;
    }
    stage.content_hash = manifest->content_hash;
    last = std::move(manifest);
  }
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) {
      if (!list.empty()) list += ", ";
      list += m + ".manifest";
    }
    throw ValidationError("plan '" + plan.name +
                          "' references unresolved datasets: " + list);
  }
  if (plan.category == Category::kUnlearning &&
      last->noise_kind != NoiseKind::kNone) {
    throw ValidationError("unlearning plan '" + plan.name +
                          "' ends on noisy dataset '" + last->name + "'");
  }
  return out;
}

std::string RenderPlan(const TrainingPlan& plan) {
  const auto& hp = plan.hyperparameters;
  ordered_json h;
  h["epochs"] = hp.epochs;
  h["lr_schedule"] = hp.lr_schedule;
  h["lr_start"] = hp.lr_start;
  h["optimizer"] = hp.optimizer;
  h["weight_decay"] = hp.weight_decay;
  h["beta1"] = hp.beta1;
  h["beta2"] = hp.beta2;
  h["warmup_steps"] = hp.warmup_steps;
  h["precision"] = hp.precision;
  h["batch_size"] = hp.batch_size ? ordered_json(*hp.batch_size) : nullptr;
  h["max_seq_len"] = hp.max_seq_len ? ordered_json(*hp.max_seq_len) : nullptr;

  ordered_json stages = ordered_json::array();
  for (const auto& s : plan.stages) {
    stages.push_back({{"dataset", s.dataset}, {"content_hash", s.content_hash}});
  }
  ordered_json j;
  j["format"] = kPlanFormat;
  j["name"] = plan.name;
  j["category"] = ToString(plan.category);
  j["stages"] = std::move(stages);
  j["hyperparameters"] = std::move(h);
  return j.dump(2) + "\n";
}

TrainingPlan ParsePlan(std::string_view text, const std::string& source) {
  const json j = ParseDocument(text, source);
  CheckKeys(j, {"format", "name", "category", "stages", "hyperparameters"},
            source, "plan");
  if (Required<int>(j, "format", source) != kPlanFormat) {
    throw ParseError(source, 1, "unsupported plan format");
  }
  TrainingPlan plan;
  plan.name = Required<std::string>(j, "name", source);
  try {
    plan.category = ParseCategory(Required<std::string>(j, "category", source));
  } catch (const ValidationError& e) {
    throw ParseError(source, 1, e.what());
  }
  const json stages = Required<json>(j, "stages", source);
  if (!stages.is_array()) throw ParseError(source, 1, "'stages' must be a list");
  for (const auto& s : stages) {
    CheckKeys(s, {"dataset", "content_hash"}, source, "stage");
    plan.stages.push_back({Required<std::string>(s, "dataset", source),
                           Required<std::string>(s, "content_hash", source)});
  }
  const json h = Required<json>(j, "hyperparameters", source);
  CheckKeys(h,
            {"epochs", "lr_schedule", "lr_start", "optimizer", "weight_decay",
             "beta1", "beta2", "warmup_steps", "precision", "batch_size",
             "max_seq_len"},
            source, "hyperparameters");
  auto& hp = plan.hyperparameters;
  hp.epochs = Required<int>(h, "epochs", source);
  hp.lr_schedule = Required<std::string>(h, "lr_schedule", source);
  hp.lr_start = Required<double>(h, "lr_start", source);
  hp.optimizer = Required<std::string>(h, "optimizer", source);
  hp.weight_decay = Required<double>(h, "weight_decay", source);
  hp.beta1 = Required<double>(h, "beta1", source);
  hp.beta2 = Required<double>(h, "beta2", source);
  hp.warmup_steps = Required<int>(h, "warmup_steps", source);
  hp.precision = Required<std::string>(h, "precision", source);
  hp.batch_size = OptionalInt(h, "batch_size", source);
  hp.max_seq_len = OptionalInt(h, "max_seq_len", source);
  try {
    ValidatePlan(plan);
  } catch (const ValidationError& e) {
    throw ParseError(source, 1, e.what());
  }
  return plan;
}

std::filesystem::path PlanPath(const std::filesystem::path& dir,
                               std::string_view plan_name) {
  return dir / (std::string(plan_name) + ".plan.json");
}

std::filesystem::path EmitPlan(const TrainingPlan& plan,
                               const ManifestResolver& resolver,
                               const std::filesystem::path& dir) {
  const TrainingPlan resolved = ResolvePlan(plan, resolver);
  auto path = PlanPath(dir, plan.name);
  WriteFileAtomic(path, RenderPlan(resolved));
  return path;
}

// ---------------------------------------------------------------------------

std::string_view ToString(StageStatus status) {
  switch (status) {
    case StageStatus::kPending: return "pending";
    case StageStatus::kDispatched: return "dispatched";
    case StageStatus::kComplete: return "complete";
  }
  return "?";
}

StageStatus ParseStageStatus(std::string_view name) {
  if (name == "pending") return StageStatus::kPending;
  if (name == "dispatched") return StageStatus::kDispatched;
  if (name == "complete") return StageStatus::kComplete;
  throw ValidationError("unknown stage status '" + std::string(name) + "'");
}

std::optional<std::size_t> RunState::Next() const {
  for (std::size_t i = 0; i < stages.size(); ++i) {
    if (stages[i].status != StageStatus::kComplete) return i;
  }
  return std::nullopt;
}

std::string UtcNow() {
  const std::time_t t =
      std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

RunState NewRun(const TrainingPlan& plan, std::string timestamp) {
  ValidatePlan(plan);
  RunState state;
  state.plan = plan.name;
  state.created_at = timestamp;
  for (const auto& s : plan.stages) {
    state.stages.push_back({s.dataset, StageStatus::kPending, "", timestamp});
  }
  return state;
}

RunState Dispatch(const RunState& state, std::size_t stage,
                  std::string timestamp) {
  auto next = state.Next();
  if (!next || *next != stage ||
      state.stages[stage].status != StageStatus::kPending) {
    throw StateError("run '" + state.plan + "': stage " +
                     std::to_string(stage + 1) +
                     " is not the next pending stage");
  }
  RunState out = state;
  out.stages[stage].status = StageStatus::kDispatched;
  out.stages[stage].updated_at = std::move(timestamp);
  return out;
}

RunState AdvanceRun(const RunState& state, std::size_t stage,
                    std::string artifact, std::string timestamp) {
  auto next = state.Next();
  if (!next || *next != stage) {
    throw StateError("run '" + state.plan + "': cannot complete stage " +
                     std::to_string(stage + 1) + (next ? ", next is stage " +
                                                             std::to_string(*next + 1)
                                                       : ", run is finished"));
  }
  if (artifact.empty()) {
    throw StateError("run '" + state.plan + "': stage " +
                     std::to_string(stage + 1) + " completed without artifact");
  }
  RunState out = state;
  out.stages[stage].status = StageStatus::kComplete;
  out.stages[stage].artifact = std::move(artifact);
  out.stages[stage].updated_at = std::move(timestamp);
  return out;
}

std::string RenderRunState(const RunState& state) {
  ordered_json stages = ordered_json::array();
  for (const auto& s : state.stages) {
    ordered_json e;
    e["dataset"] = s.dataset;
    e["status"] = ToString(s.status);
    e["artifact"] = s.artifact;
    e["updated_at"] = s.updated_at;
    stages.push_back(std::move(e));
  }
  ordered_json j;
  j["plan"] = state.plan;
  j["created_at"] = state.created_at;
  j["stages"] = std::move(stages);
  return j.dump(2) + "\n";
}

RunState ParseRunState(std::string_view text, const std::string& source) {
  const json j = ParseDocument(text, source);
  CheckKeys(j, {"plan", "created_at", "stages"}, source, "run state");
  RunState state;
  state.plan = Required<std::string>(j, "plan", source);
  state.created_at = Required<std::string>(j, "created_at", source);
  const json stages = Required<json>(j, "stages", source);
  if (!stages.is_array()) throw ParseError(source, 1, "'stages' must be a list");
  int dispatched = 0;
  bool seen_incomplete = false;
  for (const auto& s : stages) {
    CheckKeys(s, {"dataset", "status", "artifact", "updated_at"}, source,
              "stage");
    StageState st;
    st.dataset = Required<std::string>(s, "dataset", source);
    try {
      st.status = ParseStageStatus(Required<std::string>(s, "status", source));
    } catch (const ValidationError& e) {
      throw ParseError(source, 1, e.what());
    }
    st.artifact = Required<std::string>(s, "artifact", source);
    st.updated_at = Required<std::string>(s, "updated_at", source);
    if (st.status == StageStatus::kDispatched) ++dispatched;
    if (st.status == StageStatus::kComplete && seen_incomplete) {
      throw ParseError(source, 1, "complete stage follows an incomplete one");
    }
    if (st.status != StageStatus::kComplete) {
      if (seen_incomplete && st.status != StageStatus::kPending) {
        throw ParseError(source, 1, "dispatched stage is not the next stage");
      }
      seen_incomplete = true;
    }
    state.stages.push_back(std::move(st));
  }
  if (dispatched > 1) throw ParseError(source, 1, "more than one dispatched stage");
  return state;
}

std::filesystem::path RunStatePath(const std::filesystem::path& dir,
                                   std::string_view plan_name) {
  return dir / (std::string(plan_name) + ".run.json");
}

void SaveRunState(const RunState& state, const std::filesystem::path& path) {
  WriteFileAtomic(path, RenderRunState(state));
}

RunState LoadRunState(const std::filesystem::path& path) {
  return ParseRunState(ReadFile(path), path.string());
}

}  // namespace noisekit::plans
