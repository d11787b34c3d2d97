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

#ifndef NOISEKIT_CLI_H_
#define NOISEKIT_CLI_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "noisekit/inference.h"

namespace noisekit::cli {

struct ClientConfig {
  std::string backend = "echo";  // http|echo|gold-oracle|flip-oracle|scripted
  std::string flip;              // flip-oracle kind; empty follows the suite
  std::string endpoint;
  std::string model;
  // Name of the environment variable holding the endpoint credential.
  std::string credential_env = "NOISEKIT_API_KEY";
  std::filesystem::path script;  // scripted backend: JSON array of replies
  double temperature = 0.0;
  int max_tokens = 512;
  int timeout_ms = 60000;
  int retries = 3;
  int backoff_ms = 1000;
};

struct SourceConfig {
  std::string name;
  std::string uri;  // local path or http(s) URL
};

struct Config {
  std::filesystem::path output_dir = "noisekit-out";
  std::uint64_t seed = 0;
  std::filesystem::path cache_dir;  // defaults to <output_dir>/cache
  std::filesystem::path cleaning_rules;  // empty: built-in rule set
  std::filesystem::path dictionary;      // empty: bundled wordlist
  std::size_t max_in_flight = 4;

  std::vector<SourceConfig> ad_sources;
  std::optional<SourceConfig> ch_source;
  std::vector<SourceConfig> ch_references;
  std::optional<SourceConfig> gk_source;

  std::filesystem::path test_set;  // empty: bundled fixture
  std::size_t shots_k = 5;
  std::string shots_mode = "fixed";  // fixed|sampled
  std::filesystem::path shot_pool;   // sampled mode: dataset of (q, a)

  ClientConfig model;
  std::string judge_similarity = "rule";
  std::string judge_grammar = "rule";
  double f1_threshold = 0.6;
  ClientConfig judge;

  std::optional<ClientConfig> generator;
  std::optional<ClientConfig> validator;
  int cfact_max_attempts = 5;

  std::filesystem::path bpe_vocab;   // empty: bundled byte-level vocabulary
  std::filesystem::path bpe_merges;
};

// Strict JSON: unknown keys and wrong types are ConfigErrors. Relative paths
// are resolved against `base_dir`.
Config ParseConfig(std::string_view json_text,
                   const std::filesystem::path& base_dir,
                   const std::string& source);
Config LoadConfig(const std::filesystem::path& path);

// Directory holding the bundled rules, wordlist, fixtures and vocabulary.
std::filesystem::path DefaultDataDir();

std::shared_ptr<inference::ModelClient> MakeClient(
    const ClientConfig& config,
    std::shared_ptr<const inference::GoldLookup> gold, NoiseKind suite_kind);

// Parses and runs one command. Returns 0 when no item-level or stage-level
// error occurred, 1 when some did, 2 on usage or fatal errors.
int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);
int Main(int argc, char** argv);

}  // namespace noisekit::cli

#endif  // NOISEKIT_CLI_H_
