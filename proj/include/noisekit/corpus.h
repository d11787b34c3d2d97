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

#ifndef NOISEKIT_CORPUS_H_
#define NOISEKIT_CORPUS_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "noisekit/record.h"

namespace noisekit::corpus {

struct Dataset {
  std::string name;
  NoiseKind noise_kind = NoiseKind::kNone;
  std::vector<std::string> parents;
  std::optional<std::uint64_t> seed;
  std::vector<Record> records;
};

struct DatasetManifest {
  std::string name;
  std::size_t record_count = 0;
  NoiseKind noise_kind = NoiseKind::kNone;
  std::string content_hash;
  std::vector<std::string> parents;
  std::optional<std::uint64_t> seed;

  bool operator==(const DatasetManifest&) const = default;
};

// Digest of the whitespace-normalized (instruction, input, output) triple.
// Independent of id, source and role.
std::string CanonicalHash(const Record& record);

// Throws ValidationError when instruction or output is empty, or when ids
// repeat within the dataset.
void ValidateRecord(const Record& record);
void ValidateDataset(const Dataset& dataset);

// ---------------------------------------------------------------------------
// Cleaning

enum class CleaningKind {
  kNonEnglishChars,
  kNonEnglishWords,
  kEmoji,
  kCode,
  kUrl,
  kEquation,
  kImageRequest,
};

enum class CleaningAction { kStrip, kRejectRecord };

std::string_view ToString(CleaningKind kind);
std::string_view ToString(CleaningAction action);
CleaningKind ParseCleaningKind(std::string_view name);
CleaningAction ParseCleaningAction(std::string_view name);

struct RulePattern {
  std::string regex;
  bool ignore_case = false;
};

// Character-class kinds (non-english-chars, non-english-words, emoji) are
// matched by code point ranges; the other kinds by their regex patterns.
// An empty pattern list selects the built-in defaults for the kind.
struct CleaningRule {
  CleaningKind kind = CleaningKind::kUrl;
  CleaningAction action = CleaningAction::kStrip;
  std::vector<RulePattern> patterns;
};

struct CleanResult {
  bool rejected = false;
  std::optional<CleaningKind> rejected_by;
  std::string text;
};

class RuleSet;

class RuleSet {
 public:
  RuleSet() = default;
  // Throws ValidationError if a kind repeats or a pattern fails to compile.
  explicit RuleSet(std::vector<CleaningRule> rules, std::string version = "");

  // Parses the JSON rule file: {"version": ..., "rules": [{"kind", "action",
  // "patterns": [{"regex", "ignore_case"}]}]}.
  static RuleSet Load(const std::filesystem::path& path);
  static RuleSet Parse(std::string_view json_text, const std::string& source);
  // Every kind with its default patterns and the given action.
  static RuleSet Defaults(CleaningAction action);
  static std::vector<RulePattern> DefaultPatterns(CleaningKind kind);

  const std::vector<CleaningRule>& rules() const { return rules_; }
  const std::string& version() const { return version_; }
  bool empty() const { return rules_.empty(); }

 private:
  friend CleanResult CleanText(std::string_view text, const RuleSet& rules);
  std::vector<CleaningRule> rules_;
  std::vector<std::vector<std::regex>> compiled_;
  std::string version_;
};

// Applies rules in declared order. A strip rule that removes something also
// collapses horizontal whitespace runs and trims line ends. An empty rule set
// returns the text unchanged.
CleanResult CleanText(std::string_view text, const RuleSet& rules);

struct CleanStats {
  std::size_t input = 0;
  std::size_t kept = 0;
  std::map<CleaningKind, std::size_t> rejected_by;
  // Records whose instruction or output became empty after stripping.
  std::size_t emptied = 0;
};

// Cleans instruction, input and output of every record; a rejection in any
// field drops the record.
Dataset CleanDataset(const Dataset& dataset, const RuleSet& rules,
                     CleanStats* stats = nullptr);

// ---------------------------------------------------------------------------
// Dedup and combine

struct DedupResult {
  Dataset dataset;
  std::size_t removed = 0;
};

// Drops records whose canonical hash occurs in any reference set or earlier
// in `dataset`. Survivor order is preserved.
DedupResult Dedup(const Dataset& dataset, std::span<const Dataset> references);

// Concatenates in argument order. Each id is namespaced as "<source>:<id>"
// unless it already carries that prefix. Throws ValidationError on empty
// input or an id collision.
Dataset Combine(std::span<const Dataset> datasets, std::string name);

// ---------------------------------------------------------------------------
// Serialization

// One JSON object with keys id, instruction, input, output, role, noise,
// source_id, source in that order; no trailing newline.
std::string SerializeRecord(const Record& record);
Record ParseRecordLine(std::string_view line, const std::string& source,
                       std::size_t line_number);

std::string ContentHash(const std::vector<Record>& records);
DatasetManifest MakeManifest(const Dataset& dataset);
std::string RenderManifest(const DatasetManifest& manifest);
DatasetManifest ParseManifest(std::string_view text, const std::string& source);

std::filesystem::path DataPath(const std::filesystem::path& dir,
                               std::string_view name);
std::filesystem::path ManifestPath(const std::filesystem::path& dir,
                                   std::string_view name);

// Writes <dir>/<name>.jsonl and <dir>/<name>.manifest.
DatasetManifest WriteDataset(const std::filesystem::path& dir,
                             const Dataset& dataset);
// Reads a dataset and verifies it against its sidecar manifest. Throws
// IntegrityError on count or hash mismatch, ParseError on malformed lines.
Dataset ReadDataset(const std::filesystem::path& data_path);
// Reads records from a dataset-schema file with no manifest; the dataset is
// named after the file stem.
Dataset LoadRecords(const std::filesystem::path& data_path);
DatasetManifest ReadManifest(const std::filesystem::path& manifest_path);

// Throws ValidationError if the parent relation among `manifests` has a
// cycle.
void CheckLineage(const std::vector<DatasetManifest>& manifests);

// ---------------------------------------------------------------------------
// Ingestion

struct IngestStats {
  std::size_t read = 0;
  std::size_t skipped = 0;
};

// Reads a JSON array or JSON-lines file of instruction examples. Field
// aliases: instruction|prompt|question, input|context, output|response|answer.
// Ids are "<source>:<ordinal>" with 1-based ordinals over the input rows.
// Rows with an empty instruction or answer are skipped and counted.
Dataset IngestExamples(const std::filesystem::path& path,
                       const std::string& source, IngestStats* stats = nullptr);

// Resolves a local path or an http(s) URL to a local file. Downloads land in
// <cache_dir>/blobs/<sha256 of content>; the URL index lives in
// <cache_dir>/urls/.
std::filesystem::path FetchSource(const std::string& uri,
                                  const std::filesystem::path& cache_dir);

}  // namespace noisekit::corpus

#endif  // NOISEKIT_CORPUS_H_
