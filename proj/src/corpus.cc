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

#include "noisekit/corpus.h"

#include <algorithm>
#include <chrono>
#include <functional>
#include <set>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/hashing.h"
#include "noisekit/net.h"
#include "noisekit/text.h"

namespace noisekit::corpus {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr const char* kRecordKeys[] = {"id",   "instruction", "input",
                                       "output", "role",      "noise",
                                       "source_id", "source"};

bool IsEmoji(char32_t cp) {
  return (cp >= 0x1F000 && cp <= 0x1FAFF) || (cp >= 0x2600 && cp <= 0x27BF) ||
         (cp >= 0x2B00 && cp <= 0x2BFF) || cp == 0xFE0F || cp == 0x200D ||
         (cp >= 0xE0020 && cp <= 0xE007F);
}

// Scripts and symbol blocks that occur in ordinary English prose.
bool IsEnglishCompatible(char32_t cp) {
  return cp < 0x250 || (cp >= 0x2000 && cp <= 0x206F) ||
         (cp >= 0x20A0 && cp <= 0x20CF) || (cp >= 0x2100 && cp <= 0x22FF);
}

bool IsNonEnglishChar(const text::Utf8Unit& u) {
  if (!u.valid) return true;
  return !IsEmoji(u.code_point) && !IsEnglishCompatible(u.code_point);
}

// A letter outside ASCII, or any non-English character.
bool MarksNonEnglishWord(const text::Utf8Unit& u) {
  if (IsNonEnglishChar(u)) return true;
  const char32_t cp = u.code_point;
  return cp >= 0xC0 && cp < 0x250 && cp != 0xD7 && cp != 0xF7;
}

bool IsCharClassKind(CleaningKind kind) {
  return kind == CleaningKind::kNonEnglishChars ||
         kind == CleaningKind::kNonEnglishWords || kind == CleaningKind::kEmoji;
}

// Collapses horizontal whitespace runs, trims every line, drops leading and
// trailing blank lines and squeezes runs of blank lines to one.
std::string TidyWhitespace(std::string_view s) {
  std::vector<std::string> lines;
  std::string current;
  auto flush = [&]() {
    std::string line;
    bool space = false;
    for (char c : current) {
      if (c == ' ' || c == '\t') {
        space = !line.empty();
        continue;
      }
      if (space) line.push_back(' ');
      space = false;
      line.push_back(c);
    }
    lines.push_back(std::move(line));
    current.clear();
  };
  for (char c : s) {
    if (c == '\n') {
      flush();
    } else {
      current.push_back(c);
    }
  }
  flush();
  std::string out;
  std::size_t blank_run = 0;
  for (const auto& line : lines) {
    if (line.empty()) {
      ++blank_run;
      continue;
    }
    if (!out.empty()) out.append(blank_run > 0 ? "\n\n" : "\n");
    blank_run = 0;
    out.append(line);
  }
  return out;
}

// Removes units or words matched by a character-class rule. Returns whether
// anything matched.
bool ApplyCharClass(CleaningKind kind, std::string& s, bool strip) {
  const auto units = text::DecodeUtf8(s);
  bool matched = false;
  std::string out;
  out.reserve(s.size());
  if (kind == CleaningKind::kNonEnglishWords) {
    std::size_t i = 0;
    while (i < units.size()) {
      const bool space =
          units[i].bytes.size() == 1 && text::IsAsciiSpace(units[i].bytes[0]);
      if (space) {
        out.append(units[i].bytes);
        ++i;
        continue;
      }
      std::size_t j = i;
      bool foreign = false;
      while (j < units.size() && !(units[j].bytes.size() == 1 &&
                                   text::IsAsciiSpace(units[j].bytes[0]))) {
        foreign = foreign || MarksNonEnglishWord(units[j]);
        ++j;
      }
      if (foreign) {
        matched = true;
      } else {
        for (std::size_t k = i; k < j; ++k) out.append(units[k].bytes);
      }
      i = j;
    }
  } else {
    for (const auto& u : units) {
      const bool hit = kind == CleaningKind::kEmoji
                           ? (u.valid && IsEmoji(u.code_point))
                           : IsNonEnglishChar(u);
      if (hit) {
        matched = true;
      } else {
        out.append(u.bytes);
      }
    }
  }
  if (strip && matched) s = std::move(out);
  return matched;
}

std::string NormalizeForHash(std::string_view s) {
  return text::CollapseWhitespace(s);
}

const std::string& RequireString(const json& obj, const char* key,
                                 const std::string& source, std::size_t line) {
  static const std::string kEmpty;
  auto it = obj.find(key);
  if (it == obj.end()) return kEmpty;
  if (!it->is_string()) {
    throw ParseError(source, line, std::string("field '") + key +
                                       "' must be a string");
  }
  return it->get_ref<const std::string&>();
}

void ValidateName(const std::string& name) {
  if (name.empty()) throw ValidationError("dataset name is empty");
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                    (c >= '0' && c <= '9') || c == '_' || c == '-' || c == '.';
    if (!ok) {
      throw ValidationError("dataset name '" + name +
                            "' may only contain [A-Za-z0-9_.-]");
    }
  }
}

std::vector<std::string> SplitLines(std::string_view content) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < content.size()) {
    auto end = content.find('\n', start);
    if (end == std::string_view::npos) end = content.size();
    lines.emplace_back(content.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

}  // namespace

// ---------------------------------------------------------------------------

std::string CanonicalHash(const Record& record) {
  std::string buf;
  for (const std::string* field :
       {&record.instruction, &record.input, &record.output}) {
    const std::string norm = NormalizeForHash(*field);
    buf.append(std::to_string(norm.size()));
    buf.push_back(':');
    buf.append(norm);
  }
  return Sha256Hex(buf);
}

void ValidateRecord(const Record& record) {
  if (text::Trim(record.instruction).empty()) {
    throw ValidationError("record '" + record.id + "' has an empty instruction");
  }
  if (record.output.empty()) {
    throw ValidationError("record '" + record.id + "' has an empty output");
  }
}

void ValidateDataset(const Dataset& dataset) {
  ValidateName(dataset.name);
  std::unordered_set<std::string> ids;
  for (const auto& r : dataset.records) {
    ValidateRecord(r);
    if (!ids.insert(r.id).second) {
      throw ValidationError("dataset '" + dataset.name + "' repeats id '" +
                            r.id + "'");
    }
  }
}

// ---------------------------------------------------------------------------
// Cleaning

std::string_view ToString(CleaningKind kind) {
  switch (kind) {
    case CleaningKind::kNonEnglishChars:
      return "non-english-chars";
    case CleaningKind::kNonEnglishWords:
      return "non-english-words";
    case CleaningKind::kEmoji:
      return "emoji";
    case CleaningKind::kCode:
      return "code";
    case CleaningKind::kUrl:
      return "url";
    case CleaningKind::kEquation:
      return "equation";
    case CleaningKind::kImageRequest:
      return "image-request";
  }
  return "";
}

std::string_view ToString(CleaningAction action) {
  return action == CleaningAction::kStrip ? "strip" : "reject-record";
}

CleaningKind ParseCleaningKind(std::string_view name) {
  for (auto kind :
       {CleaningKind::kNonEnglishChars, CleaningKind::kNonEnglishWords,
        CleaningKind::kEmoji, CleaningKind::kCode, CleaningKind::kUrl,
        CleaningKind::kEquation, CleaningKind::kImageRequest}) {
    if (ToString(kind) == name) return kind;
  }
  throw ValidationError("unknown cleaning rule kind '" + std::string(name) +
                        "'");
}

CleaningAction ParseCleaningAction(std::string_view name) {
  if (name == "strip") return CleaningAction::kStrip;
  if (name == "reject-record") return CleaningAction::kRejectRecord;
  throw ValidationError("unknown cleaning action '" + std::string(name) + "'");
}

std::vector<RulePattern> RuleSet::DefaultPatterns(CleaningKind kind) {
  switch (kind) {
    case CleaningKind::kUrl:
      return {{R"((?:https?|ftp)://[^\s<>"']+)", true},
              {R"(\bwww\.[A-Za-z0-9-]+\.[^\s<>"']+)", true}};
    case CleaningKind::kCode:
      return {
          {R"(```[\s\S]*?```)", false},
          {R"(`[^`\n]+`)", false},
          {R"(</?[A-Za-z][A-Za-z0-9]*(?:\s[^<>]*)?/?>)", false},
          {R"(#include\s*[<"])", false},
          {R"(\b(?:def|function|class)\s+[A-Za-z_]\w*\s*[(:{])", false},
          {R"(\bSELECT\b[\s\S]+?\bFROM\b)", false},
          {R"(\b(?:write|generate|create|debug|explain|fix|optimi[sz]e|convert|complete|refactor)\b[^.?!\n]{0,60}\b(?:code|script|program|function|query|snippet|regex|regular expression|css|html|json|sql|python|javascript|java|c\+\+|http request)\b)",
           true},
      };
    case CleaningKind::kEquation:
      return {
          {R"(\$\$[\s\S]+?\$\$)", false},
          {R"(\$[^$\s][^$\n]*[^$\s]\$)", false},
          {R"(\\\[[\s\S]+?\\\])", false},
          {R"(\\\([\s\S]+?\\\))", false},
          {R"(\\(?:frac|sqrt|sum|int|alpha|beta|theta|pi|cdot|times|leq|geq)\b)",
           false},
          {R"(\b\d+(?:\.\d+)?\s*[-+*/^]\s*\d+(?:\.\d+)?\s*=)", false},
          {R"(\b[A-Za-z]\s*\^\s*\d+)", false},
          {R"(\b\d*[a-z]\s*[-+*/]\s*\d+\s*=\s*-?\d+)", false},
      };
    case CleaningKind::kImageRequest:
      return {
          {R"(\b(?:generate|create|draw|make|produce|design|paint|render|sketch)\b[^.?!\n]{0,40}\b(?:image|picture|photo|photograph|drawing|illustration|painting|logo)s?\b)",
           true},
          {R"(\b(?:describe|summari[sz]e|caption|analy[sz]e)\b[^.?!\n]{0,20}\b(?:image|picture|photo|photograph)s?\b)",
           true},
      };
    case CleaningKind::kNonEnglishChars:
    case CleaningKind::kNonEnglishWords:
    case CleaningKind::kEmoji:
      return {};
  }
  return {};
}

RuleSet::RuleSet(std::vector<CleaningRule> rules, std::string version)
    : rules_(std::move(rules)), version_(std::move(version)) {
  std::set<CleaningKind> seen;
  for (auto& rule : rules_) {
    if (!seen.insert(rule.kind).second) {
      throw ValidationError("cleaning rule kind '" +
                            std::string(ToString(rule.kind)) +
                            "' appears more than once");
    }
    if (IsCharClassKind(rule.kind) && !rule.patterns.empty()) {
      throw ValidationError("cleaning rule '" +
                            std::string(ToString(rule.kind)) +
                            "' is matched by code point class and takes no "
                            "patterns");
    }
    if (rule.patterns.empty()) rule.patterns = DefaultPatterns(rule.kind);
    std::vector<std::regex> compiled;
    for (const auto& p : rule.patterns) {
      auto flags = std::regex::ECMAScript | std::regex::optimize;
      if (p.ignore_case) flags |= std::regex::icase;
      try {
        compiled.emplace_back(p.regex, flags);
      } catch (const std::regex_error& e) {
        throw ValidationError("cleaning rule '" +
                              std::string(ToString(rule.kind)) +
                              "': bad pattern '" + p.regex + "': " + e.what());
      }
    }
    compiled_.push_back(std::move(compiled));
  }
}

RuleSet RuleSet::Parse(std::string_view json_text, const std::string& source) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(source, 1, e.what());
  }
  if (!doc.is_object()) throw ValidationError(source + ": expected an object");
  std::string version;
  std::vector<CleaningRule> rules;
  for (const auto& [key, value] : doc.items()) {
    if (key == "version") {
      version = value.is_string() ? value.get<std::string>() : value.dump();
    } else if (key == "rules") {
      if (!value.is_array()) throw ValidationError(source + ": 'rules' must be an array");
      for (const auto& r : value) {
        CleaningRule rule;
        for (const auto& [rk, rv] : r.items()) {
          if (rk == "kind") {
            rule.kind = ParseCleaningKind(rv.get<std::string>());
          } else if (rk == "action") {
            rule.action = ParseCleaningAction(rv.get<std::string>());
          } else if (rk == "patterns") {
            for (const auto& p : rv) {
              RulePattern pat;
              for (const auto& [pk, pv] : p.items()) {
                if (pk == "regex") {
                  pat.regex = pv.get<std::string>();
                } else if (pk == "ignore_case") {
                  pat.ignore_case = pv.get<bool>();
                } else {
                  throw ValidationError(source + ": unknown pattern key '" +
                                        pk + "'");
                }
              }
              rule.patterns.push_back(std::move(pat));
            }
          } else if (rk != "comment") {
            throw ValidationError(source + ": unknown rule key '" + rk + "'");
          }
        }
        if (!r.contains("kind") || !r.contains("action")) {
          throw ValidationError(source + ": rule needs 'kind' and 'action'");
        }
        rules.push_back(std::move(rule));
      }
    } else if (key != "comment") {
      throw ValidationError(source + ": unknown key '" + key + "'");
    }
  }
  return RuleSet(std::move(rules), std::move(version));
}

RuleSet RuleSet::Load(const std::filesystem::path& path) {
  return Parse(ReadFile(path), path.string());
}

RuleSet RuleSet::Defaults(CleaningAction action) {
  std::vector<CleaningRule> rules;
  for (auto kind :
       {CleaningKind::kNonEnglishChars, CleaningKind::kNonEnglishWords,
        CleaningKind::kEmoji, CleaningKind::kCode, CleaningKind::kUrl,
        CleaningKind::kEquation, CleaningKind::kImageRequest}) {
    rules.push_back({kind, action, {}});
  }
  return RuleSet(std::move(rules), "builtin");
}

CleanResult CleanText(std::string_view input, const RuleSet& rules) {
  CleanResult result;
  result.text = std::string(input);
  for (std::size_t i = 0; i < rules.rules_.size(); ++i) {
    const auto& rule = rules.rules_[i];
    const bool strip = rule.action == CleaningAction::kStrip;
    bool matched = false;
    if (IsCharClassKind(rule.kind)) {
      matched = ApplyCharClass(rule.kind, result.text, strip);
    } else {
      for (const auto& re : rules.compiled_[i]) {
        if (!std::regex_search(result.text, re)) continue;
        matched = true;
        if (!strip) break;
        result.text = std::regex_replace(result.text, re, "");
      }
    }
    if (!matched) continue;
    if (!strip) {
      result.rejected = true;
      result.rejected_by = rule.kind;
      return result;
    }
    result.text = TidyWhitespace(result.text);
  }
  return result;
}

Dataset CleanDataset(const Dataset& dataset, const RuleSet& rules,
                     CleanStats* stats) {
  Dataset out = dataset;
  out.records.clear();
  CleanStats local;
  local.input = dataset.records.size();
  for (const auto& r : dataset.records) {
    Record cleaned = r;
    bool dropped = false;
    for (std::string* field :
         {&cleaned.instruction, &cleaned.input, &cleaned.output}) {
      CleanResult res = CleanText(*field, rules);
      if (res.rejected) {
        ++local.rejected_by[*res.rejected_by];
        dropped = true;
        break;
      }
      *field = std::move(res.text);
    }
    if (dropped) continue;
    if (text::Trim(cleaned.instruction).empty() || cleaned.output.empty()) {
      ++local.emptied;
      continue;
    }
    out.records.push_back(std::move(cleaned));
  }
  local.kept = out.records.size();
  if (stats) *stats = local;
  return out;
}

// ---------------------------------------------------------------------------
// Dedup and combine

DedupResult Dedup(const Dataset& dataset, std::span<const Dataset> references) {
  std::unordered_set<std::string> seen;
  for (const auto& ref : references) {
    for (const auto& r : ref.records) seen.insert(CanonicalHash(r));
  }
  DedupResult result;
  result.dataset = dataset;
  result.dataset.records.clear();
  for (const auto& r : dataset.records) {
    if (seen.insert(CanonicalHash(r)).second) {
      result.dataset.records.push_back(r);
    }
  }
  result.removed = dataset.records.size() - result.dataset.records.size();
  return result;
}

Dataset Combine(std::span<const Dataset> datasets, std::string name) {
  if (datasets.empty()) throw ValidationError("combine needs at least one dataset");
  Dataset out;
  out.name = std::move(name);
  out.noise_kind = datasets.front().noise_kind;
  std::unordered_set<std::string> ids;
  for (const auto& d : datasets) {
    if (d.noise_kind != out.noise_kind) out.noise_kind = NoiseKind::kNone;
    out.parents.push_back(d.name);
    for (Record r : d.records) {
      if (r.source.empty()) r.source = d.name;
      const std::string prefix = r.source + ":";
      if (!text::StartsWith(r.id, prefix)) r.id = prefix + r.id;
      if (!ids.insert(r.id).second) {
        throw ValidationError("combine: id collision on '" + r.id + "'");
      }
      out.records.push_back(std::move(r));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string SerializeRecord(const Record& r) {
  ordered_json j;
  j["id"] = r.id;
  j["instruction"] = r.instruction;
  j["input"] = r.input;
  j["output"] = r.output;
  j["role"] = std::string(ToString(r.role));
  j["noise"] = std::string(ToString(r.noise));
  j["source_id"] = r.source_id;
  j["source"] = r.source;
  try {
    return j.dump(-1, ' ', false, json::error_handler_t::strict);
  } catch (const json::type_error& e) {
    throw ValidationError("record '" + r.id + "' is not valid UTF-8");
  }
}

Record ParseRecordLine(std::string_view line, const std::string& source,
                       std::size_t line_number) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(source, line_number, "malformed record: " +
                                              std::string(e.what()));
  }
  if (!j.is_object()) throw ParseError(source, line_number, "record is not an object");
  for (const auto& [key, _] : j.items()) {
    if (std::find_if(std::begin(kRecordKeys), std::end(kRecordKeys),
                     [&](const char* k) { return key == k; }) ==
        std::end(kRecordKeys)) {
      throw ParseError(source, line_number, "unknown field '" + key + "'");
    }
  }
  Record r;
  r.id = RequireString(j, "id", source, line_number);
  r.instruction = RequireString(j, "instruction", source, line_number);
  r.input = RequireString(j, "input", source, line_number);
  r.output = RequireString(j, "output", source, line_number);
  r.source_id = RequireString(j, "source_id", source, line_number);
  r.source = RequireString(j, "source", source, line_number);
  try {
    const auto& role = RequireString(j, "role", source, line_number);
    r.role = role.empty() ? Role::kPlain : ParseRole(role);
    const auto& noise = RequireString(j, "noise", source, line_number);
    r.noise = noise.empty() ? NoiseKind::kNone : ParseNoiseKind(noise);
  } catch (const ValidationError& e) {
    throw ParseError(source, line_number, e.what());
  }
  if (r.id.empty()) throw ParseError(source, line_number, "record has no id");
  return r;
}

std::string ContentHash(const std::vector<Record>& records) {
  std::string buf;
  for (const auto& r : records) {
    buf.append(SerializeRecord(r));
    buf.push_back('\n');
  }
  return Sha256Hex(buf);
}

DatasetManifest MakeManifest(const Dataset& dataset) {
  DatasetManifest m;
  m.name = dataset.name;
  m.record_count = dataset.records.size();
  m.noise_kind = dataset.noise_kind;
  m.content_hash = ContentHash(dataset.records);
  m.parents = dataset.parents;
  m.seed = dataset.seed;
  return m;
}

std::string RenderManifest(const DatasetManifest& m) {
  std::ostringstream out;
  out << "name=" << m.name << "\n";
  out << "record_count=" << m.record_count << "\n";
  out << "noise_kind=" << ToString(m.noise_kind) << "\n";
  out << "content_hash=" << m.content_hash << "\n";
  out << "parents=" << text::Join(m.parents, ",") << "\n";
  out << "seed=" << (m.seed ? std::to_string(*m.seed) : "") << "\n";
  return out.str();
}

DatasetManifest ParseManifest(std::string_view content,
                              const std::string& source) {
  DatasetManifest m;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  for (const auto& line : SplitLines(content)) {
    ++line_no;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source, line_no, "expected key=value");
    }
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (!seen.insert(key).second) {
      throw ParseError(source, line_no, "duplicate key '" + key + "'");
    }
    try {
      if (key == "name") {
        m.name = value;
      } else if (key == "record_count") {
        std::size_t pos = 0;
        m.record_count = std::stoull(value, &pos);
        if (pos != value.size()) throw std::invalid_argument("trailing");
      } else if (key == "noise_kind") {
        m.noise_kind = ParseNoiseKind(value);
      } else if (key == "content_hash") {
        m.content_hash = value;
      } else if (key == "parents") {
        std::string cur;
        for (char c : value) {
          if (c == ',') {
            m.parents.push_back(cur);
            cur.clear();
          } else {
            cur.push_back(c);
          }
        }
        if (!value.empty()) m.parents.push_back(cur);
      } else if (key == "seed") {
        if (!value.empty()) {
          std::size_t pos = 0;
          m.seed = std::stoull(value, &pos);
          if (pos != value.size()) throw std::invalid_argument("trailing");
        }
      } else {
        throw ParseError(source, line_no, "unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, line_no, "bad value for '" + key + "'");
    }
  }
  for (const char* key : {"name", "record_count", "noise_kind", "content_hash"}) {
    if (!seen.count(key)) {
      throw ParseError(source, line_no, std::string("missing key '") + key + "'");
    }
  }
  return m;
}

std::filesystem::path DataPath(const std::filesystem::path& dir,
                               std::string_view name) {
  return dir / (std::string(name) + ".jsonl");
}

std::filesystem::path ManifestPath(const std::filesystem::path& dir,
                                   std::string_view name) {
  return dir / (std::string(name) + ".manifest");
}

DatasetManifest WriteDataset(const std::filesystem::path& dir,
                             const Dataset& dataset) {
  ValidateDataset(dataset);
  std::string content;
  for (const auto& r : dataset.records) {
    content.append(SerializeRecord(r));
    content.push_back('\n');
  }
  DatasetManifest m = MakeManifest(dataset);
  WriteFileAtomic(DataPath(dir, dataset.name), content);
  WriteFileAtomic(ManifestPath(dir, dataset.name), RenderManifest(m));
  return m;
}

Dataset LoadRecords(const std::filesystem::path& data_path) {
  const std::string content = ReadFile(data_path);
  Dataset d;
  d.name = data_path.stem().string();
  std::size_t line_no = 0;
  for (const auto& line : SplitLines(content)) {
    ++line_no;
    d.records.push_back(ParseRecordLine(line, data_path.string(), line_no));
  }
  return d;
}

DatasetManifest ReadManifest(const std::filesystem::path& manifest_path) {
  return ParseManifest(ReadFile(manifest_path), manifest_path.string());
}

Dataset ReadDataset(const std::filesystem::path& data_path) {
  std::filesystem::path manifest_path = data_path;
  manifest_path.replace_extension(".manifest");
  const DatasetManifest m = ReadManifest(manifest_path);
  Dataset d = LoadRecords(data_path);
  if (d.records.size() != m.record_count) {
    throw IntegrityError(data_path.string() + ": manifest declares " +
                         std::to_string(m.record_count) + " records, file has " +
                         std::to_string(d.records.size()));
  }
  const std::string hash = ContentHash(d.records);
  if (hash != m.content_hash) {
    throw IntegrityError(data_path.string() + ": content hash " + hash +
                         " does not match manifest " + m.content_hash);
  }
  d.name = m.name;
  d.noise_kind = m.noise_kind;
  d.parents = m.parents;
  d.seed = m.seed;
  return d;
}

void CheckLineage(const std::vector<DatasetManifest>& manifests) {
  std::unordered_map<std::string, const DatasetManifest*> by_name;
  for (const auto& m : manifests) by_name[m.name] = &m;
  // 0 = unvisited, 1 = on stack, 2 = done
  std::unordered_map<std::string, int> state;
  std::function<void(const std::string&)> visit = [&](const std::string& n) {
    int& s = state[n];
    if (s == 2) return;
    if (s == 1) throw ValidationError("dataset lineage has a cycle through '" + n + "'");
    s = 1;
    auto it = by_name.find(n);
    if (it != by_name.end()) {
      for (const auto& p : it->second->parents) visit(p);
    }
    state[n] = 2;
  };
  for (const auto& m : manifests) visit(m.name);
}

// ---------------------------------------------------------------------------
// Ingestion

Dataset IngestExamples(const std::filesystem::path& path,
                       const std::string& source, IngestStats* stats) {
  const std::string content = ReadFile(path);
  std::vector<json> rows;
  const auto first = content.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && content[first] == '[') {
    try {
      rows = json::parse(content).get<std::vector<json>>();
    } catch (const json::exception& e) {
      throw ParseError(path.string(), 1, e.what());
    }
  } else {
    std::size_t line_no = 0;
    for (const auto& line : SplitLines(content)) {
      ++line_no;
      if (text::Trim(line).empty()) continue;
      try {
        rows.push_back(json::parse(line));
      } catch (const json::parse_error& e) {
        throw ParseError(path.string(), line_no, e.what());
      }
    }
  }
  auto field = [](const json& row, std::initializer_list<const char*> names) {
    for (const auto& [key, value] : row.items()) {
      const std::string lower = text::AsciiLower(key);
      for (const char* n : names) {
        if (lower == n && value.is_string()) return value.get<std::string>();
      }
    }
    return std::string();
  };
  Dataset d;
  d.name = source;
  IngestStats local;
  std::size_t ordinal = 0;
  for (const auto& row : rows) {
    ++ordinal;
    ++local.read;
    if (!row.is_object()) {
      ++local.skipped;
      continue;
    }
    Record r;
    r.id = source + ":" + std::to_string(ordinal);
    r.instruction = field(row, {"instruction", "prompt", "question"});
    r.input = field(row, {"input", "context"});
    r.output = field(row, {"output", "response", "answer"});
    r.source = source;
    if (text::Trim(r.instruction).empty() || text::Trim(r.output).empty()) {
      ++local.skipped;
      continue;
    }
    d.records.push_back(std::move(r));
  }
  if (stats) *stats = local;
  return d;
}

std::filesystem::path FetchSource(const std::string& uri,
                                  const std::filesystem::path& cache_dir) {
  if (!net::IsHttpUrl(uri)) {
    std::filesystem::path p(uri);
    if (!std::filesystem::exists(p)) throw IoError(uri, "no such file");
    return p;
  }
  const auto index = cache_dir / "urls" / Sha256Hex(uri);
  if (std::filesystem::exists(index)) {
    const std::string hash = text::Trim(ReadFile(index));
    const auto blob = cache_dir / "blobs" / hash;
    if (std::filesystem::exists(blob) && Sha256Hex(ReadFile(blob)) == hash) {
      return blob;
    }
  }
  net::HttpResponse resp;
  try {
    resp = net::Get(uri, std::chrono::minutes(5));
  } catch (const Error& e) {
    throw IoError(uri, e.what());
  }
  if (resp.status != 200) {
    throw IoError(uri, "HTTP status " + std::to_string(resp.status));
  }
  const std::string hash = Sha256Hex(resp.body);
  const auto blob = cache_dir / "blobs" / hash;
  WriteFileAtomic(blob, resp.body);
  WriteFileAtomic(index, hash + "\n");
  return blob;
}

}  // namespace noisekit::corpus
