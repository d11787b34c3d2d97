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

#ifndef NOISEKIT_TOKSCAN_H_
#define NOISEKIT_TOKSCAN_H_

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace noisekit::tokscan {

enum class Alphabet {
  // Every byte maps to a printable code point first, as in GPT-2 style
  // vocabularies; the leading space becomes part of the word ("Ġword").
  kByteLevel,
  // Code points are the base symbols; the leading space is written as "▁".
  kCharacters,
};

struct BpeOptions {
  Alphabet alphabet = Alphabet::kByteLevel;
  // Mark words after the first with a leading space symbol.
  bool leading_space = true;
  // Emit "<0xNN>" tokens for base symbols missing from the vocabulary
  // instead of failing.
  bool byte_fallback = false;
};

inline constexpr std::string_view kCharSpaceMarker = "▁";

struct PairHash {
  std::size_t operator()(const std::pair<std::string, std::string>& p) const {
    return std::hash<std::string>()(p.first) * 31 ^
           std::hash<std::string>()(p.second);
  }
};

struct BpeVocab {
  std::unordered_map<std::string, long> vocab;
  std::vector<std::pair<std::string, std::string>> merges;  // index = rank
  std::unordered_map<std::pair<std::string, std::string>, std::size_t, PairHash>
      ranks;
  BpeOptions options;
};

// `vocab_json` maps token strings to unique ids. `merges_text` has one
// "left right" pair per line in rank order; an optional "#version" first
// line and blank lines are skipped. Throws ParseError naming the line for
// malformed or duplicate merges and, when the vocabulary is non-empty,
// merges whose parts or result are not in it.
BpeVocab ParseBpe(std::string_view vocab_json, std::string_view merges_text,
                  BpeOptions options = {},
                  const std::string& vocab_source = "vocab",
                  const std::string& merges_source = "merges");
BpeVocab LoadBpe(const std::filesystem::path& vocab_path,
                 const std::filesystem::path& merges_path,
                 BpeOptions options = {});

// Whitespace-delimited words, rendered in the vocabulary alphabet with the
// leading-space symbol on every word after the first.
std::vector<std::string> PreTokenize(const BpeVocab& vocab, std::string_view text);

// Lowest-rank-first pair merging within each pre-token. Throws EncodeError
// for a base symbol outside the vocabulary when byte fallback is off.
std::vector<std::string> BpeEncode(const BpeVocab& vocab, std::string_view text);

// Inverse of BpeEncode up to whitespace: yields the words joined by single
// spaces.
std::string Decode(const BpeVocab& vocab, const std::vector<std::string>& tokens);

// |A ∩ B| / |A ∪ B| over token multisets; 1.0 when both are empty.
double MultisetJaccard(const std::vector<std::string>& a,
                       const std::vector<std::string>& b);

struct Encoding {
  std::string variant;  // "original", "word_flip" or "char_flip"
  std::string text;
  std::vector<std::string> tokens;
  double overlap_with_original = 1.0;
};

struct DivergenceReport {
  std::vector<Encoding> encodings;  // original, word_flip, char_flip

  const Encoding& original() const { return encodings[0]; }
  const Encoding& word_flip() const { return encodings[1]; }
  const Encoding& char_flip() const { return encodings[2]; }
};

DivergenceReport CompareTokenizations(const BpeVocab& vocab, std::string_view text);

std::string RenderDivergenceJson(const std::vector<DivergenceReport>& reports);
// variant,text,token_count,overlap_with_original,tokens
std::string RenderDivergenceCsv(const std::vector<DivergenceReport>& reports);

}  // namespace noisekit::tokscan

#endif  // NOISEKIT_TOKSCAN_H_
