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

#include "noisekit/tokscan.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <limits>
#include <set>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/fileio.h"
#include "noisekit/noise.h"
#include "noisekit/text.h"

namespace noisekit::tokscan {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Byte -> printable code point table of byte-level BPE vocabularies.
const std::array<std::string, 256>& ByteEncoder() {
  static const auto table = [] {
    std::array<std::string, 256> t;
    int extra = 0;
    for (int b = 0; b < 256; ++b) {
      const bool printable = (b >= '!' && b <= '~') || (b >= 0xA1 && b <= 0xAC) ||
                             (b >= 0xAE && b <= 0xFF);
      const char32_t cp = printable ? static_cast<char32_t>(b)
                                    : static_cast<char32_t>(256 + extra++);
      text::AppendUtf8(t[b], cp);
    }
    return t;
  }();
  return table;
}

const std::unordered_map<std::string, unsigned char>& ByteDecoder() {
  static const auto table = [] {
    std::unordered_map<std::string, unsigned char> t;
    const auto& enc = ByteEncoder();
    for (int b = 0; b < 256; ++b) t[enc[b]] = static_cast<unsigned char>(b);
    return t;
  }();
  return table;
}

std::string FallbackToken(unsigned char b) {
  char buf[8];
  std::snprintf(buf, sizeof buf, "<0x%02X>", b);
  return buf;
}

// Base symbols of one pre-token.
std::vector<std::string> Symbols(const BpeVocab& vocab, std::string_view piece) {
  std::vector<std::string> out;
  if (vocab.options.alphabet == Alphabet::kByteLevel) {
    const auto& enc = ByteEncoder();
    for (unsigned char b : piece) out.push_back(enc[b]);
    return out;
  }
  const std::string_view marker = kCharSpaceMarker;
  if (text::StartsWith(piece, marker)) {
    out.emplace_back(marker);
    piece.remove_prefix(marker.size());
  }
  for (const auto& unit : text::DecodeUtf8(piece)) out.emplace_back(unit.bytes);
  return out;
}

// Whitespace-split words carrying the raw leading-space prefix.
std::vector<std::string> RawPieces(const BpeVocab& vocab, std::string_view input) {
  std::vector<std::string> out;
  const auto words = text::SplitWhitespace(input);
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::string piece;
    if (i > 0 && vocab.options.leading_space) {
      piece = vocab.options.alphabet == Alphabet::kByteLevel
                  ? std::string(" ")
                  : std::string(kCharSpaceMarker);
    }
    out.push_back(piece + words[i]);
  }
  return out;
}

void MergeWord(const BpeVocab& vocab, std::vector<std::string>& word) {
  constexpr auto kNone = std::numeric_limits<std::size_t>::max();
  while (word.size() > 1) {
    std::size_t best = kNone;
    for (std::size_t i = 0; i + 1 < word.size(); ++i) {
      auto it = vocab.ranks.find({word[i], word[i + 1]});
      if (it != vocab.ranks.end() && it->second < best) best = it->second;
    }
    if (best == kNone) break;
    const auto& [left, right] = vocab.merges[best];
    std::vector<std::string> next;
    next.reserve(word.size());
    for (std::size_t i = 0; i < word.size();) {
      if (i + 1 < word.size() && word[i] == left && word[i + 1] == right) {
        next.push_back(left + right);
        i += 2;
      } else {
        next.push_back(std::move(word[i]));
        i += 1;
      }
    }
    word = std::move(next);
  }
}

std::string CsvField(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

}  // namespace

BpeVocab ParseBpe(std::string_view vocab_json, std::string_view merges_text,
                  BpeOptions options, const std::string& vocab_source,
                  const std::string& merges_source) {
  BpeVocab v;
  v.options = options;

  json doc;
  try {
    doc = json::parse(vocab_json);
  } catch (const json::parse_error& e) {
    throw ParseError(vocab_source, 1, e.what());
  }
  if (!doc.is_object()) throw ParseError(vocab_source, 1, "vocab is not an object");
  std::set<long> ids;
  for (const auto& [token, id] : doc.items()) {
    if (!id.is_number_integer()) {
      throw ParseError(vocab_source, 1, "id of '" + token + "' is not an integer");
    }
    const long value = id.get<long>();
    if (!ids.insert(value).second) {
      throw ParseError(vocab_source, 1, "duplicate id " + std::to_string(value));
    }
    v.vocab.emplace(token, value);
  }

  std::size_t line_no = 0;
  std::string_view rest = merges_text;
  while (!rest.empty()) {
    auto nl = rest.find('\n');
    std::string_view line = rest.substr(0, nl);
    rest = nl == std::string_view::npos ? std::string_view{} : rest.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line_no == 1 && text::StartsWith(line, "#version")) continue;
    if (text::Trim(line).empty()) continue;
    const auto parts = text::SplitWhitespace(line);
    if (parts.size() != 2) {
      throw ParseError(merges_source, line_no, "expected two symbols");
    }
    std::pair<std::string, std::string> pair{parts[0], parts[1]};
    if (!v.vocab.empty()) {
      for (const auto& sym : {pair.first, pair.second, pair.first + pair.second}) {
        if (!v.vocab.count(sym)) {
          throw ParseError(merges_source, line_no,
                           "symbol '" + sym + "' is not in the vocabulary");
        }
      }
    }
    if (!v.ranks.emplace(pair, v.merges.size()).second) {
      throw ParseError(merges_source, line_no,
                       "duplicate merge '" + pair.first + " " + pair.second + "'");
    }
    v.merges.push_back(std::move(pair));
  }
  return v;
}

BpeVocab LoadBpe(const std::filesystem::path& vocab_path,
                 const std::filesystem::path& merges_path, BpeOptions options) {
  return ParseBpe(ReadFile(vocab_path), ReadFile(merges_path), options,
                  vocab_path.string(), merges_path.string());
}

std::vector<std::string> PreTokenize(const BpeVocab& vocab, std::string_view input) {
  std::vector<std::string> out;
  for (const auto& piece : RawPieces(vocab, input)) {
    std::string mapped;
    for (const auto& sym : Symbols(vocab, piece)) mapped += sym;
    out.push_back(std::move(mapped));
  }
  return out;
}

std::vector<std::string> BpeEncode(const BpeVocab& vocab, std::string_view input) {
  std::vector<std::string> out;
  for (const auto& piece : RawPieces(vocab, input)) {
    auto symbols = Symbols(vocab, piece);
    // Symbols missing from a non-empty vocabulary never take part in merges.
    std::vector<std::vector<std::string>> runs(1);
    for (auto& sym : symbols) {
      if (vocab.vocab.empty() || vocab.vocab.count(sym)) {
        runs.back().push_back(std::move(sym));
        continue;
      }
      if (!vocab.options.byte_fallback) {
        throw EncodeError("symbol '" + sym + "' in '" + piece +
                          "' is not in the vocabulary");
      }
      runs.emplace_back();
      for (unsigned char b : sym) runs.back().push_back(FallbackToken(b));
      runs.emplace_back();
    }
    for (auto& run : runs) {
      if (run.empty()) continue;
      if (!text::StartsWith(run.front(), "<0x")) MergeWord(vocab, run);
      for (auto& tok : run) out.push_back(std::move(tok));
    }
  }
  return out;
}

std::string Decode(const BpeVocab& vocab, const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& tok : tokens) {
    if (tok.size() == 6 && text::StartsWith(tok, "<0x") && tok.back() == '>') {
      out.push_back(static_cast<char>(std::stoi(tok.substr(3, 2), nullptr, 16)));
      continue;
    }
    if (vocab.options.alphabet == Alphabet::kByteLevel) {
      const auto& dec = ByteDecoder();
      for (const auto& unit : text::DecodeUtf8(tok)) {
        auto it = dec.find(std::string(unit.bytes));
        if (it == dec.end()) {
          throw EncodeError("token '" + tok + "' is not byte-level text");
        }
        out.push_back(static_cast<char>(it->second));
      }
    } else {
      std::string_view t = tok;
      if (text::StartsWith(t, kCharSpaceMarker)) {
        out.push_back(' ');
        t.remove_prefix(kCharSpaceMarker.size());
      }
      out.append(t);
    }
  }
  return out;
}

double MultisetJaccard(const std::vector<std::string>& a,
                       const std::vector<std::string>& b) {
  if (a.empty() && b.empty()) return 1.0;
  std::map<std::string_view, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& t : a) ++counts[t].first;
  for (const auto& t : b) ++counts[t].second;
  std::size_t inter = 0, uni = 0;
  for (const auto& [tok, c] : counts) {
    inter += std::min(c.first, c.second);
    uni += std::max(c.first, c.second);
  }
  return static_cast<double>(inter) / static_cast<double>(uni);
}

DivergenceReport CompareTokenizations(const BpeVocab& vocab, std::string_view input) {
  DivergenceReport report;
  const std::pair<const char*, std::string> variants[] = {
      {"original", text::CollapseWhitespace(input)},
      {"word_flip", noise::FlipWord(input)},
      {"char_flip", noise::FlipChar(text::CollapseWhitespace(input))},
  };
  for (const auto& [name, variant] : variants) {
    Encoding e;
    e.variant = name;
    e.text = variant;
    e.tokens = BpeEncode(vocab, variant);
    report.encodings.push_back(std::move(e));
  }
  for (auto& e : report.encodings) {
    e.overlap_with_original = MultisetJaccard(report.encodings[0].tokens, e.tokens);
  }
  return report;
}

std::string RenderDivergenceJson(const std::vector<DivergenceReport>& reports) {
  ordered_json out = ordered_json::array();
  for (const auto& r : reports) {
    ordered_json entry = ordered_json::array();
    for (const auto& e : r.encodings) {
      ordered_json j;
      j["variant"] = e.variant;
      j["text"] = e.text;
      j["token_count"] = e.tokens.size();
      j["overlap_with_original"] = e.overlap_with_original;
      j["tokens"] = e.tokens;
      entry.push_back(std::move(j));
    }
    out.push_back(std::move(entry));
  }
  return out.dump(2, ' ', false, json::error_handler_t::replace) + "\n";
}

std::string RenderDivergenceCsv(const std::vector<DivergenceReport>& reports) {
  std::string out = "variant,text,token_count,overlap_with_original,tokens\n";
  for (const auto& r : reports) {
    for (const auto& e : r.encodings) {
      char overlap[32];
      std::snprintf(overlap, sizeof overlap, "%.6f", e.overlap_with_original);
      out += CsvField(e.variant) + "," + CsvField(e.text) + "," +
             std::to_string(e.tokens.size()) + "," + overlap + "," +
             CsvField(text::Join(e.tokens, " ")) + "\n";
    }
  }
  return out;
}

}  // namespace noisekit::tokscan
