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

#ifndef NOISEKIT_TEXT_H_
#define NOISEKIT_TEXT_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace noisekit::text {

// One decoded unit of a UTF-8 string. A well-formed sequence yields one unit
// holding its code point; every byte of a malformed sequence becomes its own
// unit with `valid == false`.
struct Utf8Unit {
  std::string_view bytes;
  char32_t code_point = 0;
  bool valid = false;
};

std::vector<Utf8Unit> DecodeUtf8(std::string_view s);
bool IsValidUtf8(std::string_view s);
void AppendUtf8(std::string& out, char32_t cp);

inline bool IsAsciiSpace(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
         c == '\v';
}

std::string Trim(std::string_view s);
// Trims and replaces every whitespace run (newlines included) with one space.
std::string CollapseWhitespace(std::string_view s);
std::string AsciiLower(std::string_view s);
std::vector<std::string> SplitWhitespace(std::string_view s);
std::string Join(const std::vector<std::string>& parts, std::string_view sep);
bool StartsWith(std::string_view s, std::string_view prefix);

}  // namespace noisekit::text

#endif  // NOISEKIT_TEXT_H_
