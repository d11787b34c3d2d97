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

#ifndef NOISEKIT_FILEIO_H_
#define NOISEKIT_FILEIO_H_

#include <filesystem>
#include <string>
#include <string_view>

namespace noisekit {

// Whole-file read; throws IoError naming the path.
std::string ReadFile(const std::filesystem::path& path);

// Writes to a sibling temporary file, then renames it over `path`, so readers
// see either the old or the new content. Parent directories are created.
void WriteFileAtomic(const std::filesystem::path& path,
                     std::string_view content);

}  // namespace noisekit

#endif  // NOISEKIT_FILEIO_H_
