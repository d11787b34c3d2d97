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

#ifndef NOISEKIT_ERRORS_H_
#define NOISEKIT_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>

namespace noisekit {

// Root of every error thrown by the library. Item-level failures inside
// batch operations are captured as values instead of propagating.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public Error {
 public:
  IoError(const std::string& path, const std::string& what)
      : Error(path + ": " + what), path_(path) {}
  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& source, std::size_t line,
             const std::string& what)
      : Error(source + ":" + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class IntegrityError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class StateError : public Error {
 public:
  using Error::Error;
};

class InvalidInputError : public Error {
 public:
  using Error::Error;
};

class EncodeError : public Error {
 public:
  using Error::Error;
};

// Transport or timeout exhaustion for one model request.
class RequestError : public Error {
 public:
  RequestError(const std::string& request_id, const std::string& what)
      : Error("request " + request_id + ": " + what),
        request_id_(request_id) {}
  const std::string& request_id() const { return request_id_; }

 private:
  std::string request_id_;
};

// A pipeline stage failed; `stage` names the stage, `item` the failing item
// when there is one.
class StageError : public Error {
 public:
  StageError(const std::string& stage, const std::string& item,
             const std::string& what)
      : Error(stage + (item.empty() ? "" : " [" + item + "]") + ": " + what),
        stage_(stage),
        item_(item) {}
  const std::string& stage() const { return stage_; }
  const std::string& item() const { return item_; }

 private:
  std::string stage_;
  std::string item_;
};

}  // namespace noisekit

#endif  // NOISEKIT_ERRORS_H_
