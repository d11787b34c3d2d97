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

#ifndef NOISEKIT_INFERENCE_H_
#define NOISEKIT_INFERENCE_H_

#include <chrono>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "noisekit/record.h"

namespace noisekit::inference {

enum class Backend { kHttp, kEcho, kGoldOracle, kFlipOracle, kScripted };

std::string_view ToString(Backend backend);

struct ClientParams {
  double temperature = 0.0;
  int max_tokens = 512;
  std::chrono::milliseconds request_timeout{60000};
  // Total attempts per request, first try included.
  int retries = 3;
  // Delay before the second attempt; doubles on each further attempt.
  std::chrono::milliseconds initial_backoff{1000};
};

struct CompletionRequest {
  std::string request_id;
  std::string prompt;
  // Key into the gold lookup of oracle backends; defaults to request_id.
  std::string probe_id;
};

struct Completion {
  std::string request_id;
  std::string text;
  std::chrono::duration<double, std::milli> latency{0};
  int attempt_count = 1;
};

// probe id -> gold (unflipped) answer
using GoldLookup = std::map<std::string, std::string>;

class ModelClient {
 public:
  virtual ~ModelClient() = default;
  // Throws RequestError on transport exhaustion and ConfigError when the
  // backend cannot answer (missing gold, empty script).
  virtual Completion Complete(const CompletionRequest& request) = 0;
  virtual Backend backend() const = 0;
  virtual std::string label() const = 0;
  virtual const ClientParams& params() const = 0;
};

// Returns the text after the last "Question: " line, or the whole prompt
// when there is none.
std::string FinalQuestion(const std::string& prompt);

class EchoClient : public ModelClient {
 public:
  explicit EchoClient(ClientParams params = {}) : params_(params) {}
  Completion Complete(const CompletionRequest& request) override;
  Backend backend() const override { return Backend::kEcho; }
  std::string label() const override { return "echo"; }
  const ClientParams& params() const override { return params_; }

 private:
  ClientParams params_;
};

// Answers with the gold answer (kNone) or its flip (kWordFlip, kCharFlip).
class OracleClient : public ModelClient {
 public:
  OracleClient(std::shared_ptr<const GoldLookup> gold, NoiseKind flip,
               ClientParams params = {});
  Completion Complete(const CompletionRequest& request) override;
  Backend backend() const override;
  std::string label() const override;
  const ClientParams& params() const override { return params_; }

 private:
  std::shared_ptr<const GoldLookup> gold_;
  NoiseKind flip_;
  ClientParams params_;
};

// Pops queued responses in FIFO order. A queued entry may instead be an
// error message, which is thrown as a RequestError.
class ScriptedClient : public ModelClient {
 public:
  struct Failure {
    std::string message;
  };
  using Entry = std::variant<std::string, Failure>;

  explicit ScriptedClient(std::vector<Entry> script = {},
                          ClientParams params = {});
  void Push(Entry entry);
  std::size_t remaining() const;
  Completion Complete(const CompletionRequest& request) override;
  Backend backend() const override { return Backend::kScripted; }
  std::string label() const override { return "scripted"; }
  const ClientParams& params() const override { return params_; }

 private:
  mutable std::mutex mu_;
  std::deque<Entry> script_;
  ClientParams params_;
};

struct HttpConfig {
  std::string endpoint;  // full URL of the chat-completions route
  std::string model;
  std::string credential;  // sent as a bearer token when non-empty
};

// Chat-completion-style JSON over HTTP(S):
//   request  {"model", "messages": [{"role": "user", "content"}],
//             "temperature", "max_tokens"}
//   response {"choices": [{"message": {"content"}}]}
// Transport errors, timeouts, 429 and 5xx are retried with exponential
// backoff; other statuses fail immediately.
class HttpClient : public ModelClient {
 public:
  HttpClient(HttpConfig config, ClientParams params = {});
  Completion Complete(const CompletionRequest& request) override;
  Backend backend() const override { return Backend::kHttp; }
  std::string label() const override { return config_.model; }
  const ClientParams& params() const override { return params_; }

  static std::string BuildRequestBody(const HttpConfig& config,
                                      const ClientParams& params,
                                      const std::string& prompt);
  // Throws Error when the body has no first choice message content.
  static std::string ParseResponseBody(const std::string& body);

 private:
  HttpConfig config_;
  ClientParams params_;
};

// Appends one JSON line per exchange to a transcript file. Thread safe.
class Transcript {
 public:
  explicit Transcript(const std::filesystem::path& path);
  void Record(const CompletionRequest& request, const Completion* completion,
              const std::string& error);
  const std::filesystem::path& path() const { return path_; }

 private:
  std::mutex mu_;
  std::filesystem::path path_;
  std::ofstream out_;
};

// Decorator that logs every exchange of the wrapped client.
class TranscriptClient : public ModelClient {
 public:
  TranscriptClient(std::shared_ptr<ModelClient> inner,
                   std::shared_ptr<Transcript> transcript)
      : inner_(std::move(inner)), transcript_(std::move(transcript)) {}
  Completion Complete(const CompletionRequest& request) override;
  Backend backend() const override { return inner_->backend(); }
  std::string label() const override { return inner_->label(); }
  const ClientParams& params() const override { return inner_->params(); }

 private:
  std::shared_ptr<ModelClient> inner_;
  std::shared_ptr<Transcript> transcript_;
};

struct BatchResult {
  std::optional<Completion> completion;
  std::string error;  // set iff completion is empty

  bool ok() const { return completion.has_value(); }
};

// Runs every request with at most `max_in_flight` outstanding calls. Results
// are in input order; a failing item records its error and the rest proceed.
// Throws InvalidInputError if max_in_flight < 1.
std::vector<BatchResult> BatchComplete(
    ModelClient& client, const std::vector<CompletionRequest>& requests,
    std::size_t max_in_flight);

}  // namespace noisekit::inference

#endif  // NOISEKIT_INFERENCE_H_
