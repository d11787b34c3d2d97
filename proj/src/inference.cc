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

#include "noisekit/inference.h"

#include <exception>
#include <thread>

#include <json.hpp>

#include "noisekit/errors.h"
#include "noisekit/net.h"
#include "noisekit/noise.h"
#include "noisekit/parallel.h"

namespace noisekit::inference {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

const std::string& ProbeKey(const CompletionRequest& request) {
  return request.probe_id.empty() ? request.request_id : request.probe_id;
}

bool Retryable(int status) { return status == 429 || status >= 500; }

}  // namespace

std::string_view ToString(Backend backend) {
  switch (backend) {
    case Backend::kHttp:
      return "http";
    case Backend::kEcho:
      return "echo";
    case Backend::kGoldOracle:
      return "gold-oracle";
    case Backend::kFlipOracle:
      return "flip-oracle";
    case Backend::kScripted:
      return "scripted";
  }
  return "";
}

std::string FinalQuestion(const std::string& prompt) {
  static constexpr std::string_view kMarker = "Question: ";
  std::size_t pos = std::string::npos;
  std::size_t search = 0;
  while (true) {
    const auto p = prompt.find(kMarker, search);
    if (p == std::string::npos) break;
    if (p == 0 || prompt[p - 1] == '\n') pos = p;
    search = p + 1;
  }
  if (pos == std::string::npos) return prompt;
  const auto start = pos + kMarker.size();
  const auto end = prompt.find('\n', start);
  return prompt.substr(start, end == std::string::npos ? std::string::npos
                                                       : end - start);
}

Completion EchoClient::Complete(const CompletionRequest& request) {
  return {request.request_id, FinalQuestion(request.prompt), {}, 1};
}

OracleClient::OracleClient(std::shared_ptr<const GoldLookup> gold,
                           NoiseKind flip, ClientParams params)
    : gold_(std::move(gold)), flip_(flip), params_(params) {
  if (!gold_) throw ConfigError("oracle backend needs a gold-answer lookup");
  if (flip_ != NoiseKind::kNone && !IsFlip(flip_)) {
    throw ConfigError("flip oracle needs word_flip or char_flip");
  }
}

Backend OracleClient::backend() const {
  return flip_ == NoiseKind::kNone ? Backend::kGoldOracle : Backend::kFlipOracle;
}

std::string OracleClient::label() const {
  if (flip_ == NoiseKind::kNone) return "gold-oracle";
  return "flip-oracle(" + std::string(ToString(flip_)) + ")";
}

Completion OracleClient::Complete(const CompletionRequest& request) {
  const auto it = gold_->find(ProbeKey(request));
  if (it == gold_->end()) {
    throw ConfigError("no gold answer for probe '" + ProbeKey(request) + "'");
  }
  return {request.request_id, noise::Flip(flip_, it->second), {}, 1};
}

ScriptedClient::ScriptedClient(std::vector<Entry> script, ClientParams params)
    : script_(script.begin(), script.end()), params_(params) {}

void ScriptedClient::Push(Entry entry) {
  std::lock_guard<std::mutex> lock(mu_);
  script_.push_back(std::move(entry));
}

std::size_t ScriptedClient::remaining() const {
  std::lock_guard<std::mutex> lock(mu_);
  return script_.size();
}

Completion ScriptedClient::Complete(const CompletionRequest& request) {
  Entry entry;
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (script_.empty()) {
      throw ConfigError("scripted client has no queued response for request " +
                        request.request_id);
    }
    entry = std::move(script_.front());
    script_.pop_front();
  }
  if (const auto* failure = std::get_if<Failure>(&entry)) {
    throw RequestError(request.request_id, failure->message);
  }
  return {request.request_id, std::get<std::string>(entry), {}, 1};
}

// ---------------------------------------------------------------------------

HttpClient::HttpClient(HttpConfig config, ClientParams params)
    : config_(std::move(config)), params_(params) {
  net::ParseUrl(config_.endpoint);
  if (params_.retries < 1) throw ConfigError("retries must be at least 1");
  if (params_.max_tokens < 1) throw ConfigError("max_tokens must be positive");
}

std::string HttpClient::BuildRequestBody(const HttpConfig& config,
                                         const ClientParams& params,
                                         const std::string& prompt) {
  nlohmann::ordered_json body;
  body["model"] = config.model;
  body["messages"] = nlohmann::ordered_json::array(
      {nlohmann::ordered_json{{"role", "user"}, {"content", prompt}}});
  body["temperature"] = params.temperature;
  body["max_tokens"] = params.max_tokens;
  return body.dump(-1, ' ', false, json::error_handler_t::replace);
}

std::string HttpClient::ParseResponseBody(const std::string& body) {
  try {
    const auto j = json::parse(body);
    const auto& content = j.at("choices").at(0).at("message").at("content");
    if (!content.is_string()) throw Error("message content is not a string");
    return content.get<std::string>();
  } catch (const json::exception& e) {
    throw Error(std::string("unexpected completion response: ") + e.what());
  }
}

Completion HttpClient::Complete(const CompletionRequest& request) {
  if (request.prompt.empty()) {
    throw InvalidInputError("request " + request.request_id +
                            " has an empty prompt");
  }
  net::Headers headers;
  if (!config_.credential.empty()) {
    headers.emplace_back("Authorization", "Bearer " + config_.credential);
  }
  const std::string body =
      BuildRequestBody(config_, params_, request.prompt);
  const auto start = Clock::now();
  auto backoff = params_.initial_backoff;
  std::string last_error;
  for (int attempt = 1; attempt <= params_.retries; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
    }
    try {
      const auto resp = net::PostJson(config_.endpoint, headers, body,
                                      params_.request_timeout);
      if (resp.status == 200) {
        Completion c;
        c.request_id = request.request_id;
        c.text = ParseResponseBody(resp.body);
        c.latency = Clock::now() - start;
        c.attempt_count = attempt;
        return c;
      }
      last_error = "HTTP status " + std::to_string(resp.status);
      if (!Retryable(resp.status)) break;
    } catch (const Error& e) {
      last_error = e.what();
    }
  }
  throw RequestError(request.request_id, last_error);
}

// ---------------------------------------------------------------------------

Transcript::Transcript(const std::filesystem::path& path) : path_(path) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  out_.open(path, std::ios::binary | std::ios::app);
  if (!out_) throw IoError(path.string(), "cannot open transcript");
}

void Transcript::Record(const CompletionRequest& request,
                        const Completion* completion,
                        const std::string& error) {
  nlohmann::ordered_json j;
  j["request_id"] = request.request_id;
  j["prompt"] = request.prompt;
  if (completion) {
    j["response"] = completion->text;
    j["attempts"] = completion->attempt_count;
    j["latency_ms"] = completion->latency.count();
  } else {
    j["error"] = error;
  }
  const std::string line =
      j.dump(-1, ' ', false, json::error_handler_t::replace);
  std::lock_guard<std::mutex> lock(mu_);
  out_ << line << '\n';
  out_.flush();
}

Completion TranscriptClient::Complete(const CompletionRequest& request) {
  try {
    Completion c = inner_->Complete(request);
    transcript_->Record(request, &c, "");
    return c;
  } catch (const std::exception& e) {
    transcript_->Record(request, nullptr, e.what());
    throw;
  }
}

std::vector<BatchResult> BatchComplete(
    ModelClient& client, const std::vector<CompletionRequest>& requests,
    std::size_t max_in_flight) {
  if (max_in_flight < 1) throw InvalidInputError("max_in_flight must be >= 1");
  std::vector<BatchResult> results(requests.size());
  ParallelFor(requests.size(), max_in_flight, [&](std::size_t i) {
    try {
      results[i].completion = client.Complete(requests[i]);
    } catch (const std::exception& e) {
      results[i].error = e.what();
    }
  });
  return results;
}

}  // namespace noisekit::inference
