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

#include "noisekit/net.h"

#include <httplib.h>

#include <memory>

#include "noisekit/errors.h"

namespace noisekit::net {
namespace {

std::unique_ptr<httplib::Client> MakeClient(const Url& url,
                                            std::chrono::milliseconds timeout) {
  auto client = std::make_unique<httplib::Client>(
      url.scheme + "://" + url.host + ":" + std::to_string(url.port));
  const auto secs = static_cast<time_t>(timeout.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout.count() % 1000) * 1000);
  client->set_connection_timeout(secs, usecs);
  client->set_read_timeout(secs, usecs);
  client->set_write_timeout(secs, usecs);
  client->set_follow_location(true);
  return client;
}

HttpResponse Convert(const httplib::Result& result, const std::string& url) {
  if (!result) {
    throw Error(url + ": " + httplib::to_string(result.error()));
  }
  return HttpResponse{result->status, result->body};
}

}  // namespace

bool IsHttpUrl(const std::string& s) {
  return s.rfind("http://", 0) == 0 || s.rfind("https://", 0) == 0;
}

Url ParseUrl(const std::string& url) {
  Url out;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("not an absolute URL: " + url);
  }
  out.scheme = url.substr(0, scheme_end);
  if (out.scheme != "http" && out.scheme != "https") {
    throw ConfigError("unsupported URL scheme: " + url);
  }
  const auto rest = url.substr(scheme_end + 3);
  const auto slash = rest.find('/');
  const std::string authority =
      slash == std::string::npos ? rest : rest.substr(0, slash);
  out.path = slash == std::string::npos ? "/" : rest.substr(slash);
  const auto colon = authority.rfind(':');
  if (colon != std::string::npos && authority.find(']') == std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      out.port = std::stoi(authority.substr(colon + 1));
    } catch (const std::exception&) {
      throw ConfigError("bad port in URL: " + url);
    }
  } else {
    out.host = authority;
    out.port = out.scheme == "https" ? 443 : 80;
  }
  if (out.host.empty()) throw ConfigError("missing host in URL: " + url);
  return out;
}

HttpResponse Get(const std::string& url, std::chrono::milliseconds timeout) {
  const Url u = ParseUrl(url);
  auto client = MakeClient(u, timeout);
  return Convert(client->Get(u.path), url);
}

HttpResponse PostJson(const std::string& url, const Headers& headers,
                      const std::string& body,
                      std::chrono::milliseconds timeout) {
  const Url u = ParseUrl(url);
  auto client = MakeClient(u, timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return Convert(client->Post(u.path, h, body, "application/json"), url);
}

}  // namespace noisekit::net
