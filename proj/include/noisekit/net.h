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

#ifndef NOISEKIT_NET_H_
#define NOISEKIT_NET_H_

#include <chrono>
#include <string>
#include <utility>
#include <vector>

namespace noisekit::net {

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // includes query, at least "/"
};

// Throws ConfigError on anything other than an absolute http(s) URL.
Url ParseUrl(const std::string& url);
bool IsHttpUrl(const std::string& s);

struct HttpResponse {
  int status = 0;
  std::string body;
};

using Headers = std::vector<std::pair<std::string, std::string>>;

// Single attempt; throws Error on transport failure (connect, timeout, TLS).
HttpResponse Get(const std::string& url, std::chrono::milliseconds timeout);
HttpResponse PostJson(const std::string& url, const Headers& headers,
                      const std::string& body,
                      std::chrono::milliseconds timeout);

}  // namespace noisekit::net

#endif  // NOISEKIT_NET_H_
