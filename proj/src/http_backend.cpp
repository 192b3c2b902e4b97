// Copyright 2026 The remixd Authors.
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


#include "remixd/http_backend.hpp"

#include <cctype>
#include <cstdlib>

#include "httplib.h"
#include "remixd/error.hpp"
#include "remixd/json_codec.hpp"

namespace remixd {
namespace {

void replace_all(std::string& s, std::string_view key, std::string_view value) {
  for (std::size_t at = s.find(key); at != std::string::npos; at = s.find(key, at + value.size())) {
    s.replace(at, key.size(), value);
  }
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

}  // namespace

std::string percent_encode(std::string_view text) {
  static constexpr char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += kHex[c >> 4];
      out += kHex[c & 15];
    }
  }
  return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  const std::string& url = config_.base_url;
  const auto scheme = url.find("://");
  if (scheme == std::string::npos || url.substr(0, scheme) != "http") {
    throw Error(ErrorCode::kInvalidArgument, "repository base url must start with http:// (got '" + url + "')");
  }
  const auto slash = url.find('/', scheme + 3);
  origin_ = url.substr(0, slash);
  prefix_ = slash == std::string::npos ? "" : url.substr(slash);
  while (!prefix_.empty() && prefix_.back() == '/') prefix_.pop_back();
  if (origin_.size() <= scheme + 3) throw Error(ErrorCode::kInvalidArgument, "repository base url has no host");
}

HttpBackend::Response HttpBackend::get(const std::string& target) const { return get_from(origin_, prefix_ + target); }

HttpBackend::Response HttpBackend::get_from(const std::string& origin, const std::string& path) const {
  httplib::Client client(origin);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_follow_location(true);
  auto res = client.Get(path);
  if (!res) {
    throw Error(ErrorCode::kBackendUnreachable,
                "repository " + origin + " unreachable (" + httplib::to_string(res.error()) + ")");
  }
  return {res->status, std::move(res->body)};
}

SearchPage HttpBackend::search(std::string_view query, std::size_t page, std::size_t page_size) {
  std::string target = config_.search_path;
  replace_all(target, "{query}", percent_encode(query));
  replace_all(target, "{page}", std::to_string(page));
  replace_all(target, "{page_size}", std::to_string(page_size));
  const Response r = get(target);
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorCode::kBackendUnreachable, "repository search answered HTTP " + std::to_string(r.status));
  }
  Json j;
  try {
    j = Json::parse(r.body);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBackendMalformed, std::string("search response is not json: ") + e.what());
  }
  SearchPage out;
  out.query = std::string(query);
  out.page = page;
  const Json* list = &j;
  std::optional<std::size_t> total;
  if (j.is_object()) {
    const auto it = j.find("entries");
    if (it == j.end()) throw Error(ErrorCode::kBackendMalformed, "search response has no \"entries\"");
    list = &*it;
    if (const auto t = j.find("total"); t != j.end() && t->is_number_unsigned()) total = t->get<std::size_t>();
  }
  if (!list->is_array()) throw Error(ErrorCode::kBackendMalformed, "search response entries are not an array");
  for (const Json& rec : *list) out.entries.push_back(entry_from_json(rec));
  // Without a total, a full page hints that another one may follow.
  out.total_available = total.value_or(page * page_size + out.entries.size() + (out.entries.size() == page_size ? 1 : 0));
  return out;
}

std::optional<RepoEntry> HttpBackend::find_entry(std::string_view id) {
  std::string target = config_.entry_path;
  replace_all(target, "{id}", percent_encode(id));
  const Response r = get(target);
  if (r.status == 404) return std::nullopt;
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorCode::kBackendUnreachable, "repository entry lookup answered HTTP " + std::to_string(r.status));
  }
  try {
    return entry_from_json(Json::parse(r.body));
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kBackendMalformed, std::string("entry response is not json: ") + e.what());
  }
}

std::string HttpBackend::fetch(std::string_view locator) {
  Response r;
  if (locator.starts_with("http://")) {
    // Absolute locators may point at another host.
    const auto slash = locator.find('/', 7);
    r = get_from(std::string(locator.substr(0, slash)),
                 slash == std::string_view::npos ? "/" : std::string(locator.substr(slash)));
  } else {
    std::string target = config_.file_path;
    replace_all(target, "{locator}", locator);
    r = get(target);
  }
  if (r.status == 404) throw Error(ErrorCode::kNotFound, "repository has no file '" + std::string(locator) + "'");
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorCode::kBackendUnreachable, "repository file download answered HTTP " + std::to_string(r.status));
  }
  return r.body;
}

std::string HttpBackend::describe() const { return "live repository at " + config_.base_url; }

std::shared_ptr<RepoBackend> backend_from_environment() {
  const std::string base = env_or("REMIXD_REPO_BASE_URL", "");
  if (base.empty()) return std::make_shared<FixtureBackend>(env_or("REMIXD_FIXTURE_DIR", "./fixtures"));
  HttpBackendConfig c;
  c.base_url = base;
  c.search_path = env_or("REMIXD_REPO_SEARCH_PATH", c.search_path);
  c.entry_path = env_or("REMIXD_REPO_ENTRY_PATH", c.entry_path);
  c.file_path = env_or("REMIXD_REPO_FILE_PATH", c.file_path);
  return std::make_shared<HttpBackend>(std::move(c));
}

}  // namespace remixd
