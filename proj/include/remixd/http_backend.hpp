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


#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>
#include <string_view>

#include "remixd/repo.hpp"

namespace remixd {

/// Where a live repository keeps things. Paths are templates appended to
/// the base URL; {query}, {page}, {page_size}, {id} and {locator} are
/// substituted (query and id percent-encoded).
struct HttpBackendConfig {
  std::string base_url;  // e.g. http://repo.example:8080/api
  std::string search_path = "/search?q={query}&page={page}&page_size={page_size}";
  std::string entry_path = "/entries/{id}";
  std::string file_path = "/files/{locator}";
  std::chrono::seconds timeout{10};
};

/// Live backend over plain HTTP. The search endpoint answers with a JSON
/// array of entry records, or an object {"entries": [...], "total": n}.
/// Transport failures and non-2xx statuses raise kBackendUnreachable,
/// undecodable bodies kBackendMalformed; a 404 on an entry means "no such
/// entry".
class HttpBackend final : public RepoBackend {
 public:
  explicit HttpBackend(HttpBackendConfig config);

  SearchPage search(std::string_view query, std::size_t page, std::size_t page_size) override;
  std::optional<RepoEntry> find_entry(std::string_view id) override;
  std::string fetch(std::string_view locator) override;
  std::string describe() const override;

 private:
  struct Response {
    int status = 0;
    std::string body;
  };
  Response get(const std::string& target) const;
  Response get_from(const std::string& origin, const std::string& path) const;

  HttpBackendConfig config_;
  std::string origin_;  // scheme://host:port
  std::string prefix_;  // path part of the base URL, no trailing slash
};

std::string percent_encode(std::string_view text);

/// REMIXD_REPO_BASE_URL selects the live backend (path templates from
/// REMIXD_REPO_SEARCH_PATH, REMIXD_REPO_ENTRY_PATH, REMIXD_REPO_FILE_PATH);
/// otherwise fixtures are read from REMIXD_FIXTURE_DIR, default ./fixtures.
std::shared_ptr<RepoBackend> backend_from_environment();

}  // namespace remixd
