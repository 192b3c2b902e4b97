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

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "remixd/error.hpp"
#include "remixd/repo.hpp"
#include "remixd/scene.hpp"

namespace httplib {
class Server;
}

namespace remixd {

struct ListenAddress {
  std::string host = "127.0.0.1";
  int port = 8787;
};

/// "host:port", ":port" or "port". Errors: kInvalidArgument.
ListenAddress parse_listen(std::string_view text);
/// REMIXD_LISTEN, or the default address.
ListenAddress listen_from_environment();

/// HTTP status for an error code: 400 bad input, 404 unknown id, 409 failed
/// precondition, 502 repository trouble.
int http_status_for(ErrorCode code);

struct ServiceOptions {
  /// Scene files are written here periodically and reloaded at startup.
  /// Empty disables persistence.
  std::filesystem::path snapshot_dir;
  std::chrono::milliseconds snapshot_interval{30'000};
};

/// The REST facade. Scenes live in memory; each has a single writer at a
/// time while readers get the last committed snapshot without waiting.
class Service {
 public:
  explicit Service(std::shared_ptr<RepoClient> repo, ServiceOptions options = {});
  ~Service();
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  /// Registers every /api route on `server`.
  void mount(httplib::Server& server);

  /// Latest committed state. Errors: kNotFound.
  std::shared_ptr<const Scene> snapshot(std::string_view scene_id) const;
  /// Creates an empty scene; an empty id picks the next free "sN".
  /// Errors: kInvalidArgument when the id is taken or malformed.
  std::string create_scene(std::string id = {});
  /// Writes every scene changed since the last flush; returns how many.
  std::size_t flush_snapshots();

  RepoClient& repo() const { return *repo_; }

 private:
  struct Slot {
    std::mutex writer;
    mutable std::mutex reader;
    std::shared_ptr<const Scene> committed;
    bool dirty = false;
  };

  std::shared_ptr<Slot> slot(std::string_view scene_id) const;
  /// Runs `fn` on a private copy and publishes it if `fn` returns normally.
  template <typename Fn>
  auto mutate(std::string_view scene_id, Fn&& fn);
  void load_snapshots();
  void snapshot_loop();

  std::shared_ptr<RepoClient> repo_;
  ServiceOptions options_;
  mutable std::mutex scenes_mu_;
  std::map<std::string, std::shared_ptr<Slot>, std::less<>> scenes_;
  std::size_t next_scene_ = 1;

  std::mutex stop_mu_;
  std::condition_variable stop_cv_;
  bool stopping_ = false;
  std::thread snapshotter_;
};

/// Serves until the process is stopped. Errors: kInvalidArgument when the
/// address cannot be bound.
void run_server(Service& service, const ListenAddress& address);

}  // namespace remixd
