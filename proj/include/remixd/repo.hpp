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
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "remixd/decimation.hpp"
#include "remixd/mesh.hpp"

namespace remixd {

/// True for licenses that permit derivative works: public domain, the
/// Creative Commons attribution and share-alike families, and common open
/// source licenses. No-derivatives, all-rights-reserved and anything
/// unrecognized map to false.
bool license_allows_remix(std::string_view license);

struct RepoEntry {
  std::string id;
  std::string title;
  std::string thumbnail_url;
  std::string license;
  bool remix_allowed = false;
  std::vector<std::string> file_locators;

  bool operator==(const RepoEntry&) const = default;
};

inline constexpr std::size_t kPageSize = 20;

struct SearchPage {
  std::string query;
  std::size_t page = 0;  // zero-based
  std::vector<RepoEntry> entries;
  std::size_t total_available = 0;
};

/// Raw access to a model repository. Implementations must be safe to call
/// from several threads at once.
class RepoBackend {
 public:
  virtual ~RepoBackend() = default;

  /// One page of matches in backend order. Errors: kBackendUnreachable,
  /// kBackendMalformed.
  virtual SearchPage search(std::string_view query, std::size_t page, std::size_t page_size) = 0;
  /// Entry by id, or nullopt when the repository has no such entry.
  virtual std::optional<RepoEntry> find_entry(std::string_view id) = 0;
  /// Bytes behind a file locator or thumbnail reference.
  virtual std::string fetch(std::string_view locator) = 0;
  virtual std::string describe() const = 0;
};

/// Offline repository: `index.json` (an array of entry records, optionally
/// with a "tags" array used for matching) plus the files it references by
/// relative path. The index is read once, on first use.
class FixtureBackend final : public RepoBackend {
 public:
  explicit FixtureBackend(std::filesystem::path dir);

  SearchPage search(std::string_view query, std::size_t page, std::size_t page_size) override;
  std::optional<RepoEntry> find_entry(std::string_view id) override;
  std::string fetch(std::string_view locator) override;
  std::string describe() const override;

 private:
  struct Record {
    RepoEntry entry;
    std::string haystack;  // lowercase title and tags
  };
  const std::vector<Record>& records();

  std::filesystem::path dir_;
  std::once_flag loaded_;
  std::vector<Record> records_;
  std::string load_error_;
};

enum class JobState { kQueued, kDownloading, kPreprocessing, kReady, kFailed };

std::string_view job_state_name(JobState state);

/// Immutable snapshot of a download.
struct DownloadJob {
  std::string id;
  std::string entry_id;
  std::string title;
  JobState state = JobState::kQueued;
  std::vector<JobState> history;  // every state entered, in order
  std::shared_ptr<const TriangleMesh> mesh;  // set once ready
  std::string failure_reason;
  std::size_t downloaded_triangles = 0;
  bool auto_simplified = false;

  bool finished() const { return state == JobState::kReady || state == JobState::kFailed; }
};

/// Search with license filtering plus a download queue that fetches, parses,
/// repairs and, for heavy meshes, simplifies models on worker threads.
class RepoClient {
 public:
  static constexpr std::size_t kMaxConcurrentDownloads = 3;

  explicit RepoClient(std::shared_ptr<RepoBackend> backend, DecimationConfig config = {},
                      std::size_t workers = kMaxConcurrentDownloads);
  ~RepoClient();
  RepoClient(const RepoClient&) = delete;
  RepoClient& operator=(const RepoClient&) = delete;

  /// Only remix-allowed entries are ever returned. Errors: kInvalidArgument
  /// for a blank query, plus backend errors.
  SearchPage search(std::string_view query, std::size_t page = 0) const;

  /// Starts (or joins) a download. An entry that already has a queued,
  /// running or ready job gets that job back; failed jobs are retried.
  DownloadJob enqueue_download(const RepoEntry& entry);
  /// Looks the entry up first. Errors: kNotFound.
  DownloadJob enqueue_download(std::string_view entry_id);

  /// Errors: kNotFound for unknown ids.
  DownloadJob poll_job(std::string_view job_id) const;
  /// Blocks until the job finishes or the timeout passes; returns the latest
  /// snapshot either way.
  DownloadJob wait_job(std::string_view job_id, std::chrono::milliseconds timeout) const;

  /// Thumbnail bytes, passed through undecoded. Errors: kNotFound.
  std::string thumbnail(std::string_view entry_id) const;

  RepoBackend& backend() const { return *backend_; }
  const DecimationConfig& config() const { return config_; }
  /// Highest number of downloads that ever ran at the same time.
  std::size_t peak_concurrency() const;

 private:
  void worker();
  void process(const std::string& job_id);
  void transition(const std::string& job_id, JobState state);

  std::shared_ptr<RepoBackend> backend_;
  DecimationConfig config_;
  mutable std::mutex mu_;
  mutable std::condition_variable changed_;
  std::condition_variable work_;
  std::map<std::string, DownloadJob, std::less<>> jobs_;
  std::map<std::string, RepoEntry, std::less<>> job_entries_;
  std::deque<std::string> pending_;
  std::size_t next_job_ = 1;
  std::size_t running_ = 0;
  std::size_t peak_ = 0;
  bool stopping_ = false;
  std::vector<std::thread> threads_;
};

}  // namespace remixd
