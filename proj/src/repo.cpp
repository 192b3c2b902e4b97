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


#include "remixd/repo.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>
#include <utility>

#include "remixd/error.hpp"
#include "remixd/json_codec.hpp"
#include "remixd/repair.hpp"
#include "remixd/stl.hpp"

namespace remixd {
namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string cur;
  for (const char ch : s) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c) || c == '.') {
      cur.push_back(static_cast<char>(std::toupper(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

bool is_stl_locator(std::string_view locator) {
  const std::string l = lower(locator);
  const auto query = l.find('?');
  const std::string path = l.substr(0, query);
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".stl") == 0;
}

}  // namespace

bool license_allows_remix(std::string_view license) {
  const std::vector<std::string> t = tokens(license);
  if (t.empty()) return false;
  const std::set<std::string> words(t.begin(), t.end());
  auto has = [&](const char* w) { return words.count(w) > 0; };

  // Anything forbidding derivatives or reserving rights fails closed.
  if (has("ND") || has("NODERIVATIVES") || has("NODERIVS") || has("RESERVED") || has("PROPRIETARY")) return false;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    if (t[i] == "NO" && (t[i + 1].rfind("DERIV", 0) == 0)) return false;
  }

  if (t[0] == "CC0" || has("PDDL") || (has("PUBLIC") && has("DOMAIN")) || (t.size() == 1 && t[0] == "PD")) return true;
  const bool cc = t[0] == "CC" || (t.size() > 1 && t[0] == "CREATIVE" && t[1] == "COMMONS");
  if (cc && (has("BY") || has("ATTRIBUTION"))) return true;
  static const std::set<std::string> open_source = {"GPL", "LGPL", "AGPL", "GNU", "BSD", "MIT", "APACHE", "MPL"};
  for (const std::string& w : t) {
    if (open_source.count(w)) return true;
  }
  return false;
}

FixtureBackend::FixtureBackend(std::filesystem::path dir) : dir_(std::move(dir)) {}

const std::vector<FixtureBackend::Record>& FixtureBackend::records() {
  std::call_once(loaded_, [this] {
    const std::filesystem::path index = dir_ / "index.json";
    std::string text;
    try {
      text = read_file(index.string());
    } catch (const Error&) {
      load_error_ = "fixture index not found: " + index.string();
      return;
    }
    Json j;
    try {
      j = Json::parse(text);
    } catch (const Json::exception& e) {
      load_error_ = std::string("fixture index is not valid json: ") + e.what();
      return;
    }
    if (!j.is_array()) {
      load_error_ = "fixture index must be a json array";
      return;
    }
    std::set<std::string> seen;
    try {
      for (const Json& rec : j) {
        Record r;
        r.entry = entry_from_json(rec);
        if (!seen.insert(r.entry.id).second) {
          throw Error(ErrorCode::kBackendMalformed, "duplicate entry id '" + r.entry.id + "'");
        }
        r.haystack = lower(r.entry.title);
        if (const auto it = rec.find("tags"); it != rec.end() && it->is_array()) {
          for (const Json& tag : *it) {
            if (tag.is_string()) r.haystack += " " + lower(tag.get<std::string>());
          }
        }
        records_.push_back(std::move(r));
      }
    } catch (const Error& e) {
      records_.clear();
      load_error_ = std::string("fixture index: ") + e.what();
    }
  });
  if (!load_error_.empty()) {
    const bool missing = load_error_.rfind("fixture index not found", 0) == 0;
    throw Error(missing ? ErrorCode::kBackendUnreachable : ErrorCode::kBackendMalformed, load_error_);
  }
  return records_;
}

SearchPage FixtureBackend::search(std::string_view query, std::size_t page, std::size_t page_size) {
  std::vector<std::string> words;
  std::istringstream in{lower(query)};
  for (std::string w; in >> w;) words.push_back(w);

  SearchPage out;
  out.query = std::string(query);
  out.page = page;
  std::size_t matched = 0;
  for (const Record& r : records()) {
    if (!r.entry.remix_allowed) continue;
    const bool hit = std::all_of(words.begin(), words.end(),
                                 [&](const std::string& w) { return r.haystack.find(w) != std::string::npos; });
    if (!hit) continue;
    if (matched >= page * page_size && out.entries.size() < page_size) out.entries.push_back(r.entry);
    ++matched;
  }
  out.total_available = matched;
  return out;
}

std::optional<RepoEntry> FixtureBackend::find_entry(std::string_view id) {
  for (const Record& r : records()) {
    if (r.entry.id == id) return r.entry;
  }
  return std::nullopt;
}

std::string FixtureBackend::fetch(std::string_view locator) {
  const std::filesystem::path rel{std::string(locator)};
  const bool escapes = std::any_of(rel.begin(), rel.end(), [](const std::filesystem::path& p) { return p == ".."; });
  if (rel.empty() || rel.is_absolute() || escapes) {
    throw Error(ErrorCode::kNotFound, "fixture locator must be a relative path inside the corpus: " + std::string(locator));
  }
  return read_file((dir_ / rel).string());
}

std::string FixtureBackend::describe() const { return "fixtures at " + dir_.string(); }

std::string_view job_state_name(JobState state) {
  switch (state) {
    case JobState::kQueued: return "queued";
    case JobState::kDownloading: return "downloading";
    case JobState::kPreprocessing: return "preprocessing";
    case JobState::kReady: return "ready";
    case JobState::kFailed: return "failed";
  }
  return "queued";
}

RepoClient::RepoClient(std::shared_ptr<RepoBackend> backend, DecimationConfig config, std::size_t workers)
    : backend_(std::move(backend)), config_(config) {
  if (!backend_) throw Error(ErrorCode::kInvalidArgument, "repo client needs a backend");
  validate_config(config_);
  workers = std::clamp<std::size_t>(workers, 1, kMaxConcurrentDownloads);
  for (std::size_t i = 0; i < workers; ++i) threads_.emplace_back([this] { worker(); });
}

RepoClient::~RepoClient() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  work_.notify_all();
  for (std::thread& t : threads_) t.join();
}

SearchPage RepoClient::search(std::string_view query, std::size_t page) const {
  const std::string_view q = trim(query);
  if (q.empty()) throw Error(ErrorCode::kInvalidArgument, "search query is empty");
  SearchPage result = backend_->search(q, page, kPageSize);
  // Never trust the backend's flag or its page length.
  std::erase_if(result.entries, [](RepoEntry& e) {
    e.remix_allowed = license_allows_remix(e.license);
    return !e.remix_allowed;
  });
  if (result.entries.size() > kPageSize) result.entries.resize(kPageSize);
  result.query = std::string(q);
  result.page = page;
  return result;
}

DownloadJob RepoClient::enqueue_download(const RepoEntry& entry) {
  if (entry.id.empty()) throw Error(ErrorCode::kInvalidArgument, "entry has no id");
  if (!license_allows_remix(entry.license)) {
    throw Error(ErrorCode::kInvalidArgument, "entry '" + entry.id + "' does not permit remixing");
  }
  std::lock_guard lock(mu_);
  for (const auto& [id, job] : jobs_) {
    if (job.entry_id == entry.id && job.state != JobState::kFailed) return job;
  }
  DownloadJob job;
  job.id = "job-" + std::to_string(next_job_++);
  job.entry_id = entry.id;
  job.title = entry.title;
  job.state = JobState::kQueued;
  job.history = {JobState::kQueued};
  jobs_.emplace(job.id, job);
  job_entries_.emplace(job.id, entry);
  pending_.push_back(job.id);
  work_.notify_one();
  return job;
}

DownloadJob RepoClient::enqueue_download(std::string_view entry_id) {
  const std::optional<RepoEntry> entry = backend_->find_entry(entry_id);
  if (!entry) throw Error(ErrorCode::kNotFound, "unknown repository entry '" + std::string(entry_id) + "'");
  return enqueue_download(*entry);
}

DownloadJob RepoClient::poll_job(std::string_view job_id) const {
  std::lock_guard lock(mu_);
  const auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "unknown job '" + std::string(job_id) + "'");
  return it->second;
}

DownloadJob RepoClient::wait_job(std::string_view job_id, std::chrono::milliseconds timeout) const {
  std::unique_lock lock(mu_);
  const auto it = jobs_.find(job_id);
  if (it == jobs_.end()) throw Error(ErrorCode::kNotFound, "unknown job '" + std::string(job_id) + "'");
  changed_.wait_for(lock, timeout, [&] { return it->second.finished(); });
  return it->second;
}

std::string RepoClient::thumbnail(std::string_view entry_id) const {
  const std::optional<RepoEntry> entry = backend_->find_entry(entry_id);
  if (!entry || !entry->remix_allowed) {
    throw Error(ErrorCode::kNotFound, "unknown repository entry '" + std::string(entry_id) + "'");
  }
  if (entry->thumbnail_url.empty()) throw Error(ErrorCode::kNotFound, "entry '" + entry->id + "' has no thumbnail");
  return backend_->fetch(entry->thumbnail_url);
}

std::size_t RepoClient::peak_concurrency() const {
  std::lock_guard lock(mu_);
  return peak_;
}

void RepoClient::worker() {
  for (;;) {
    std::string id;
    {
      std::unique_lock lock(mu_);
      work_.wait(lock, [&] { return stopping_ || !pending_.empty(); });
      if (stopping_) return;
      id = std::move(pending_.front());
      pending_.pop_front();
      peak_ = std::max(peak_, ++running_);
    }
    process(id);
    std::lock_guard lock(mu_);
    --running_;
  }
}

void RepoClient::transition(const std::string& job_id, JobState state) {
  {
    std::lock_guard lock(mu_);
    DownloadJob& job = jobs_.at(job_id);
    job.state = state;
    job.history.push_back(state);
  }
  changed_.notify_all();
}

void RepoClient::process(const std::string& job_id) {
  RepoEntry entry;
  {
    std::lock_guard lock(mu_);
    entry = job_entries_.at(job_id);
  }
  auto fail = [&](const std::string& reason) {
    {
      std::lock_guard lock(mu_);
      DownloadJob& job = jobs_.at(job_id);
      job.failure_reason = reason;
      job.state = JobState::kFailed;
      job.history.push_back(JobState::kFailed);
    }
    changed_.notify_all();
  };

  transition(job_id, JobState::kDownloading);
  const auto locator = std::find_if(entry.file_locators.begin(), entry.file_locators.end(), is_stl_locator);
  if (locator == entry.file_locators.end()) return fail("download failed: entry has no STL file");
  std::string bytes;
  try {
    bytes = backend_->fetch(*locator);
  } catch (const Error& e) {
    return fail(std::string("download failed: ") + e.what());
  }

  transition(job_id, JobState::kPreprocessing);
  try {
    StlLoadResult loaded = load_stl(bytes);
    bytes.clear();
    TriangleMesh repaired = repair_mesh(loaded.mesh).mesh;
    if (repaired.empty()) return fail("preprocessing failed: mesh is empty after repair");
    const std::size_t downloaded = repaired.triangle_count();
    AutoSimplifyResult simplified = maybe_auto_simplify(repaired, config_);
    auto mesh = std::make_shared<const TriangleMesh>(std::move(simplified.mesh));
    {
      std::lock_guard lock(mu_);
      DownloadJob& job = jobs_.at(job_id);
      job.mesh = std::move(mesh);
      job.downloaded_triangles = downloaded;
      job.auto_simplified = simplified.applied;
      job.state = JobState::kReady;
      job.history.push_back(JobState::kReady);
    }
    changed_.notify_all();
  } catch (const Error& e) {
    fail(e.what());
  }
}

}  // namespace remixd
