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


#include "remixd/service.hpp"

#include <charconv>
#include <csignal>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "remixd/gcode.hpp"
#include "remixd/json_codec.hpp"
#include "remixd/scene_io.hpp"
#include "remixd/slicer.hpp"
#include "remixd/stl.hpp"

namespace remixd {
namespace {

constexpr std::string_view kSnapshotSuffix = ".scene.json";
constexpr auto kMaxWait = std::chrono::milliseconds(60'000);

/// An error that also carries a JSON payload for the client.
struct DetailedError : Error {
  DetailedError(ErrorCode code, const std::string& message, Json d) : Error(code, message), detail(std::move(d)) {}
  Json detail;
};

Json parse_body(const httplib::Request& req) {
  if (req.body.empty()) return Json::object();
  try {
    Json j = Json::parse(req.body);
    if (!j.is_object()) throw Error(ErrorCode::kInvalidArgument, "request body must be a json object");
    return j;
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, std::string("request body is not valid json: ") + e.what());
  }
}

int node_id(const std::string& text) {
  int v = 0;
  const auto r = std::from_chars(text.data(), text.data() + text.size(), v);
  if (r.ec != std::errc{} || r.ptr != text.data() + text.size()) {
    throw Error(ErrorCode::kNotFound, "no node '" + text + "'");
  }
  return v;
}

int int_member(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_number_integer()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("\"") + key + "\" must be an integer");
  }
  return it->get<int>();
}

std::string string_member(const Json& j, const char* key, std::string fallback = {}) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string()) throw Error(ErrorCode::kInvalidArgument, std::string("\"") + key + "\" must be a string");
  return it->get<std::string>();
}

bool valid_scene_id(std::string_view id) {
  if (id.empty() || id.size() > 64) return false;
  return std::all_of(id.begin(), id.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_'; });
}

void send_json(httplib::Response& res, int status, const Json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, ErrorCode code, const std::string& message, const Json& detail = nullptr) {
  Json err{{"code", error_code_name(code)}, {"message", message}};
  if (!detail.is_null()) err["detail"] = detail;
  send_json(res, http_status_for(code), Json{{"error", err}});
}

using Handler = std::function<void(const httplib::Request&, httplib::Response&)>;

Handler guarded(Handler fn) {
  return [fn = std::move(fn)](const httplib::Request& req, httplib::Response& res) {
    try {
      fn(req, res);
    } catch (const DetailedError& e) {
      send_error(res, e.code(), e.what(), e.detail);
    } catch (const Error& e) {
      send_error(res, e.code(), e.what());
    } catch (const Json::exception& e) {
      send_error(res, ErrorCode::kInvalidArgument, e.what());
    } catch (const std::exception& e) {
      res.status = 500;
      res.set_content(Json{{"error", {{"code", "internal"}, {"message", e.what()}}}}.dump(), "application/json");
    }
  };
}

Json node_response(const Scene& scene, int id) {
  return Json{{"node", node_summary(scene.node(id))}, {"scene", scene_summary(scene)}};
}

}  // namespace

ListenAddress parse_listen(std::string_view text) {
  ListenAddress out;
  std::string_view port = text;
  if (const auto colon = text.rfind(':'); colon != std::string_view::npos) {
    if (colon > 0) out.host = std::string(text.substr(0, colon));
    port = text.substr(colon + 1);
  }
  int p = 0;
  const auto r = std::from_chars(port.data(), port.data() + port.size(), p);
  if (port.empty() || r.ec != std::errc{} || r.ptr != port.data() + port.size() || p < 0 || p > 65535) {
    throw Error(ErrorCode::kInvalidArgument, "listen address must look like host:port (got '" + std::string(text) + "')");
  }
  out.port = p;
  return out;
}

ListenAddress listen_from_environment() {
  const char* v = std::getenv("REMIXD_LISTEN");
  return v && *v ? parse_listen(v) : ListenAddress{};
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kStlParse:
    case ErrorCode::kCorruptPayload:
    case ErrorCode::kVersionMismatch:
    case ErrorCode::kGcodeParse:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kBackendUnreachable:
    case ErrorCode::kBackendMalformed:
      return 502;
    case ErrorCode::kEmptyMesh:
    case ErrorCode::kNotWatertight:
    case ErrorCode::kMeshTooLarge:
    case ErrorCode::kJobNotReady:
    case ErrorCode::kNothingToUndo:
    case ErrorCode::kNotExportable:
    case ErrorCode::kSliceFailed:
    case ErrorCode::kOutOfBuildVolume:
      return 409;
  }
  return 500;
}

Service::Service(std::shared_ptr<RepoClient> repo, ServiceOptions options)
    : repo_(std::move(repo)), options_(std::move(options)) {
  if (!options_.snapshot_dir.empty()) {
    std::filesystem::create_directories(options_.snapshot_dir);
    load_snapshots();
    snapshotter_ = std::thread([this] { snapshot_loop(); });
  }
}

Service::~Service() {
  {
    std::lock_guard lock(stop_mu_);
    stopping_ = true;
  }
  stop_cv_.notify_all();
  if (snapshotter_.joinable()) snapshotter_.join();
  if (!options_.snapshot_dir.empty()) {
    try {
      flush_snapshots();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "remixd: final snapshot failed: %s\n", e.what());
    }
  }
}

std::shared_ptr<Service::Slot> Service::slot(std::string_view scene_id) const {
  std::lock_guard lock(scenes_mu_);
  const auto it = scenes_.find(scene_id);
  if (it == scenes_.end()) throw Error(ErrorCode::kNotFound, "no scene '" + std::string(scene_id) + "'");
  return it->second;
}

std::shared_ptr<const Scene> Service::snapshot(std::string_view scene_id) const {
  const auto s = slot(scene_id);
  std::lock_guard lock(s->reader);
  return s->committed;
}

template <typename Fn>
auto Service::mutate(std::string_view scene_id, Fn&& fn) {
  const auto s = slot(scene_id);
  std::lock_guard write(s->writer);
  std::shared_ptr<const Scene> base;
  {
    std::lock_guard read(s->reader);
    base = s->committed;
  }
  auto next = std::make_shared<Scene>(*base);
  auto out = fn(*next);
  std::lock_guard read(s->reader);
  s->committed = std::move(next);
  s->dirty = true;
  return out;
}

std::string Service::create_scene(std::string id) {
  std::lock_guard lock(scenes_mu_);
  if (id.empty()) {
    do {
      id = "s" + std::to_string(next_scene_++);
    } while (scenes_.contains(id));
  } else if (!valid_scene_id(id)) {
    throw Error(ErrorCode::kInvalidArgument, "scene id must be 1-64 letters, digits, '-' or '_'");
  } else if (scenes_.contains(id)) {
    throw Error(ErrorCode::kInvalidArgument, "scene '" + id + "' already exists");
  }
  auto s = std::make_shared<Slot>();
  s->committed = std::make_shared<const Scene>(id);
  s->dirty = true;
  scenes_.emplace(id, std::move(s));
  return id;
}

void Service::load_snapshots() {
  for (const auto& entry : std::filesystem::directory_iterator(options_.snapshot_dir)) {
    const std::string name = entry.path().filename().string();
    if (!entry.is_regular_file() || !name.ends_with(kSnapshotSuffix)) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    try {
      auto scene = std::make_shared<const Scene>(load_scene(buf.str()));
      auto s = std::make_shared<Slot>();
      const std::string id = scene->id();
      s->committed = std::move(scene);
      std::lock_guard lock(scenes_mu_);
      scenes_.emplace(id, std::move(s));
    } catch (const Error& e) {
      std::fprintf(stderr, "remixd: skipping snapshot %s: %s\n", name.c_str(), e.what());
    }
  }
}

std::size_t Service::flush_snapshots() {
  if (options_.snapshot_dir.empty()) return 0;
  std::vector<std::shared_ptr<const Scene>> pending;
  {
    std::lock_guard lock(scenes_mu_);
    for (auto& [id, s] : scenes_) {
      std::lock_guard read(s->reader);
      if (!s->dirty) continue;
      s->dirty = false;
      pending.push_back(s->committed);
    }
  }
  for (const auto& scene : pending) {
    const auto path = options_.snapshot_dir / (scene->id() + std::string(kSnapshotSuffix));
    const auto tmp = std::filesystem::path(path.string() + ".tmp");
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << save_scene(*scene);
    }
    std::filesystem::rename(tmp, path);
  }
  return pending.size();
}

void Service::snapshot_loop() {
  std::unique_lock lock(stop_mu_);
  while (!stop_cv_.wait_for(lock, options_.snapshot_interval, [this] { return stopping_; })) {
    lock.unlock();
    try {
      flush_snapshots();
    } catch (const std::exception& e) {
      std::fprintf(stderr, "remixd: snapshot failed: %s\n", e.what());
    }
    lock.lock();
  }
}

void Service::mount(httplib::Server& server) {
  server.Post("/api/search", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const auto page = body.value("page", 0);
    if (page < 0) throw Error(ErrorCode::kInvalidArgument, "\"page\" must be >= 0");
    send_json(res, 200, to_json(repo_->search(string_member(body, "query"), static_cast<std::size_t>(page))));
  }));

  // {"entry_id"} starts a download. {"scene_id", "job_id" | "entry_id",
  // "wait_ms"?} adds a ready download to that scene's carousel.
  server.Post("/api/gather", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const std::string scene_id = string_member(body, "scene_id");
    const std::string job_id = string_member(body, "job_id");
    const std::string entry_id = string_member(body, "entry_id");
    if (job_id.empty() && entry_id.empty()) throw Error(ErrorCode::kInvalidArgument, "need \"entry_id\" or \"job_id\"");
    DownloadJob job = job_id.empty() ? repo_->enqueue_download(entry_id) : repo_->poll_job(job_id);
    if (scene_id.empty()) {
      send_json(res, 202, to_json(job));
      return;
    }
    const auto wait = std::min(kMaxWait, std::chrono::milliseconds(std::max(0, body.value("wait_ms", 0))));
    if (!job.finished() && wait.count() > 0) job = repo_->wait_job(job.id, wait);
    if (job.state != JobState::kReady) {
      throw DetailedError(ErrorCode::kJobNotReady, "job " + job.id + " is " + std::string(job_state_name(job.state)),
                          to_json(job));
    }
    const Json out = mutate(scene_id, [&](Scene& scene) {
      const std::size_t index = scene.gather(job);
      return Json{{"gathered_index", index}, {"job", to_json(job)}, {"scene", scene_summary(scene)}};
    });
    send_json(res, 200, out);
  }));

  server.Get(R"(/api/jobs/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, to_json(repo_->poll_job(req.matches[1].str())));
  }));

  server.Get("/api/scenes", guarded([this](const httplib::Request&, httplib::Response& res) {
    Json ids = Json::array();
    std::lock_guard lock(scenes_mu_);
    for (const auto& [id, s] : scenes_) ids.push_back(id);
    send_json(res, 200, Json{{"scenes", ids}});
  }));

  server.Post("/api/scenes", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = create_scene(string_member(parse_body(req), "id"));
    send_json(res, 201, scene_summary(*snapshot(id)));
  }));

  server.Get(R"(/api/scenes/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, scene_summary(*snapshot(req.matches[1].str())));
  }));

  server.Get(R"(/api/scenes/([^/]+)/file)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    res.set_content(save_scene(*snapshot(req.matches[1].str())), "application/json");
  }));

  server.Delete(R"(/api/scenes/([^/]+)/gathered/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto index = static_cast<std::size_t>(node_id(req.matches[2].str()));
    send_json(res, 200, mutate(req.matches[1].str(), [&](Scene& scene) {
                scene.remove_gathered(index);
                return Json{{"scene", scene_summary(scene)}};
              }));
  }));

  // Place a gathered item ({"gathered_index"}) or a primitive ({"primitive":
  // "cube", "edge": 10} or {"spec": {...}}), optionally with a transform.
  server.Post(R"(/api/scenes/([^/]+)/nodes)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const Transform t = transform_from_json(body.value("transform", Json()), ErrorCode::kInvalidArgument);
    Json out;
    if (body.contains("gathered_index")) {
      const int index = int_member(body, "gathered_index");
      if (index < 0) throw Error(ErrorCode::kNotFound, "no gathered item " + std::to_string(index));
      out = mutate(req.matches[1].str(), [&](Scene& scene) {
        return node_response(scene, scene.place(static_cast<std::size_t>(index), t));
      });
    } else {
      const PrimitiveKind spec =
          primitive_from_json(body.contains("spec") ? body["spec"] : body, ErrorCode::kInvalidArgument);
      out = mutate(req.matches[1].str(), [&](Scene& scene) { return node_response(scene, scene.place(spec, t)); });
    }
    send_json(res, 201, out);
  }));

  server.Patch(R"(/api/scenes/([^/]+)/nodes/(\d+)/transform)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const Transform t = transform_from_json(body.contains("transform") ? body["transform"] : body, ErrorCode::kInvalidArgument);
    const int id = node_id(req.matches[2].str());
    send_json(res, 200, mutate(req.matches[1].str(), [&](Scene& scene) {
                scene.set_transform(id, t);
                return node_response(scene, id);
              }));
  }));

  server.Post(R"(/api/scenes/([^/]+)/nodes/(\d+)/duplicate)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const int id = node_id(req.matches[2].str());
    send_json(res, 201, mutate(req.matches[1].str(), [&](Scene& scene) { return node_response(scene, scene.duplicate(id)); }));
  }));

  server.Post(R"(/api/scenes/([^/]+)/csg)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const Json body = parse_body(req);
    const CsgOp op = parse_csg_op(string_member(body, "op"));
    const int first = int_member(body, "first");
    const int second = int_member(body, "second");
    send_json(res, 201, mutate(req.matches[1].str(), [&](Scene& scene) {
                return node_response(scene, scene.apply_csg(op, first, second));
              }));
  }));

  server.Post(R"(/api/scenes/([^/]+)/undo)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    send_json(res, 200, mutate(req.matches[1].str(), [&](Scene& scene) {
                scene.undo();
                return Json{{"scene", scene_summary(scene)}};
              }));
  }));

  // Multipart with an "stl" file plus optional "pose" (transform json) and
  // "label" fields, or a raw STL body with ?pose=...&label=....
  server.Post(R"(/api/scenes/([^/]+)/environment)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    std::string stl, pose_text, label;
    if (req.is_multipart_form_data()) {
      const char* file_key = req.has_file("stl") ? "stl" : "file";
      if (!req.has_file(file_key)) throw Error(ErrorCode::kInvalidArgument, "multipart upload needs an \"stl\" part");
      const auto part = req.get_file_value(file_key);
      stl = part.content;
      if (req.has_file("pose")) pose_text = req.get_file_value("pose").content;
      label = req.has_file("label") ? req.get_file_value("label").content : part.filename;
    } else {
      stl = req.body;
      pose_text = req.get_param_value("pose");
      label = req.get_param_value("label");
    }
    if (label.empty()) label = "environment";
    Json pose;
    if (!pose_text.empty()) {
      try {
        pose = Json::parse(pose_text);
      } catch (const Json::exception& e) {
        throw Error(ErrorCode::kInvalidArgument, std::string("pose is not valid json: ") + e.what());
      }
    }
    const Transform t = transform_from_json(pose, ErrorCode::kInvalidArgument);
    send_json(res, 201, mutate(req.matches[1].str(), [&](Scene& scene) {
                return node_response(scene, scene.import_environment(stl, t, label));
              }));
  }));

  // World-frame mesh for display; ?download=1 applies the export rules.
  server.Get(R"(/api/scenes/([^/]+)/nodes/(\d+)/mesh\.stl)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const auto scene = snapshot(req.matches[1].str());
    const int id = node_id(req.matches[2].str());
    const bool download = req.get_param_value("download") == "1";
    std::string bytes = download ? scene->export_node_stl(id) : write_stl(scene->world_mesh(id));
    if (download) res.set_header("Content-Disposition", "attachment; filename=\"node-" + std::to_string(id) + ".stl\"");
    res.set_content(std::move(bytes), "application/octet-stream");
  }));

  server.Post(R"(/api/scenes/([^/]+)/nodes/(\d+)/export/gcode)", guarded([this](const httplib::Request& req, httplib::Response& res) {
    const SliceConfig config = slice_config_from_json(parse_body(req), SliceConfig{}, ErrorCode::kInvalidArgument);
    const auto scene = snapshot(req.matches[1].str());
    const int id = node_id(req.matches[2].str());
    if (!scene->node(id).exportable()) {
      throw Error(ErrorCode::kNotExportable, "node " + std::to_string(id) + " is an environment node and cannot be printed");
    }
    const SliceResult sliced = slice_for_print(scene->world_mesh(id), config);
    const ToolpathProgram program = emit_gcode(sliced.layers, config);
    res.set_header("Content-Disposition", "attachment; filename=\"node-" + std::to_string(id) + ".gcode\"");
    res.set_header("X-Remixd-Layers", std::to_string(sliced.layers.size()));
    res.set_header("X-Remixd-Filament-Volume", format_gcode_number(program.filament_volume));
    res.set_header("X-Remixd-Warnings", std::to_string(sliced.warnings.size()));
    res.set_content(to_text(program), "application/octet-stream");
  }));

  server.Get(R"(/api/thumbnails/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
    res.set_content(repo_->thumbnail(req.matches[1].str()), "image/png");
  }));
}

namespace {
std::atomic<httplib::Server*> g_running{nullptr};

extern "C" void stop_on_signal(int) {
  if (httplib::Server* s = g_running.load()) s->stop();
}
}  // namespace

void run_server(Service& service, const ListenAddress& address) {
  httplib::Server server;
  service.mount(server);
  if (!server.bind_to_port(address.host, address.port)) {
    throw Error(ErrorCode::kInvalidArgument,
                "cannot listen on " + address.host + ":" + std::to_string(address.port));
  }
  g_running = &server;
  std::signal(SIGINT, stop_on_signal);
  std::signal(SIGTERM, stop_on_signal);
  std::fprintf(stderr, "remixd: serving on http://%s:%d (%s)\n", address.host.c_str(), address.port,
               service.repo().backend().describe().c_str());
  server.listen_after_bind();
  g_running = nullptr;
}

}  // namespace remixd
