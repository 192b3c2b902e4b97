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


#include "remixd/replay.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "remixd/error.hpp"
#include "remixd/gcode.hpp"
#include "remixd/scene_io.hpp"
#include "remixd/slicer.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

using Clock = std::chrono::steady_clock;

std::string read_bytes(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot read " + p.string());
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_bytes(const std::filesystem::path& p, const std::string& bytes) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write " + p.string());
}

class Runner {
 public:
  Runner(RepoClient& repo, const ReplayOptions& options) : repo_(repo), options_(options) {}

  Json step(const Json& s) {
    if (!s.is_object()) throw Error(ErrorCode::kInvalidArgument, "step must be an object");
    const std::string op = text(s, "op");
    if (op == "search") {
      const SearchPage page = repo_.search(text(s, "query"), static_cast<std::size_t>(s.value("page", 0)));
      Json ids = Json::array();
      for (const RepoEntry& e : page.entries) ids.push_back(e.id);
      return {{"results", ids}, {"total_available", page.total_available}};
    }
    if (op == "gather") {
      const DownloadJob queued = repo_.enqueue_download(text(s, "entry_id"));
      const DownloadJob job = repo_.wait_job(queued.id, options_.download_timeout);
      if (job.state == JobState::kFailed) {
        throw Error(ErrorCode::kJobNotReady, "download of " + job.entry_id + " failed: " + job.failure_reason);
      }
      const std::size_t index = scene_.gather(job);
      return {{"gathered_index", index}, {"job", to_json(job)}};
    }
    if (op == "remove_gathered") {
      scene_.remove_gathered(static_cast<std::size_t>(integer(s, "index")));
      return Json::object();
    }
    if (op == "place") {
      const Transform t = transform_from_json(s.value("transform", Json()), ErrorCode::kInvalidArgument);
      int id = 0;
      if (s.contains("gathered_index")) {
        id = scene_.place(static_cast<std::size_t>(integer(s, "gathered_index")), t);
      } else {
        id = scene_.place(primitive_from_json(s.contains("spec") ? s["spec"] : s, ErrorCode::kInvalidArgument), t);
      }
      return named(s, id);
    }
    if (op == "transform") {
      const int id = node(s, "node");
      scene_.set_transform(id, transform_from_json(s.value("transform", Json()), ErrorCode::kInvalidArgument));
      return describe(id);
    }
    if (op == "duplicate") return named(s, scene_.duplicate(node(s, "node")));
    if (op == "csg") {
      const CsgOp kind = parse_csg_op(text(s, "operation"));
      return named(s, scene_.apply_csg(kind, node(s, "first"), node(s, "second")));
    }
    if (op == "undo") {
      scene_.undo();
      return Json::object();
    }
    if (op == "import_environment") {
      const std::filesystem::path path = asset(text(s, "path"));
      const Transform pose = transform_from_json(s.value("pose", Json()), ErrorCode::kInvalidArgument);
      const std::string label = s.contains("label") ? text(s, "label") : path.stem().string();
      return named(s, scene_.import_environment(read_bytes(path), pose, label));
    }
    if (op == "export_stl") {
      const int id = node(s, "node");
      const std::string bytes = scene_.export_node_stl(id);
      const auto path = output(text(s, "file"));
      write_bytes(path, bytes);
      const TriangleMesh written = load_stl(bytes).mesh;
      Json e{{"file", path.filename().string()},
             {"kind", "stl"},
             {"node", id},
             {"bytes", bytes.size()},
             {"triangles", written.triangle_count()},
             {"volume", signed_volume(written)},
             {"watertight", is_watertight(written)}};
      exports_.push_back(e);
      return e;
    }
    if (op == "export_gcode") {
      const int id = node(s, "node");
      if (!scene_.node(id).exportable()) {
        throw Error(ErrorCode::kNotExportable, "node " + std::to_string(id) + " is an environment node");
      }
      const SliceConfig config = slice_config_from_json(s.value("config", Json()), SliceConfig{}, ErrorCode::kInvalidArgument);
      const SliceResult sliced = slice_for_print(scene_.world_mesh(id), config);
      const ToolpathProgram program = emit_gcode(sliced.layers, config);
      const std::string text_out = to_text(program);
      const auto path = output(text(s, "file"));
      write_bytes(path, text_out);
      Json e{{"file", path.filename().string()},
             {"kind", "gcode"},
             {"node", id},
             {"bytes", text_out.size()},
             {"layers", sliced.layers.size()},
             {"filament_volume", program.filament_volume},
             {"warnings", sliced.warnings}};
      exports_.push_back(e);
      return e;
    }
    if (op == "save_scene") {
      const auto path = output(text(s, "file"));
      write_bytes(path, save_scene(scene_));
      return {{"file", path.filename().string()}};
    }
    throw Error(ErrorCode::kInvalidArgument, "unknown op \"" + op + "\"");
  }

  Scene& scene() { return scene_; }
  Json& exports() { return exports_; }
  std::vector<std::filesystem::path>& outputs() { return outputs_; }

 private:
  static std::string text(const Json& s, const char* key) {
    const auto it = s.find(key);
    if (it == s.end() || !it->is_string()) throw Error(ErrorCode::kInvalidArgument, std::string("needs string \"") + key + "\"");
    return it->get<std::string>();
  }

  static long long integer(const Json& s, const char* key) {
    const auto it = s.find(key);
    if (it == s.end() || !it->is_number_integer() || it->get<long long>() < 0) {
      throw Error(ErrorCode::kInvalidArgument, std::string("needs non-negative integer \"") + key + "\"");
    }
    return it->get<long long>();
  }

  int node(const Json& s, const char* key) const {
    const auto it = s.find(key);
    if (it != s.end() && it->is_number_integer()) return it->get<int>();
    if (it != s.end() && it->is_string()) {
      const auto n = names_.find(it->get<std::string>());
      if (n == names_.end()) throw Error(ErrorCode::kNotFound, "no node named \"" + it->get<std::string>() + "\"");
      return n->second;
    }
    throw Error(ErrorCode::kInvalidArgument, std::string("needs node id or name in \"") + key + "\"");
  }

  Json named(const Json& s, int id) {
    if (s.contains("as")) names_[text(s, "as")] = id;
    return describe(id);
  }

  Json describe(int id) const {
    const SceneNode& n = scene_.node(id);
    Json j{{"node", id}, {"label", n.label}, {"triangles", n.mesh ? n.mesh->triangle_count() : 0}};
    if (!n.warnings.empty()) j["warnings"] = n.warnings;
    return j;
  }

  std::filesystem::path asset(const std::string& rel) const {
    const std::filesystem::path p(rel);
    if (p.is_absolute()) return p;
    for (const auto& base : {options_.asset_dir, options_.script_dir}) {
      if (!base.empty() && std::filesystem::exists(base / p)) return base / p;
    }
    throw Error(ErrorCode::kNotFound, "cannot find asset " + rel);
  }

  std::filesystem::path output(const std::string& name) {
    const std::filesystem::path p(name);
    if (p.empty() || p.is_absolute() || p.has_parent_path() || name == "." || name == "..") {
      throw Error(ErrorCode::kInvalidArgument, "output file must be a plain file name (got \"" + name + "\")");
    }
    outputs_.push_back(options_.out_dir / p);
    return outputs_.back();
  }

  RepoClient& repo_;
  const ReplayOptions& options_;
  Scene scene_{"replay"};
  std::map<std::string, int> names_;
  Json exports_ = Json::array();
  std::vector<std::filesystem::path> outputs_;
};

}  // namespace

ReplayResult replay_script(const Json& script, RepoClient& repo, const ReplayOptions& options) {
  if (!script.is_array()) throw Error(ErrorCode::kInvalidArgument, "a remix script is a json array of steps");
  if (options.out_dir.empty()) throw Error(ErrorCode::kInvalidArgument, "replay needs an output directory");
  std::filesystem::create_directories(options.out_dir);
  Runner runner(repo, options);
  Json steps = Json::array();
  const auto start = Clock::now();
  for (std::size_t i = 0; i < script.size(); ++i) {
    const auto t0 = Clock::now();
    Json result;
    try {
      result = runner.step(script[i]);
    } catch (const Error& e) {
      const std::string op = script[i].is_object() ? script[i].value("op", std::string("?")) : "?";
      throw Error(e.code(), "step " + std::to_string(i + 1) + " (" + op + "): " + e.what());
    }
    const double ms = std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
    steps.push_back({{"step", i + 1}, {"op", script[i]["op"]}, {"ms", ms}, {"result", result}});
  }
  const Scene& scene = runner.scene();
  Json report{{"steps", steps},
              {"exports", runner.exports()},
              {"nodes", scene.nodes().size()},
              {"gathered", scene.gathered().size()},
              {"undo_depth", scene.undo_stack().size()},
              {"total_ms", std::chrono::duration<double, std::milli>(Clock::now() - start).count()}};
  write_bytes(options.out_dir / "report.json", report.dump(2) + "\n");
  ReplayResult out{std::move(report), runner.scene(), std::move(runner.outputs())};
  return out;
}

Json load_script(const std::filesystem::path& path) {
  const std::string bytes = read_bytes(path);
  try {
    return Json::parse(bytes);
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::kInvalidArgument, path.string() + " is not valid json: " + e.what());
  }
}

}  // namespace remixd
