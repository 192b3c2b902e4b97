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


// remixd command line: repository search and fetch, script replay, slicing
// and the REST service.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "remixd/decimation.hpp"
#include "remixd/error.hpp"
#include "remixd/fixture_corpus.hpp"
#include "remixd/gcode.hpp"
#include "remixd/http_backend.hpp"
#include "remixd/replay.hpp"
#include "remixd/repo.hpp"
#include "remixd/service.hpp"
#include "remixd/slicer.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace {

using namespace remixd;

struct RepoFlags {
  std::string fixture_dir = "./fixtures";
  std::string base_url;
  HttpBackendConfig http;
  double quality = DecimationConfig{}.quality;

  std::shared_ptr<RepoClient> client() const {
    std::shared_ptr<RepoBackend> backend;
    if (base_url.empty()) {
      backend = std::make_shared<FixtureBackend>(fixture_dir);
    } else {
      HttpBackendConfig c = http;
      c.base_url = base_url;
      backend = std::make_shared<HttpBackend>(std::move(c));
    }
    DecimationConfig d;
    d.quality = quality;
    validate_config(d);
    return std::make_shared<RepoClient>(std::move(backend), d);
  }
};

int run_search(const RepoFlags& flags, const std::string& query, std::size_t page) {
  const SearchPage result = flags.client()->search(query, page);
  std::printf("%-20s %-18s %s\n", "ID", "LICENSE", "TITLE");
  for (const RepoEntry& e : result.entries) {
    std::printf("%-20s %-18s %s\n", e.id.c_str(), e.license.c_str(), e.title.c_str());
  }
  std::printf("page %zu: %zu shown, %zu remixable matches in total\n", page, result.entries.size(), result.total_available);
  return 0;
}

int run_fetch(const RepoFlags& flags, const std::string& id, const std::string& out, int timeout_ms) {
  auto repo = flags.client();
  const DownloadJob queued = repo->enqueue_download(id);
  const DownloadJob job = repo->wait_job(queued.id, std::chrono::milliseconds(timeout_ms));
  if (job.state != JobState::kReady) {
    std::fprintf(stderr, "remixd: download of %s failed: %s\n", id.c_str(), job.failure_reason.c_str());
    return 1;
  }
  std::printf("%s: %zu triangles downloaded, %zu kept%s\n", id.c_str(), job.downloaded_triangles,
              job.mesh->triangle_count(), job.auto_simplified ? " (simplified)" : "");
  if (!out.empty()) {
    write_file(out, write_stl(*job.mesh));
    std::printf("wrote %s\n", out.c_str());
  }
  return 0;
}

int run_replay(const RepoFlags& flags, const std::string& script, ReplayOptions options) {
  auto repo = flags.client();
  options.script_dir = std::filesystem::absolute(script).parent_path();
  if (options.asset_dir.empty()) options.asset_dir = flags.fixture_dir;
  const ReplayResult result = replay_script(load_script(script), *repo, options);
  for (const Json& e : result.report["exports"]) {
    if (e["kind"] == "stl") {
      std::printf("%-24s %8zu triangles  volume %.3f mm^3  %s\n", e["file"].get<std::string>().c_str(),
                  e["triangles"].get<std::size_t>(), e["volume"].get<double>(),
                  e["watertight"].get<bool>() ? "watertight" : "OPEN");
    } else {
      std::printf("%-24s %8zu layers     filament %.3f mm^3\n", e["file"].get<std::string>().c_str(),
                  e["layers"].get<std::size_t>(), e["filament_volume"].get<double>());
    }
  }
  std::printf("%zu steps, report in %s\n", result.report["steps"].size(),
              (options.out_dir / "report.json").string().c_str());
  return 0;
}

int run_slice(const std::string& input, const std::string& output, const SliceConfig& config) {
  const TriangleMesh mesh = load_stl(read_file(input)).mesh;
  const SliceResult sliced = slice_for_print(mesh, config);
  const ToolpathProgram program = emit_gcode(sliced.layers, config);
  for (const std::string& w : sliced.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
  const std::string out = output.empty() ? std::filesystem::path(input).replace_extension(".gcode").string() : output;
  write_file(out, to_text(program));
  std::printf("layers: %zu\n", sliced.layers.size());
  std::printf("mesh volume: %.3f mm^3\n", signed_volume(mesh));
  std::printf("filament volume: %.3f mm^3\n", program.filament_volume);
  std::printf("wrote %s\n", out.c_str());
  return 0;
}

int run_serve(const RepoFlags& flags, const std::string& listen, const std::string& snapshot_dir, int interval_s) {
  ServiceOptions options;
  options.snapshot_dir = snapshot_dir;
  options.snapshot_interval = std::chrono::seconds(interval_s);
  Service service(flags.client(), options);
  const ListenAddress address = parse_listen(listen);
  std::fprintf(stderr, "remixd: serving on %s:%d (%s)\n", address.host.c_str(), address.port,
               service.repo().backend().describe().c_str());
  run_server(service, address);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"remixd: remix 3D models from a repository and export them for printing"};
  app.require_subcommand(1);

  RepoFlags repo;
  app.add_option("--fixture-dir", repo.fixture_dir, "offline repository corpus")->envname("REMIXD_FIXTURE_DIR");
  app.add_option("--repo-url", repo.base_url, "live repository base URL (http only)")->envname("REMIXD_REPO_BASE_URL");
  app.add_option("--repo-search-path", repo.http.search_path)->envname("REMIXD_REPO_SEARCH_PATH");
  app.add_option("--repo-entry-path", repo.http.entry_path)->envname("REMIXD_REPO_ENTRY_PATH");
  app.add_option("--repo-file-path", repo.http.file_path)->envname("REMIXD_REPO_FILE_PATH");
  app.add_option("--quality", repo.quality, "fraction of faces kept when auto-simplifying")
      ->envname("REMIXD_QUALITY");

  std::string query;
  std::size_t page = 0;
  auto* search = app.add_subcommand("search", "list remixable entries matching a query");
  search->add_option("query", query)->required();
  search->add_option("--page", page)->envname("REMIXD_PAGE");

  std::string entry_id;
  std::string fetch_out;
  int timeout_ms = 120'000;
  auto* fetch = app.add_subcommand("fetch", "download, repair and (if heavy) simplify one entry");
  fetch->add_option("entry-id", entry_id)->required();
  fetch->add_option("-o,--out", fetch_out, "write the prepared mesh as STL")->envname("REMIXD_FETCH_OUT");
  fetch->add_option("--timeout-ms", timeout_ms)->envname("REMIXD_TIMEOUT_MS");

  std::string script;
  std::string out_dir;
  std::string asset_dir;
  auto* replay = app.add_subcommand("replay", "run a .remix script and write its exports");
  replay->add_option("script", script)->required()->check(CLI::ExistingFile);
  replay->add_option("--out-dir", out_dir)->required()->envname("REMIXD_OUT_DIR");
  replay->add_option("--asset-dir", asset_dir, "where environment scans are looked up (default: fixture dir)")
      ->envname("REMIXD_ASSET_DIR");
  replay->add_option("--timeout-ms", timeout_ms)->envname("REMIXD_TIMEOUT_MS");

  std::string stl;
  std::string gcode_out;
  SliceConfig slice_config;
  auto* slice = app.add_subcommand("slice", "slice an STL into G-code");
  slice->add_option("stl", stl)->required()->check(CLI::ExistingFile);
  slice->add_option("-o,--out", gcode_out, "default: input with .gcode extension")->envname("REMIXD_GCODE_OUT");
  slice->add_option("--layer-height", slice_config.layer_height)->envname("REMIXD_LAYER_HEIGHT");
  slice->add_option("--extrusion-width", slice_config.extrusion_width)->envname("REMIXD_EXTRUSION_WIDTH");
  slice->add_option("--filament-diameter", slice_config.filament_diameter)->envname("REMIXD_FILAMENT_DIAMETER");
  slice->add_option("--perimeters", slice_config.perimeter_count)->envname("REMIXD_PERIMETERS");
  slice->add_option("--infill", slice_config.infill_density, "0 hollow .. 1 solid")->envname("REMIXD_INFILL");
  slice->add_flag("--support,!--no-support", slice_config.support_enabled)->envname("REMIXD_SUPPORT");
  slice->add_option("--overhang-deg", slice_config.overhang_threshold_deg)->envname("REMIXD_OVERHANG_DEG");
  slice->add_option("--nozzle-temp", slice_config.nozzle_temp)->envname("REMIXD_NOZZLE_TEMP");
  slice->add_option("--bed-temp", slice_config.bed_temp)->envname("REMIXD_BED_TEMP");

  std::string listen = "127.0.0.1:8787";
  std::string snapshot_dir;
  int snapshot_interval_s = 30;
  auto* serve = app.add_subcommand("serve", "run the REST service");
  serve->add_option("--listen", listen, "host:port")->envname("REMIXD_LISTEN");
  serve->add_option("--snapshot-dir", snapshot_dir)->envname("REMIXD_SNAPSHOT_DIR");
  serve->add_option("--snapshot-interval", snapshot_interval_s, "seconds")->envname("REMIXD_SNAPSHOT_INTERVAL");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*search) return run_search(repo, query, page);
    if (*fetch) return run_fetch(repo, entry_id, fetch_out, timeout_ms);
    if (*replay) {
      ReplayOptions options;
      options.out_dir = out_dir;
      options.asset_dir = asset_dir;
      options.download_timeout = std::chrono::milliseconds(timeout_ms);
      return run_replay(repo, script, options);
    }
    if (*slice) return run_slice(stl, gcode_out, slice_config);
    if (*serve) return run_serve(repo, listen, snapshot_dir, snapshot_interval_s);
  } catch (const Error& e) {
    std::fprintf(stderr, "remixd: %s: %s\n", std::string(error_code_name(e.code())).c_str(), e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "remixd: %s\n", e.what());
    return 1;
  }
  return 2;
}
