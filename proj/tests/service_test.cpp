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


#include <atomic>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <thread>

#include <gtest/gtest.h>

#include "fixture_dir.hpp"
#include "httplib.h"
#include "remixd/gcode.hpp"
#include "remixd/http_backend.hpp"
#include "remixd/json_codec.hpp"
#include "remixd/scene_io.hpp"
#include "remixd/service.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

/// A Service mounted on a real server bound to an ephemeral port.
class Harness {
 public:
  explicit Harness(std::shared_ptr<RepoBackend> backend = nullptr, ServiceOptions options = {})
      : service_(std::make_shared<RepoClient>(backend ? backend
                                                      : std::make_shared<FixtureBackend>(testing::fixture_corpus())),
                 std::move(options)) {
    service_.mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~Harness() {
    server_.stop();
    thread_.join();
  }

  httplib::Client client() const {
    httplib::Client c("127.0.0.1", port_);
    c.set_read_timeout(std::chrono::seconds(120));
    return c;
  }
  Service& service() { return service_; }

 private:
  Service service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

Json post(httplib::Client& c, const std::string& path, const Json& body, int expect) {
  auto r = c.Post(path, body.dump(), "application/json");
  EXPECT_TRUE(r) << path;
  if (!r) return {};
  EXPECT_EQ(r->status, expect) << path << ": " << r->body;
  return Json::parse(r->body);
}

Json get(httplib::Client& c, const std::string& path, int expect = 200) {
  auto r = c.Get(path);
  EXPECT_TRUE(r) << path;
  if (!r) return {};
  EXPECT_EQ(r->status, expect) << path << ": " << r->body;
  return Json::parse(r->body);
}

std::string new_scene(httplib::Client& c) { return post(c, "/api/scenes", Json::object(), 201)["scene_id"]; }

double polygon_area(double r, int n) { return n / 2.0 * r * r * std::sin(2 * std::numbers::pi / n); }

TEST(Service, ListenAddressParsing) {
  EXPECT_EQ(parse_listen("0.0.0.0:9000").host, "0.0.0.0");
  EXPECT_EQ(parse_listen("0.0.0.0:9000").port, 9000);
  EXPECT_EQ(parse_listen(":81").host, "127.0.0.1");
  EXPECT_EQ(parse_listen("8080").port, 8080);
  EXPECT_THROW(parse_listen("host:port"), Error);
  EXPECT_THROW(parse_listen("host:70000"), Error);
  EXPECT_EQ(ListenAddress{}.port, 8787);
}

TEST(Service, StatusMapping) {
  EXPECT_EQ(http_status_for(ErrorCode::kInvalidArgument), 400);
  EXPECT_EQ(http_status_for(ErrorCode::kNotFound), 404);
  EXPECT_EQ(http_status_for(ErrorCode::kNotWatertight), 409);
  EXPECT_EQ(http_status_for(ErrorCode::kNothingToUndo), 409);
  EXPECT_EQ(http_status_for(ErrorCode::kBackendUnreachable), 502);
}

TEST(Service, SearchReturnsRemixablePlanters) {
  Harness h;
  auto c = h.client();
  const Json page = post(c, "/api/search", {{"query", "pot"}}, 200);
  ASSERT_FALSE(page["entries"].empty());
  for (const Json& e : page["entries"]) {
    EXPECT_TRUE(e["remix_allowed"].get<bool>());
    EXPECT_TRUE(license_allows_remix(e["license"].get<std::string>()));
    EXPECT_NE(e["id"].get<std::string>().find("planter"), std::string::npos);
  }
  const Json blank = post(c, "/api/search", {{"query", "  "}}, 400);
  EXPECT_EQ(blank["error"]["code"], "invalid_argument");
}

TEST(Service, GatherPlaceAndStreamMesh) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const Json job = post(c, "/api/gather", {{"entry_id", "planter-tapered"}}, 202);
  const Json gathered =
      post(c, "/api/gather", {{"scene_id", sid}, {"job_id", job["id"]}, {"wait_ms", 30000}}, 200);
  EXPECT_EQ(gathered["gathered_index"], 0);
  EXPECT_EQ(gathered["scene"]["gathered"].size(), 1u);
  EXPECT_EQ(get(c, "/api/jobs/" + job["id"].get<std::string>())["state"], "ready");

  const Json placed = post(c, "/api/scenes/" + sid + "/nodes",
                           {{"gathered_index", 0}, {"transform", {{"t", {10, 0, 0}}, {"s", 1.5}}}}, 201);
  const int nid = placed["node"]["id"];
  EXPECT_EQ(placed["scene"]["nodes"].size(), 1u);

  auto r = c.Get("/api/scenes/" + sid + "/nodes/" + std::to_string(nid) + "/mesh.stl");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Length"), std::to_string(r->body.size()));
  const StlLoadResult mesh = load_stl(r->body);
  EXPECT_EQ(mesh.mesh.triangle_count(), placed["node"]["triangles"].get<std::size_t>());
  EXPECT_TRUE(is_watertight(mesh.mesh));
  // Streamed in world space: scale 1.5 triples-and-a-bit the volume.
  EXPECT_NEAR(signed_volume(mesh.mesh), placed["node"]["volume"].get<double>(), 1e-3 * signed_volume(mesh.mesh));

  // Discarding from the carousel leaves the placed node alone.
  auto d = c.Delete("/api/scenes/" + sid + "/gathered/0");
  ASSERT_TRUE(d);
  EXPECT_EQ(d->status, 200);
  EXPECT_EQ(get(c, "/api/scenes/" + sid)["nodes"].size(), 1u);
}

TEST(Service, GatherBeforeReadyIsConflict) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  // The big scan takes a while to decimate; without waiting it cannot be ready.
  const Json r = post(c, "/api/gather", {{"scene_id", sid}, {"entry_id", "sculpture-scan"}}, 409);
  EXPECT_EQ(r["error"]["code"], "job_not_ready");
  EXPECT_TRUE(r["error"]["detail"].contains("state"));
}

TEST(Service, DifferenceIsNotCommutative) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const std::string base = "/api/scenes/" + sid;
  const int cube = post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", 20}}, 201)["node"]["id"];
  const int cyl =
      post(c, base + "/nodes", {{"spec", {{"primitive", "cylinder"}, {"radius", 6}, {"height", 40}}}}, 201)["node"]["id"];
  const double hole = polygon_area(6, 64);

  const Json ab = post(c, base + "/csg", {{"op", "difference"}, {"first", cube}, {"second", cyl}}, 201);
  const double v_ab = ab["node"]["volume"];
  EXPECT_NEAR(v_ab, 8000 - hole * 20, 1e-3 * v_ab);
  EXPECT_TRUE(ab["node"]["watertight"].get<bool>());
  EXPECT_EQ(ab["scene"]["nodes"].size(), 1u);

  post(c, base + "/undo", Json::object(), 200);
  const Json ba = post(c, base + "/csg", {{"op", "subtract"}, {"first", cyl}, {"second", cube}}, 201);
  const double v_ba = ba["node"]["volume"];
  EXPECT_NEAR(v_ba, hole * 20, 1e-3 * v_ba);
  EXPECT_GT(std::abs(v_ab - v_ba), 100);
}

TEST(Service, UndoOnEmptyStackIsConflict) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const Json r = post(c, "/api/scenes/" + sid + "/undo", Json::object(), 409);
  EXPECT_EQ(r["error"]["code"], "nothing_to_undo");
  EXPECT_FALSE(r["error"]["message"].get<std::string>().empty());
}

TEST(Service, ValidationAndLookupErrors) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const std::string base = "/api/scenes/" + sid;
  EXPECT_EQ(get(c, "/api/scenes/nope", 404)["error"]["code"], "not_found");
  EXPECT_EQ(get(c, "/api/jobs/job-404", 404)["error"]["code"], "not_found");
  auto bad = c.Post(base + "/nodes", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", -1}}, 400)["error"]["code"], "invalid_argument");
  EXPECT_EQ(post(c, base + "/nodes", {{"primitive", "cube"}, {"transform", {{"s", 0}}}}, 400)["error"]["code"],
            "invalid_argument");
  const int cube = post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", 10}}, 201)["node"]["id"];
  EXPECT_EQ(post(c, base + "/csg", {{"op", "xor"}, {"first", cube}, {"second", cube}}, 400)["error"]["code"],
            "invalid_argument");
  EXPECT_EQ(post(c, base + "/csg", {{"op", "union"}, {"first", cube}, {"second", 99}}, 404)["error"]["code"], "not_found");
  auto patch = c.Patch(base + "/nodes/77/transform", Json{{"t", {1, 2, 3}}}.dump(), "application/json");
  ASSERT_TRUE(patch);
  EXPECT_EQ(patch->status, 404);
  EXPECT_EQ(post(c, "/api/scenes", {{"id", sid}}, 400)["error"]["code"], "invalid_argument");
  EXPECT_EQ(post(c, "/api/scenes/" + sid + "/nodes/" + std::to_string(cube) + "/export/gcode", {{"layer_hieght", 0.1}}, 400)
                ["error"]["code"],
            "invalid_argument");
  // Every error left the scene as it was after the one successful place.
  EXPECT_EQ(get(c, base)["undo_depth"], 1);
}

TEST(Service, EnvironmentUploadAndRules) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const std::string base = "/api/scenes/" + sid;
  const std::string shelf = read_file(testing::fixture_corpus() / "environment" / "shelf.stl");
  httplib::MultipartFormDataItems items{{"stl", shelf, "shelf.stl", "application/octet-stream"},
                                        {"pose", R"({"t":[152.5,0,109]})", "", ""},
                                        {"label", "bookshelf", "", ""}};
  auto r = c.Post(base + "/environment", items);
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 201) << r->body;
  const Json env = Json::parse(r->body)["node"];
  EXPECT_EQ(env["kind"], "environment");
  EXPECT_EQ(env["label"], "bookshelf");
  EXPECT_FALSE(env["exportable"].get<bool>());
  EXPECT_NEAR(env["bounds"]["min"][0].get<double>(), 152.5 - 147.5, 1e-4);
  const std::string nid = std::to_string(env["id"].get<int>());

  // Viewable, but not downloadable or printable.
  auto view = c.Get(base + "/nodes/" + nid + "/mesh.stl");
  ASSERT_TRUE(view);
  EXPECT_EQ(view->status, 200);
  auto dl = c.Get(base + "/nodes/" + nid + "/mesh.stl?download=1");
  ASSERT_TRUE(dl);
  EXPECT_EQ(dl->status, 409);
  EXPECT_EQ(post(c, base + "/nodes/" + nid + "/export/gcode", Json::object(), 409)["error"]["code"], "not_exportable");

  // An open scan imports with a warning and then refuses CSG.
  auto open = c.Post(base + "/environment?label=scan",
                     read_file(testing::fixture_corpus() / "environment" / "open_scan.stl"), "application/octet-stream");
  ASSERT_TRUE(open);
  ASSERT_EQ(open->status, 201) << open->body;
  const Json scan = Json::parse(open->body)["node"];
  EXPECT_FALSE(scan["warnings"].empty());
  const int cube = post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", 10}}, 201)["node"]["id"];
  EXPECT_EQ(post(c, base + "/csg", {{"op", "difference"}, {"first", cube}, {"second", scan["id"]}}, 409)["error"]["code"],
            "not_watertight");

  auto garbage = c.Post(base + "/environment", std::string("solid x\nfacet nonsense\n"), "application/octet-stream");
  ASSERT_TRUE(garbage);
  EXPECT_EQ(garbage->status, 400);
}

TEST(Service, GcodeExportEchoesConfig) {
  Harness h;
  auto c = h.client();
  const std::string sid = new_scene(c);
  const std::string base = "/api/scenes/" + sid;
  const int cube = post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", 10}, {"transform", {{"t", {500, 0, 0}}}}},
                        201)["node"]["id"];
  auto r = c.Post(base + "/nodes/" + std::to_string(cube) + "/export/gcode", Json{{"layer_height", 0.25}}.dump(),
                  "application/json");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200) << r->body;
  EXPECT_EQ(r->get_header_value("X-Remixd-Layers"), "40");
  EXPECT_NE(r->body.find(";layer_height = 0.25\n"), std::string::npos);
  const ToolpathProgram p = parse_gcode(r->body);
  EXPECT_EQ(p.unknown_commands, 0u);
  EXPECT_EQ(p.layer_count, 40u);
  EXPECT_GT(p.filament_volume, 0);
}

TEST(Service, ThumbnailsArePng) {
  Harness h;
  auto c = h.client();
  auto r = c.Get("/api/thumbnails/planter-ribbed");
  ASSERT_TRUE(r);
  ASSERT_EQ(r->status, 200);
  EXPECT_EQ(r->get_header_value("Content-Type"), "image/png");
  EXPECT_EQ(r->body.substr(1, 3), "PNG");
  auto missing = c.Get("/api/thumbnails/nothing-here");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
}

TEST(Service, UnreachableBackendIs502) {
  // Grab a free port and release it so nothing is listening there.
  int port = 0;
  {
    httplib::Server probe;
    port = probe.bind_to_any_port("127.0.0.1");
  }
  HttpBackendConfig cfg;
  cfg.base_url = "http://127.0.0.1:" + std::to_string(port);
  cfg.timeout = std::chrono::seconds(2);
  Harness h(std::make_shared<HttpBackend>(cfg));
  auto c = h.client();
  EXPECT_EQ(post(c, "/api/search", {{"query", "pot"}}, 502)["error"]["code"], "backend_unreachable");
}

TEST(Service, ConcurrentMutationsLinearize) {
  Harness h;
  const std::string sid = [&] {
    auto c = h.client();
    return new_scene(c);
  }();
  const std::string base = "/api/scenes/" + sid;
  int first = 0;
  {
    auto c = h.client();
    first = post(c, base + "/nodes", {{"primitive", "cube"}, {"edge", 5}}, 201)["node"]["id"];
  }
  std::atomic<int> accepted{1};
  std::atomic<bool> done{false};
  std::atomic<int> reads{0};
  std::vector<std::thread> writers;
  for (int t = 0; t < 6; ++t) {
    writers.emplace_back([&, t] {
      auto c = h.client();
      for (int i = 0; i < 15; ++i) {
        httplib::Result r;
        switch ((t + i) % 3) {
          case 0:
            r = c.Patch(base + "/nodes/" + std::to_string(first) + "/transform",
                        Json{{"t", {t, i, 0}}}.dump(), "application/json");
            break;
          case 1:
            r = c.Post(base + "/nodes", Json{{"primitive", "cube"}, {"edge", 1 + i}}.dump(), "application/json");
            break;
          default:
            r = c.Post(base + "/nodes/" + std::to_string(first) + "/duplicate", "", "application/json");
        }
        if (r && r->status / 100 == 2) ++accepted;
      }
    });
  }
  std::thread reader([&] {
    auto c = h.client();
    while (!done) {
      auto r = c.Get(base);
      if (r && r->status == 200) {
        const Json s = Json::parse(r->body);
        // Every published snapshot is self-consistent.
        EXPECT_EQ(s["undo_depth"].get<std::size_t>(), s["undo"].size());
        ++reads;
      }
    }
  });
  for (auto& w : writers) w.join();
  done = true;
  reader.join();
  auto c = h.client();
  const Json final_state = get(c, base);
  EXPECT_EQ(accepted.load(), 1 + 6 * 15);
  EXPECT_EQ(final_state["undo_depth"].get<int>(), accepted.load());
  EXPECT_GT(reads.load(), 0);
}

TEST(Service, ScenesPersistAcrossRestarts) {
  const auto dir = std::filesystem::temp_directory_path() / ("remixd-snap-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  ServiceOptions opts;
  opts.snapshot_dir = dir;
  opts.snapshot_interval = std::chrono::milliseconds(50);
  std::shared_ptr<const Scene> before;
  {
    Harness h(nullptr, opts);
    auto c = h.client();
    post(c, "/api/scenes", {{"id", "desk"}}, 201);
    const int n = post(c, "/api/scenes/desk/nodes", {{"primitive", "sphere"}, {"radius", 4}}, 201)["node"]["id"];
    auto p = c.Patch("/api/scenes/desk/nodes/" + std::to_string(n) + "/transform", R"({"t":[1,2,3]})",
                     "application/json");
    ASSERT_TRUE(p);
    before = h.service().snapshot("desk");
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
    while (!std::filesystem::exists(dir / "desk.scene.json") && std::chrono::steady_clock::now() < deadline) {
      std::this_thread::sleep_for(std::chrono::milliseconds(10));
    }
    EXPECT_TRUE(std::filesystem::exists(dir / "desk.scene.json"));
  }
  {
    Harness h(nullptr, opts);
    const auto after = h.service().snapshot("desk");
    EXPECT_TRUE(scenes_equal(*before, *after));
    auto c = h.client();
    EXPECT_EQ(get(c, "/api/scenes/desk")["undo_depth"], 2);
    EXPECT_NE(h.service().create_scene(), "desk");
  }
  std::filesystem::remove_all(dir);
}

// ---- live backend against a stand-in repository ----

class FakeRepository {
 public:
  FakeRepository() {
    const auto dir = testing::fixture_corpus();
    const Json index = Json::parse(read_file(dir / "index.json"));
    server_.Get("/v1/search", [index](const httplib::Request& req, httplib::Response& res) {
      const std::string q = req.get_param_value("q");
      Json out = Json::array();
      for (const Json& e : index) {
        if (e["title"].get<std::string>().find(q) != std::string::npos || e.dump().find("\"" + q + "\"") != std::string::npos) {
          out.push_back(e);
        }
      }
      res.set_content(out.dump(), "application/json");
    });
    server_.Get(R"(/v1/entries/([^/]+))", [index](const httplib::Request& req, httplib::Response& res) {
      for (const Json& e : index) {
        if (e["id"] == req.matches[1].str()) {
          res.set_content(e.dump(), "application/json");
          return;
        }
      }
      res.status = 404;
    });
    server_.Get(R"(/v1/files/(.+))", [dir](const httplib::Request& req, httplib::Response& res) {
      const auto p = dir / req.matches[1].str();
      if (!std::filesystem::exists(p)) {
        res.status = 404;
        return;
      }
      res.set_content(read_file(p), "application/octet-stream");
    });
    server_.Get("/broken/search", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("[{\"id\": 5}]", "application/json");
    });
    server_.Get("/down/search", [](const httplib::Request&, httplib::Response& res) { res.status = 503; });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeRepository() {
    server_.stop();
    thread_.join();
  }
  std::string url(const std::string& prefix) const { return "http://127.0.0.1:" + std::to_string(port_) + prefix; }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

HttpBackendConfig live_config(const std::string& base) {
  HttpBackendConfig c;
  c.base_url = base;
  c.search_path = "/search?q={query}&page={page}";
  return c;
}

TEST(HttpBackend, SearchAndDownloadThroughClient) {
  FakeRepository repo;
  RepoClient client(std::make_shared<HttpBackend>(live_config(repo.url("/v1"))));
  const SearchPage page = client.search("hook");
  ASSERT_FALSE(page.entries.empty());
  for (const RepoEntry& e : page.entries) {
    EXPECT_TRUE(e.remix_allowed) << e.id;
    EXPECT_NE(e.id, "hook-premium");
  }
  const DownloadJob job = client.enqueue_download("hook-wire");
  const DownloadJob done = client.wait_job(job.id, std::chrono::seconds(30));
  ASSERT_EQ(done.state, JobState::kReady) << done.failure_reason;
  EXPECT_TRUE(is_watertight(*done.mesh));
  EXPECT_THROW(client.enqueue_download("no-such-entry"), Error);
  EXPECT_EQ(client.thumbnail("hook-wire").substr(1, 3), "PNG");
}

TEST(HttpBackend, ErrorsAreClassified) {
  FakeRepository repo;
  try {
    HttpBackend(live_config(repo.url("/broken"))).search("x", 0, 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendMalformed);
  }
  try {
    HttpBackend(live_config(repo.url("/down"))).search("x", 0, 20);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBackendUnreachable);
  }
  EXPECT_THROW(HttpBackend(live_config("ftp://example")), Error);
  EXPECT_EQ(percent_encode("a b/ü"), "a%20b%2F%C3%BC");
}

TEST(HttpBackend, EnvironmentSelectsBackend) {
  ::setenv("REMIXD_REPO_BASE_URL", "http://127.0.0.1:1/x", 1);
  EXPECT_NE(backend_from_environment()->describe().find("live"), std::string::npos);
  ::unsetenv("REMIXD_REPO_BASE_URL");
  ::setenv("REMIXD_FIXTURE_DIR", testing::fixture_corpus().c_str(), 1);
  EXPECT_EQ(backend_from_environment()->describe().find("live"), std::string::npos);
}

}  // namespace
}  // namespace remixd
