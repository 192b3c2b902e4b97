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

#include <unistd.h>

#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "fixture_dir.hpp"
#include "remixd/error.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"
#include "walkthrough_oracle.hpp"

namespace remixd {
namespace {

namespace fs = std::filesystem;

class ReplayTest : public ::testing::Test {
 protected:
  ReplayTest() : repo_(std::make_shared<FixtureBackend>(testing::fixture_corpus())) {}

  void TearDown() override { fs::remove_all(root_); }

  ReplayResult run(const Json& script, const std::string& name) {
    ReplayOptions o;
    o.out_dir = root_ / name;
    o.asset_dir = testing::fixture_corpus();
    return replay_script(script, repo_, o);
  }

  ReplayResult run_file(const std::string& file, const std::string& out) {
    const fs::path path = testing::walkthrough_dir() / file;
    ReplayOptions o;
    o.out_dir = root_ / out;
    o.asset_dir = testing::fixture_corpus();
    o.script_dir = path.parent_path();
    return replay_script(load_script(path), repo_, o);
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  template <typename Fn>
  static ErrorCode code_of(Fn&& fn, std::string* message = nullptr) {
    try {
      fn();
    } catch (const Error& e) {
      if (message) *message = e.what();
      return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::kInvalidArgument;
  }

  RepoClient repo_;
  fs::path root_ = fs::temp_directory_path() / ("remixd-replay-" + std::to_string(::getpid()));
};

const char* const kWalkthroughs[] = {"walkthrough1_path1.remix", "walkthrough1_path2.remix",
                                     "walkthrough1_path3.remix", "walkthrough2_path1.remix",
                                     "walkthrough2_path2.remix", "walkthrough2_path3.remix"};

TEST_F(ReplayTest, WalkthroughsExportWatertightAndRepeatBitwise) {
  for (const char* file : kWalkthroughs) {
    SCOPED_TRACE(file);
    const ReplayResult first = run_file(file, "first");
    const ReplayResult second = run_file(file, "second");
    int stl = 0;
    for (const Json& e : first.report["exports"]) {
      const std::string name = e["file"];
      const std::string a = slurp(root_ / "first" / name);
      EXPECT_FALSE(a.empty());
      EXPECT_EQ(a, slurp(root_ / "second" / name)) << name;
      if (e["kind"] == "stl") {
        ++stl;
        const TriangleMesh m = load_stl(a).mesh;
        EXPECT_GT(m.triangle_count(), 0u);
        EXPECT_TRUE(is_watertight(m)) << name;
        EXPECT_GT(signed_volume(m), 0);
      } else {
        EXPECT_GT(e["layers"].get<int>(), 0);
      }
    }
    EXPECT_GE(stl, 1);
    EXPECT_TRUE(scenes_equal(first.scene, second.scene));
    fs::remove_all(root_);
  }
}

TEST_F(ReplayTest, HangerMatchesNotchedCylinderPlusPendant) {
  const DownloadJob job = repo_.wait_job(repo_.enqueue_download("pendant-fox").id, std::chrono::seconds(60));
  ASSERT_EQ(job.state, JobState::kReady);
  // The oracle assumes only the tab rises above z = -5 in pendant space.
  for (const Vector3& v : job.mesh->vertices) {
    if (v.z() > -5) {
      ASSERT_LE(std::abs(v.x()), 5 + 1e-6);
      ASSERT_LE(std::abs(v.y()), 3 + 1e-6);
    }
  }
  const ReplayResult r = run_file("walkthrough2_path2.remix", "hanger");
  const TriangleMesh hanger = load_stl(slurp(root_ / "hanger" / "hanger.stl")).mesh;
  const double expected = testing::hanger_volume(signed_volume(*job.mesh));
  EXPECT_NEAR(signed_volume(hanger), expected, 1e-3 * expected);

  // Both operands of each boolean were models, and the shelf scan survives.
  int environment = 0;
  for (const SceneNode& n : r.scene.nodes()) environment += n.kind == NodeKind::kEnvironment;
  EXPECT_EQ(environment, 1);
  EXPECT_EQ(r.scene.nodes().size(), 2u);
}

TEST_F(ReplayTest, IntersectionKeepsScanAndConsumesCube) {
  const ReplayResult r = run_file("walkthrough1_path3.remix", "w1p3");
  ASSERT_EQ(r.scene.nodes().size(), 3u);  // scan, extracted planter, its copy
  EXPECT_EQ(r.scene.nodes()[0].kind, NodeKind::kEnvironment);
  // The extracted planter: 40-gon r38 between the cube's floor (z = 0.5)
  // and the planter's rim (z = 75).
  const testing::Polygon2 ring = testing::regular_polygon(38, 40);
  const double planter = testing::shoelace_area(ring) * 74.5;
  EXPECT_NEAR(signed_volume(*r.scene.nodes()[1].mesh), planter, 1e-3 * planter);
  EXPECT_NEAR(signed_volume(r.scene.world_mesh(r.scene.nodes()[2].id)), planter * 1.331, 1e-3 * planter);
}

TEST_F(ReplayTest, ReportCountsStepsAndExports) {
  const Json script = Json::parse(R"([
    {"op": "place", "primitive": "cube", "edge": 10, "as": "c"},
    {"op": "place", "primitive": "sphere", "radius": 4, "transform": {"t": [5, 0, 0]}, "as": "s"},
    {"op": "csg", "operation": "union", "first": "c", "second": "s", "as": "u"},
    {"op": "undo"},
    {"op": "export_stl", "node": "c", "file": "cube.stl"},
    {"op": "export_gcode", "node": 1, "file": "cube.gcode"}
  ])");
  const ReplayResult r = run(script, "report");
  EXPECT_EQ(r.report["steps"].size(), 6u);
  EXPECT_EQ(r.report["nodes"], 2);
  EXPECT_EQ(r.report["undo_depth"], 2);
  ASSERT_EQ(r.report["exports"].size(), 2u);
  EXPECT_EQ(r.report["exports"][0]["triangles"], 12);
  EXPECT_NEAR(r.report["exports"][0]["volume"].get<double>(), 1000, 1e-3);
  EXPECT_EQ(r.report["exports"][1]["layers"], 50);
  EXPECT_TRUE(fs::exists(root_ / "report" / "report.json"));
  EXPECT_EQ(Json::parse(slurp(root_ / "report" / "report.json"))["nodes"], 2);
  EXPECT_EQ(r.outputs.size(), 2u);
}

TEST_F(ReplayTest, ErrorsNameTheStep) {
  std::string message;
  EXPECT_EQ(code_of([&] { run(Json::parse(R"([{"op": "undo"}])"), "e1"); }, &message), ErrorCode::kNothingToUndo);
  EXPECT_NE(message.find("step 1 (undo)"), std::string::npos) << message;

  EXPECT_EQ(code_of([&] { run(Json::parse(R"([{"op": "place", "primitive": "cube"}, {"op": "teleport"}])"), "e2"); },
                    &message),
            ErrorCode::kInvalidArgument);
  EXPECT_NE(message.find("step 2"), std::string::npos) << message;

  EXPECT_EQ(code_of([&] { run(Json::parse(R"([{"op": "duplicate", "node": "ghost"}])"), "e3"); }),
            ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { run(Json::parse(R"({"op": "undo"})"), "e4"); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              run(Json::parse(R"([{"op": "place", "primitive": "cube"}, {"op": "export_stl", "node": 1, "file": "../x.stl"}])"),
                  "e5");
            }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] {
              run(Json::parse(R"([{"op": "import_environment", "path": "environment/shelf.stl"},
                                  {"op": "export_gcode", "node": 1, "file": "shelf.gcode"}])"),
                  "e6");
            }),
            ErrorCode::kNotExportable);
  EXPECT_EQ(code_of([&] { run(Json::parse(R"([{"op": "import_environment", "path": "nowhere.stl"}])"), "e7"); }),
            ErrorCode::kNotFound);
}

TEST_F(ReplayTest, GatherOfBrokenEntryFailsTheStep) {
  // A truncated download leaves a failed job, which the scene refuses.
  std::string message;
  const ErrorCode code = code_of([&] { run(Json::parse(R"([{"op": "gather", "entry_id": "vase-cracked"}])"), "g"); }, &message);
  EXPECT_EQ(code, ErrorCode::kJobNotReady);
  EXPECT_NE(message.find("step 1 (gather): download of vase-cracked failed"), std::string::npos) << message;
}

TEST_F(ReplayTest, LoadScriptReportsBadFiles) {
  fs::create_directories(root_);
  EXPECT_EQ(code_of([&] { load_script(root_ / "missing.remix"); }), ErrorCode::kNotFound);
  std::ofstream(root_ / "bad.remix") << "[{\"op\": ";
  EXPECT_EQ(code_of([&] { load_script(root_ / "bad.remix"); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace remixd
