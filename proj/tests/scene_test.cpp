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


#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "csg_oracles.hpp"
#include "remixd/error.hpp"
#include "remixd/fixture_corpus.hpp"
#include "remixd/scene.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"
#include "test_util.hpp"
#include "undo_session.hpp"

namespace remixd {
namespace {

DownloadJob ready_job(const std::string& entry, const TriangleMesh& mesh) {
  DownloadJob job;
  job.id = "job-" + entry;
  job.entry_id = entry;
  job.title = entry;
  job.state = JobState::kReady;
  job.mesh = std::make_shared<const TriangleMesh>(mesh);
  return job;
}

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

Transform at(double x, double y, double z) { return Transform::translate(Vector3(x, y, z)); }

TriangleMesh open_box() {
  TriangleMesh m = testing::box(Vector3(-10, -10, -10), Vector3(10, 10, 10));
  m.triangles.pop_back();
  return m;
}

TEST(Scene, GatherKeepsOrderAndDuplicates) {
  Scene s;
  const TriangleMesh cube = make_primitive(CubeSpec{10});
  for (const char* id : {"planter-ribbed", "planter-faceted", "planter-tapered"}) s.gather(ready_job(id, cube));
  ASSERT_EQ(s.gathered().size(), 3u);
  EXPECT_EQ(s.gathered()[1].entry_id, "planter-faceted");
  s.gather(ready_job("planter-ribbed", cube));
  EXPECT_EQ(s.gathered().size(), 4u);
  EXPECT_EQ(s.undo_stack().size(), 4u);
}

TEST(Scene, GatherNeedsReadyJob) {
  Scene s;
  DownloadJob job = ready_job("a", make_primitive(CubeSpec{1}));
  job.state = JobState::kDownloading;
  EXPECT_EQ(code_of([&] { s.gather(job); }), ErrorCode::kJobNotReady);
  EXPECT_TRUE(s.gathered().empty());
  EXPECT_TRUE(s.undo_stack().empty());
}

TEST(Scene, RemoveGathered) {
  Scene s;
  for (const char* id : {"a", "b", "c"}) s.gather(ready_job(id, make_primitive(CubeSpec{1})));
  const Scene before = s;
  s.remove_gathered(0);
  ASSERT_EQ(s.gathered().size(), 2u);
  EXPECT_EQ(s.gathered()[0].entry_id, "b");
  EXPECT_EQ(s.gathered()[1].entry_id, "c");
  EXPECT_EQ(code_of([&] { s.remove_gathered(2); }), ErrorCode::kNotFound);
  s.undo();
  EXPECT_TRUE(scenes_equal(s, before));

  Scene one;
  one.gather(ready_job("x", make_primitive(CubeSpec{1})));
  one.remove_gathered(0);
  EXPECT_TRUE(one.gathered().empty());
}

TEST(Scene, RemovingGatheredLeavesPlacedNodes) {
  Scene s;
  s.gather(ready_job("planter-ribbed", make_primitive(CubeSpec{4})));
  const int id = s.place(0, at(0, 0, 2));
  s.remove_gathered(0);
  ASSERT_TRUE(s.has_node(id));
  EXPECT_NEAR(signed_volume(s.world_mesh(id)), 64.0, 1e-9);
}

TEST(Scene, PlaceAndUndoNeverReusesIds) {
  Scene s;
  s.gather(ready_job("planter-ribbed", make_primitive(CubeSpec{4})));
  const int a = s.place(0, at(100, 0, 0));
  EXPECT_EQ(s.nodes().size(), 1u);
  EXPECT_TRUE(std::holds_alternative<FromRepository>(s.node(a).source));
  const int cyl = s.place(CylinderSpec{20, 60}, Transform{});
  const auto& src = std::get<FromPrimitive>(s.node(cyl).source);
  EXPECT_EQ(src.spec, (PrimitiveKind{CylinderSpec{20, 60}}));
  s.undo();
  EXPECT_FALSE(s.has_node(cyl));
  const int again = s.place(CubeSpec{1}, Transform{});
  EXPECT_GT(again, cyl);
  EXPECT_EQ(code_of([&] { s.place(5, Transform{}); }), ErrorCode::kNotFound);
  EXPECT_EQ(code_of([&] { s.place(CubeSpec{-1}, Transform{}); }), ErrorCode::kInvalidArgument);
}

TEST(Scene, SetTransformAlwaysPushesUndo) {
  Scene s;
  const int id = s.place(CubeSpec{10}, Transform{});
  const Scene before = s;
  s.set_transform(id, Transform{});
  EXPECT_FALSE(scenes_equal(s, before));  // one more undo record
  EXPECT_EQ(s.undo_stack().size(), 2u);
  s.set_transform(id, Transform::uniform_scale(1.5));
  EXPECT_EQ(s.node(id).transform.scale, Vector3::Constant(1.5));
  s.undo();
  s.undo();
  EXPECT_TRUE(scenes_equal(s, before));
  EXPECT_EQ(code_of([&] { s.set_transform(99, Transform{}); }), ErrorCode::kNotFound);
  Transform bad;
  bad.scale.x() = 0;
  EXPECT_EQ(code_of([&] { s.set_transform(id, bad); }), ErrorCode::kInvalidArgument);
}

TEST(Scene, DuplicateEnvironmentBecomesModel) {
  Scene s;
  const int env = s.import_environment(write_stl(make_desk_planter_scan()), Transform{}, "desk");
  EXPECT_EQ(s.node(env).kind, NodeKind::kEnvironment);
  const int copy = s.duplicate(env);
  EXPECT_EQ(s.node(copy).kind, NodeKind::kModel);
  EXPECT_TRUE(approx_equal(s.world_mesh(copy), s.world_mesh(env), 0.0));
  EXPECT_EQ(std::get<FromDuplicate>(s.node(copy).source).of, env);

  const double v = signed_volume(s.world_mesh(copy));
  s.set_transform(copy, Transform::uniform_scale(2));
  EXPECT_NEAR(signed_volume(s.world_mesh(env)), v, 1e-9 * v);
  EXPECT_NEAR(signed_volume(s.world_mesh(copy)), 8 * v, 1e-9 * v);
}

TEST(Scene, DuplicateOfCsgResultRecordsDerivation) {
  Scene s;
  const int a = s.place(CubeSpec{10}, Transform{});
  const int b = s.place(CubeSpec{10}, at(5, 0, 0));
  const int u = s.apply_csg(CsgOp::kUnion, a, b);
  const int d = s.duplicate(u);
  EXPECT_EQ(derived_from(s.node(d).source), std::vector<int>{u});
  EXPECT_EQ(derived_from(s.node(u).source), (std::vector<int>{a, b}));
}

TEST(Scene, FrictionFitKeepsShelf) {
  Scene s;
  const int shelf = s.import_environment(write_stl(make_shelf_scan()), at(152.5, 0, 0), "shelf");
  const int cyl = s.place(CylinderSpec{20, 60}, Transform{});
  const Scene before = s;
  const int notched = s.apply_csg(CsgOp::kDifference, cyl, shelf);
  EXPECT_TRUE(s.has_node(shelf));
  EXPECT_FALSE(s.has_node(cyl));
  EXPECT_EQ(s.nodes().size(), 2u);
  const SceneNode& n = s.node(notched);
  EXPECT_TRUE(n.warnings.empty());
  EXPECT_TRUE(approx_equal(n.transform, Transform{}, 0.0));
  EXPECT_TRUE(is_watertight(*n.mesh));

  // Polygonal cylinder minus the 18 mm slab beyond x = 5.
  const auto disk = testing::regular_polygon(20, 64);
  const double expected = testing::shoelace_area(disk) * 60 - testing::shoelace_area(testing::clip_x_at_least(disk, 5)) * 18;
  EXPECT_NEAR(signed_volume(*n.mesh), expected, 1e-3 * expected);

  s.undo();
  EXPECT_TRUE(scenes_equal(s, before));
}

TEST(Scene, UnionMergesIntoOneNode) {
  Scene s;
  const int mount = s.place(CylinderSpec{20, 60}, Transform{});
  s.gather(ready_job("pendant-fox", make_animal_pendant()));
  const int pendant = s.place(0, at(0, 0, 35));
  const int merged = s.apply_csg(CsgOp::kUnion, mount, pendant);
  ASSERT_EQ(s.nodes().size(), 1u);
  EXPECT_EQ(s.nodes()[0].id, merged);
  EXPECT_TRUE(is_watertight(*s.nodes()[0].mesh));
}

TEST(Scene, IntersectionConsumesCubeAndKeepsScan) {
  Scene s;
  const int env = s.import_environment(write_stl(make_desk_planter_scan()), Transform{}, "desk");
  const int cube = s.place(CubeSpec{90}, at(60, 40, 45.5));
  const int part = s.apply_csg(CsgOp::kIntersection, env, cube);
  EXPECT_TRUE(s.has_node(env));
  EXPECT_FALSE(s.has_node(cube));
  EXPECT_TRUE(is_watertight(*s.node(part).mesh));
  EXPECT_GT(signed_volume(*s.node(part).mesh), 0.0);
}

TEST(Scene, CsgErrorsLeaveSceneUntouched) {
  Scene s;
  const int env = s.import_environment(write_stl(open_box()), Transform{}, "open");
  ASSERT_EQ(s.node(env).warnings.size(), 1u);
  const int cube = s.place(CubeSpec{5}, Transform{});
  const Scene before = s;
  EXPECT_EQ(code_of([&] { s.apply_csg(CsgOp::kDifference, cube, env); }), ErrorCode::kNotWatertight);
  EXPECT_EQ(code_of([&] { s.apply_csg(CsgOp::kUnion, cube, cube); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([&] { s.apply_csg(CsgOp::kUnion, cube, 77); }), ErrorCode::kNotFound);
  EXPECT_TRUE(scenes_equal(s, before));
  EXPECT_EQ(s.next_node_id(), before.next_node_id());
}

TEST(Scene, ImportRejectsGarbage) {
  Scene s;
  EXPECT_EQ(code_of([&] { s.import_environment("solid x\nendsolid x\n", Transform{}, "bad"); }), ErrorCode::kStlParse);
  EXPECT_TRUE(s.nodes().empty());
  EXPECT_TRUE(s.undo_stack().empty());
}

TEST(Scene, ExportRules) {
  Scene s;
  const int env = s.import_environment(write_stl(make_shelf_scan()), Transform{}, "shelf");
  EXPECT_EQ(code_of([&] { (void)s.export_node_stl(env); }), ErrorCode::kNotExportable);

  Eigen::Quaterniond q(Eigen::AngleAxisd(0.7, Vector3(1, 2, 3).normalized()));
  Transform t = at(3, -4, 5);
  t.rotation = q;
  const int id = s.place(SphereSpec{10, 3}, t);
  const std::string bytes = s.export_node_stl(id);
  EXPECT_EQ(bytes, write_stl(apply_transform(*s.node(id).mesh, t)));

  const double v1 = signed_volume(load_stl(bytes).mesh);
  t.scale = Vector3::Constant(2);
  s.set_transform(id, t);
  const double v2 = signed_volume(load_stl(s.export_node_stl(id)).mesh);
  EXPECT_NEAR(v2 / v1, 8.0, 1e-5);

  const int a = s.place(CubeSpec{1}, Transform{});
  const int b = s.place(CubeSpec{1}, at(10, 0, 0));
  const int empty = s.apply_csg(CsgOp::kIntersection, a, b);
  EXPECT_TRUE(s.node(empty).mesh->empty());
  EXPECT_EQ(code_of([&] { (void)s.export_node_stl(empty); }), ErrorCode::kEmptyMesh);
}

TEST(Scene, UndoOnFreshScene) {
  Scene s;
  EXPECT_EQ(code_of([&] { s.undo(); }), ErrorCode::kNothingToUndo);
}

TEST(Scene, MeshesAreCanonicalOnInsertion) {
  Scene s;
  const int id = s.place(SphereSpec{7, 3}, Transform{});
  EXPECT_TRUE(approx_equal(*s.node(id).mesh, canonicalize(*s.node(id).mesh), 0.0));
}

TEST(SceneUndo, RandomSequencesRestoreSnapshots) {
  std::mt19937 lengths(2024);
  for (std::uint32_t c = 0; c < 1000; ++c) {
    SCOPED_TRACE("case " + std::to_string(c));
    testing::UndoSession session(c * 7919u + 1);
    const std::string failure = session.run(1 + lengths() % 50);
    ASSERT_EQ(failure, "");
  }
}

}  // namespace
}  // namespace remixd
