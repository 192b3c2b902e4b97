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


#include <chrono>
#include <random>

#include <gtest/gtest.h>

#include "fixture_dir.hpp"
#include "remixd/error.hpp"
#include "remixd/repo.hpp"
#include "remixd/scene_io.hpp"
#include "remixd/stl.hpp"

namespace remixd {
namespace {

using namespace std::chrono_literals;

ErrorCode code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kInvalidArgument;
}

// Pot search, three planters gathered, one placed on the desk, a cube cut out
// of the scanned planter and scaled.
Scene walkthrough_one_scene() {
  RepoClient client(std::make_shared<FixtureBackend>(testing::fixture_corpus()));
  Scene s("desk");
  for (const RepoEntry& e : client.search("pot").entries) {
    if (s.gathered().size() == 3) break;
    s.gather(client.wait_job(client.enqueue_download(e).id, 30s));
  }
  const int desk = s.import_environment(read_file((testing::fixture_corpus() / "environment/desk_planter.stl").string()),
                                        Transform{}, "desk");
  Transform on_desk = Transform::translate(Vector3(-60, 0, 0));
  on_desk.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.4, Vector3::UnitZ()));
  const int pot = s.place(1, on_desk);
  s.set_transform(pot, Transform::uniform_scale(1.5));
  const int cube = s.place(CubeSpec{90}, Transform::translate(Vector3(60, 40, 45.5)));
  const int cut = s.apply_csg(CsgOp::kIntersection, desk, cube);
  const int copy = s.duplicate(cut);
  Transform bigger = Transform::uniform_scale(1.2);
  bigger.translation = Vector3(0, -80, 0);
  s.set_transform(copy, bigger);
  s.remove_gathered(2);
  return s;
}

TEST(Base64, RoundtripAndRejects) {
  std::mt19937 rng(5);
  for (std::size_t n = 0; n < 40; ++n) {
    std::string bytes(n, '\0');
    for (char& c : bytes) c = static_cast<char>(rng());
    const std::string text = base64_encode(bytes);
    EXPECT_EQ(text.size(), (n + 2) / 3 * 4);
    EXPECT_EQ(base64_decode(text), bytes);
  }
  EXPECT_EQ(base64_encode("Man"), "TWFu");
  EXPECT_EQ(base64_encode("Ma"), "TWE=");
  EXPECT_EQ(code_of([] { base64_decode("TW$u"); }), ErrorCode::kCorruptPayload);
  EXPECT_EQ(code_of([] { base64_decode("TWE"); }), ErrorCode::kCorruptPayload);
}

TEST(SceneFile, EmptySceneRoundtrip) {
  const Scene s("blank");
  const Scene back = load_scene(save_scene(s));
  EXPECT_TRUE(scenes_equal(s, back));
  EXPECT_EQ(back.next_node_id(), s.next_node_id());
}

TEST(SceneFile, WalkthroughSceneRoundtrip) {
  const Scene s = walkthrough_one_scene();
  ASSERT_EQ(s.gathered().size(), 2u);
  ASSERT_EQ(s.undo_stack().size(), 11u);
  const std::string bytes = save_scene(s);
  Scene back = load_scene(bytes);
  EXPECT_TRUE(scenes_equal(s, back, 0.0));
  EXPECT_EQ(back.next_node_id(), s.next_node_id());
  EXPECT_EQ(save_scene(back), bytes);

  // The restored stack still unwinds to nothing.
  Scene original = s;
  while (!back.undo_stack().empty()) {
    back.undo();
    original.undo();
    ASSERT_TRUE(scenes_equal(back, original));
  }
  EXPECT_TRUE(back.nodes().empty());
}

TEST(SceneFile, Layout) {
  Scene s("layout");
  Transform t = Transform::translate(Vector3(1, 2, 3));
  t.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.5, Vector3::UnitX()));
  t.scale = Vector3(1, 2, 3);
  const int a = s.place(CubeSpec{2}, t);
  const int b = s.place(CubeSpec{1}, Transform::translate(Vector3(50, 0, 0)));
  s.apply_csg(CsgOp::kIntersection, a, b);
  s.undo();
  const Json j = Json::parse(save_scene(s));
  EXPECT_EQ(j["version"], 1);
  EXPECT_EQ(j["scene_id"], "layout");
  const Json& node = j["nodes"][0];
  EXPECT_EQ(node["kind"], "model");
  EXPECT_EQ(node["source"]["type"], "primitive");
  EXPECT_EQ(node["source"]["spec"]["primitive"], "cube");
  EXPECT_EQ(node["transform"]["t"], Json({1.0, 2.0, 3.0}));
  EXPECT_DOUBLE_EQ(node["transform"]["q"][0].get<double>(), std::cos(0.25));  // w first
  EXPECT_DOUBLE_EQ(node["transform"]["q"][1].get<double>(), std::sin(0.25));
  EXPECT_EQ(node["transform"]["s"], Json({1.0, 2.0, 3.0}));
  const std::string stl = base64_decode(node["mesh_stl_b64"].get<std::string>());
  EXPECT_EQ(stl.size(), 84u + 50u * 12u);

  s.apply_csg(CsgOp::kIntersection, a, b);
  const Json empty = Json::parse(save_scene(s));
  EXPECT_EQ(empty["nodes"][0]["mesh_stl_b64"], "");
  EXPECT_EQ(empty["undo"][2]["tag"], "csg");
  EXPECT_TRUE(scenes_equal(load_scene(save_scene(s)), s));
}

TEST(SceneFile, CorruptAndVersionErrors) {
  Scene s("x");
  s.place(SphereSpec{3, 3}, Transform{});
  const std::string bytes = save_scene(s);
  EXPECT_EQ(code_of([&] { load_scene(bytes.substr(0, bytes.size() / 2)); }), ErrorCode::kCorruptPayload);
  EXPECT_EQ(code_of([&] { load_scene(""); }), ErrorCode::kCorruptPayload);

  Json j = Json::parse(bytes);
  Json v2 = j;
  v2["version"] = 2;
  EXPECT_EQ(code_of([&] { load_scene(v2.dump()); }), ErrorCode::kVersionMismatch);

  Json chopped = j;
  std::string b64 = chopped["nodes"][0]["mesh_stl_b64"];
  chopped["nodes"][0]["mesh_stl_b64"] = b64.substr(0, b64.size() - 400);
  EXPECT_EQ(code_of([&] { load_scene(chopped.dump()); }), ErrorCode::kCorruptPayload);

  Json dup = j;
  dup["nodes"].push_back(dup["nodes"][0]);
  EXPECT_EQ(code_of([&] { load_scene(dup.dump()); }), ErrorCode::kCorruptPayload);

  Json badq = j;
  badq["nodes"][0]["transform"]["q"] = Json({0, 0, 0, 0});
  EXPECT_EQ(code_of([&] { load_scene(badq.dump()); }), ErrorCode::kCorruptPayload);

  Json no_undo = j;
  no_undo.erase("undo");
  EXPECT_EQ(code_of([&] { load_scene(no_undo.dump()); }), ErrorCode::kCorruptPayload);
}

TEST(SceneFile, SharedMeshesStayShared) {
  Scene s;
  const int a = s.place(SphereSpec{5, 4}, Transform{});
  s.duplicate(a);
  const Scene back = load_scene(save_scene(s));
  EXPECT_EQ(back.nodes()[0].mesh, back.nodes()[1].mesh);
}

TEST(TransformJson, RequestForms) {
  const Transform t = transform_from_json(Json{{"t", {1, 2, 3}}, {"s", 1.5}, {"euler_deg", {0, 0, 90}}},
                                          ErrorCode::kInvalidArgument);
  EXPECT_TRUE(t.scale.isApprox(Vector3::Constant(1.5)));
  EXPECT_TRUE(t.apply(Vector3(1, 0, 0)).isApprox(Vector3(1, 3.5, 3), 1e-12));
  const Transform n = transform_from_json(Json{{"q", {2, 0, 0, 0}}}, ErrorCode::kInvalidArgument);
  EXPECT_TRUE(n.valid());
  EXPECT_EQ(code_of([] { transform_from_json(Json{{"s", {1, -1, 1}}}, ErrorCode::kInvalidArgument); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { transform_from_json(Json{{"t", {1, 2}}}, ErrorCode::kInvalidArgument); }),
            ErrorCode::kInvalidArgument);
}

TEST(PrimitiveJson, Roundtrip) {
  for (const PrimitiveKind& k : {PrimitiveKind{CubeSpec{3}}, PrimitiveKind{SphereSpec{2, 5}},
                                 PrimitiveKind{PyramidSpec{4, 7}}, PrimitiveKind{CylinderSpec{20, 60, 48}}}) {
    EXPECT_EQ(primitive_from_json(to_json(k), ErrorCode::kInvalidArgument), k);
  }
  EXPECT_EQ(code_of([] { primitive_from_json(Json{{"primitive", "torus"}}, ErrorCode::kInvalidArgument); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(code_of([] { primitive_from_json(Json{{"primitive", "cube"}, {"edge", -2}}, ErrorCode::kInvalidArgument); }),
            ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace remixd
