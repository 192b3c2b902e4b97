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

#include <random>

#include <gtest/gtest.h>

#include "remixd/mesh.hpp"
#include "remixd/primitives.hpp"
#include "remixd/topology.hpp"
#include "test_util.hpp"

namespace remixd {
namespace {

using testing::box;

TEST(SignedVolume, UnitCube) {
  const TriangleMesh cube = make_primitive(CubeSpec{1.0});
  EXPECT_DOUBLE_EQ(signed_volume(cube), 1.0);
  EXPECT_DOUBLE_EQ(signed_volume(flipped(cube)), -1.0);
}

TEST(SignedVolume, DisjointCubesAdd) {
  const TriangleMesh cube = make_primitive(CubeSpec{1.0});
  const TriangleMesh two = merged(cube, testing::translated(cube, {10, 0, 0}));
  EXPECT_NEAR(signed_volume(two), 2.0, 1e-12);
}

TEST(SignedVolume, IndependentOfOrigin) {
  const TriangleMesh cube = make_primitive(CubeSpec{2.0});
  EXPECT_NEAR(signed_volume(testing::translated(cube, {123.0, -40.0, 7.5})), 8.0, 1e-9);
}

TEST(Bounds, CenteredCube) {
  const Aabb b = compute_bounds(make_primitive(CubeSpec{1.0}));
  EXPECT_EQ(b.min, Vector3(-0.5, -0.5, -0.5));
  EXPECT_EQ(b.max, Vector3(0.5, 0.5, 0.5));
}

TEST(Bounds, ShiftWithTranslation) {
  const TriangleMesh cube = make_primitive(CubeSpec{1.0});
  const Aabb b = compute_bounds(testing::translated(cube, {1, 2, 3}));
  EXPECT_TRUE(b.min.isApprox(Vector3(0.5, 1.5, 2.5)));
  EXPECT_TRUE(b.max.isApprox(Vector3(1.5, 2.5, 3.5)));
}

TEST(Bounds, EmptyMeshThrows) {
  try {
    compute_bounds(TriangleMesh{});
    FAIL() << "expected an error";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyMesh);
  }
}

TEST(Bounds, ContainsEveryVertex) {
  std::mt19937 rng(7);
  const TriangleMesh sphere = make_primitive(SphereSpec{3.0, 3});
  for (int trial = 0; trial < 20; ++trial) {
    Transform t;
    t.rotation = testing::random_rotation(rng);
    t.scale = Vector3(1 + trial * 0.1, 2, 0.5);
    t.translation = Vector3(trial, -trial, 3);
    const TriangleMesh m = apply_transform(sphere, t);
    const Aabb b = compute_bounds(m);
    for (const auto& v : m.vertices) ASSERT_TRUE(b.contains(v));
  }
}

TEST(Transform, IdentityLeavesMeshUnchanged) {
  const TriangleMesh m = make_primitive(PyramidSpec{2.0, 3.0});
  EXPECT_EQ(apply_transform(m, Transform::identity()), m);
}

TEST(Transform, UniformScaleCubesVolume) {
  const TriangleMesh cube = make_primitive(CubeSpec{1.0});
  EXPECT_NEAR(signed_volume(apply_transform(cube, Transform::uniform_scale(2.0))), 8.0, 1e-12);

  std::mt19937 rng(3);
  const TriangleMesh sphere = make_primitive(SphereSpec{1.5, 3});
  const double v0 = signed_volume(sphere);
  for (double s : {0.1, 0.5, 1.7, 3.0, 12.5}) {
    Transform t = Transform::uniform_scale(s);
    t.rotation = testing::random_rotation(rng);
    t.translation = Vector3(s, 2 * s, -s);
    EXPECT_NEAR(signed_volume(apply_transform(sphere, t)) / (v0 * s * s * s), 1.0, 1e-9);
  }
}

TEST(Transform, PreservesTopologyAndOrientation) {
  std::mt19937 rng(11);
  const TriangleMesh cyl = make_primitive(CylinderSpec{2.0, 5.0, 24});
  Transform t;
  t.rotation = testing::random_rotation(rng);
  t.scale = Vector3(0.5, 3.0, 1.25);
  const TriangleMesh m = apply_transform(cyl, t);
  EXPECT_EQ(m.triangles, cyl.triangles);
  EXPECT_GT(signed_volume(m), 0.0);
  EXPECT_TRUE(is_watertight(m));
}

TEST(Transform, InverseRoundTrip) {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::uniform_real_distribution<double> s(0.2, 5.0);
  const TriangleMesh sphere = make_primitive(SphereSpec{10.0, 3});
  for (int trial = 0; trial < 50; ++trial) {
    Transform t;
    t.translation = Vector3(u(rng), u(rng), u(rng));
    t.rotation = testing::random_rotation(rng);
    t.scale = Vector3(s(rng), s(rng), s(rng));
    const TriangleMesh back = apply_inverse_transform(apply_transform(sphere, t), t);
    ASSERT_TRUE(approx_equal(back, sphere, 1e-6));
  }
}

TEST(Transform, ValidationRejectsBadFields) {
  Transform t;
  EXPECT_NO_THROW(validate_transform(t));
  t.scale = Vector3(1, 0, 1);
  EXPECT_THROW(validate_transform(t), Error);
  t = Transform{};
  t.rotation = Eigen::Quaterniond(2, 0, 0, 0);
  EXPECT_THROW(validate_transform(t), Error);
  t = Transform{};
  t.translation.x() = std::nan("");
  EXPECT_THROW(validate_transform(t), Error);
}

TEST(Transform, MatrixAgreesWithApply) {
  std::mt19937 rng(5);
  Transform t;
  t.translation = Vector3(1, -2, 3);
  t.rotation = testing::random_rotation(rng);
  t.scale = Vector3(2, 3, 4);
  const Vector3 p(0.3, -0.7, 1.1);
  EXPECT_TRUE((t.matrix() * p).isApprox(t.apply(p), 1e-12));
}

TEST(Watertight, PrimitiveCube) {
  const EdgeReport r = check_watertight(make_primitive(CubeSpec{1.0}));
  EXPECT_TRUE(r.watertight);
  EXPECT_EQ(r.boundary_edges, 0u);
}

TEST(Watertight, MissingTriangleLeavesThreeBoundaryEdges) {
  TriangleMesh cube = make_primitive(CubeSpec{1.0});
  cube.triangles.pop_back();
  const EdgeReport r = check_watertight(cube);
  EXPECT_FALSE(r.watertight);
  EXPECT_EQ(r.boundary_edges, 3u);
  EXPECT_EQ(r.boundary.size(), 3u);
}

TEST(Watertight, FlippedTriangleIsMisoriented) {
  TriangleMesh cube = make_primitive(CubeSpec{1.0});
  std::swap(cube.triangles[4][1], cube.triangles[4][2]);
  const EdgeReport r = check_watertight(cube);
  EXPECT_FALSE(r.watertight);
  EXPECT_EQ(r.misoriented_edges, 3u);
}

TEST(Watertight, EmptyMeshIsNot) { EXPECT_FALSE(is_watertight(TriangleMesh{})); }

TEST(Topology, ComponentsOfDisjointBoxes) {
  const TriangleMesh m = merged(box({0, 0, 0}, {1, 1, 1}), box({5, 0, 0}, {6, 1, 1}));
  int count = 0;
  const auto labels = triangle_components(m, &count);
  EXPECT_EQ(count, 2);
  EXPECT_EQ(labels.front(), 0);
  EXPECT_EQ(labels.back(), 1);
}

TEST(Topology, WeldMapsToLowestIndex) {
  const std::vector<Vector3> pts = {{0, 0, 0}, {1, 0, 0}, {0, 0, 5e-7}, {1, 4e-7, 0}, {2, 0, 0}};
  const auto map = weld_map(pts, 1e-6);
  EXPECT_EQ(map, (std::vector<int>{0, 1, 0, 1, 4}));
}

}  // namespace
}  // namespace remixd
