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

#include <gtest/gtest.h>

#include "remixd/primitives.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

TEST(Primitives, CubeVolumeExact) {
  EXPECT_EQ(signed_volume(make_primitive(CubeSpec{2.0})), 8.0);
}

TEST(Primitives, CylinderVolumeWithinTessellationDeficit) {
  const TriangleMesh cyl = make_primitive(CylinderSpec{5.0, 10.0, 64});
  const double analytic = std::numbers::pi * 25.0 * 10.0;
  // An inscribed n-gon has area (n/2) r^2 sin(2 pi / n).
  const double n = 64;
  const double polygonal = n / 2 * 25.0 * std::sin(2 * std::numbers::pi / n) * 10.0;
  EXPECT_NEAR(signed_volume(cyl), polygonal, 1e-9);
  EXPECT_LT(std::abs(signed_volume(cyl) - analytic) / analytic, 0.005);
}

TEST(Primitives, PyramidVolume) {
  EXPECT_NEAR(signed_volume(make_primitive(PyramidSpec{3.0, 4.0})), 3.0 * 3.0 * 4.0 / 3.0, 1e-12);
}

TEST(Primitives, SphereWatertightAndClose) {
  const TriangleMesh s = make_primitive(SphereSpec{1.0, 3});
  EXPECT_EQ(s.triangle_count(), 1280u);
  EXPECT_TRUE(is_watertight(s));
  const double v = signed_volume(s);
  EXPECT_LT(v, 4.0 / 3.0 * std::numbers::pi);
  EXPECT_GT(v, 0.98 * 4.0 / 3.0 * std::numbers::pi);
}

TEST(Primitives, AllWatertightPositiveAndCentered) {
  for (const PrimitiveKind& kind : {PrimitiveKind{CubeSpec{1.5}}, PrimitiveKind{SphereSpec{2.0, 4}},
                                    PrimitiveKind{PyramidSpec{2.0, 5.0}}, PrimitiveKind{CylinderSpec{1.0, 2.0, 4}},
                                    PrimitiveKind{CylinderSpec{20.0, 60.0, 64}}}) {
    const TriangleMesh m = make_primitive(kind);
    EXPECT_TRUE(is_watertight(m)) << primitive_name(kind);
    EXPECT_GT(signed_volume(m), 0.0) << primitive_name(kind);
    EXPECT_TRUE(compute_bounds(m).center().isZero(1e-12)) << primitive_name(kind);
  }
}

TEST(Primitives, OddCylinderCenteredOnAxis) {
  const TriangleMesh m = make_primitive(CylinderSpec{1.0, 2.0, 3});
  EXPECT_TRUE(is_watertight(m));
  EXPECT_GT(signed_volume(m), 0.0);
  const Aabb b = compute_bounds(m);
  EXPECT_NEAR(b.center().z(), 0.0, 1e-12);
  EXPECT_NEAR(b.max.x(), 1.0, 1e-12);
}

TEST(Primitives, InvalidSpecsRejected) {
  EXPECT_THROW(make_primitive(CubeSpec{0.0}), Error);
  EXPECT_THROW(make_primitive(SphereSpec{1.0, 2}), Error);
  EXPECT_THROW(make_primitive(PyramidSpec{1.0, -1.0}), Error);
  EXPECT_THROW(make_primitive(CylinderSpec{1.0, 1.0, 2}), Error);
  EXPECT_THROW(make_primitive(CylinderSpec{std::nan(""), 1.0, 8}), Error);
}

TEST(Primitives, Names) {
  EXPECT_EQ(primitive_name(CylinderSpec{}), "cylinder");
  EXPECT_EQ(primitive_name(PyramidSpec{}), "pyramid");
}

}  // namespace
}  // namespace remixd
