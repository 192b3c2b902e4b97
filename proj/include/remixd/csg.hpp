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

#pragma once

#include <cstddef>
#include <string_view>

#include "remixd/mesh.hpp"
#include "remixd/repair.hpp"

namespace remixd {

/// Difference is ordered: the first operand is the minuend.
enum class CsgOp { kUnion, kDifference, kIntersection };

std::string_view csg_op_name(CsgOp op);
/// Accepts "union", "difference"/"subtract", "intersection"/"intersect".
CsgOp parse_csg_op(std::string_view name);

/// Points closer than this to a plane count as lying on it (mm).
inline constexpr double kCsgEpsilon = 1e-5;
/// Inputs above this many triangles are rejected; decimate first.
inline constexpr std::size_t kCsgMaxTriangles = 100'000;
/// Leftover cracks with a shorter boundary than this are patched (mm).
inline constexpr double kCsgHolePerimeter = 1.0;
/// Offset applied to B when retrying a boolean that came out open (mm).
inline constexpr double kCsgNudge = 2e-4;
/// Orphaned slivers below this area are discarded (mm^2).
inline constexpr double kSliverArea = 1e-6;

struct CsgStats {
  std::size_t input_triangles_a = 0;
  std::size_t input_triangles_b = 0;
  std::size_t output_triangles = 0;
  std::size_t split_polygons = 0;
  std::size_t stitched_t_junctions = 0;
  std::size_t dropped_slivers = 0;
  std::size_t filled_holes = 0;
  std::size_t nudged_retries = 0;
  RepairDiagnostics repair;
};

struct CsgResult {
  TriangleMesh mesh;
  CsgStats stats;
};

/// Regularized Boolean of two closed, outward-oriented meshes given in a
/// common frame. An empty operand is the empty set; an empty result is a
/// valid value. Throws kNotWatertight or kMeshTooLarge.
CsgResult csg(CsgOp op, const TriangleMesh& a, const TriangleMesh& b);

/// Difference with an environment obstacle as subtrahend, e.g. cutting a
/// friction-fit notch for a shelf out of a part.
inline CsgResult subtract_fixture(const TriangleMesh& part, const TriangleMesh& obstacle) {
  return csg(CsgOp::kDifference, part, obstacle);
}

}  // namespace remixd
