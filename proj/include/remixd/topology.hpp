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
#include <cstdint>
#include <utility>
#include <vector>

#include "remixd/mesh.hpp"

namespace remixd {

/// Welding tolerance used by loaders and repair (mm).
inline constexpr double kWeldTolerance = 1e-6;
/// Triangles below this area (mm^2) count as degenerate.
inline constexpr double kDegenerateArea = 1e-9;

/// Maps every point to the lowest-indexed point within `tol` of it
/// (greedy, in index order). out[i] <= i always.
std::vector<int> weld_map(const std::vector<Vector3>& points, double tol);

/// Drops vertices no triangle references, keeping the survivors' order.
TriangleMesh compact(const TriangleMesh& mesh);

struct EdgeReport {
  bool watertight = false;
  std::size_t boundary_edges = 0;      // used by one triangle
  std::size_t non_manifold_edges = 0;  // used by three or more
  std::size_t misoriented_edges = 0;   // two users, same direction
  std::vector<std::pair<int, int>> boundary;
};

/// Watertight iff every undirected edge has exactly two users traversing
/// it in opposite directions.
EdgeReport check_watertight(const TriangleMesh& mesh);

inline bool is_watertight(const TriangleMesh& mesh) { return check_watertight(mesh).watertight; }

/// One undirected edge use. Sorting a list of these groups uses by edge.
struct EdgeUse {
  int lo;
  int hi;
  int triangle;
  bool forward;  // triangle traverses lo -> hi

  auto key() const { return std::pair(lo, hi); }
};

std::vector<EdgeUse> edge_uses(const TriangleMesh& mesh);

/// Component label per triangle; triangles sharing an edge share a label.
/// Labels are dense and ordered by lowest member triangle.
std::vector<int> triangle_components(const TriangleMesh& mesh, int* count = nullptr);

}  // namespace remixd
