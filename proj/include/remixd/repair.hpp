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
#include <string>
#include <vector>

#include "remixd/mesh.hpp"

namespace remixd {

struct RepairDiagnostics {
  std::size_t welded_vertices = 0;
  std::size_t removed_degenerate = 0;
  std::size_t removed_unreferenced = 0;
  std::size_t flipped_triangles = 0;  // by adjacency propagation
  std::size_t flipped_components = 0;  // by the signed-volume sign fix
  std::size_t non_manifold_edges = 0;
  std::size_t boundary_edges = 0;
  std::vector<std::string> warnings;

  /// Nothing was changed and nothing is left to report.
  bool clean() const {
    return welded_vertices == 0 && removed_degenerate == 0 && removed_unreferenced == 0 &&
           flipped_triangles == 0 && flipped_components == 0 && non_manifold_edges == 0 &&
           boundary_edges == 0;
  }
};

struct RepairResult {
  TriangleMesh mesh;
  RepairDiagnostics diagnostics;
};

/// Welds vertices, drops degenerate triangles, makes winding consistent
/// within each connected component and orients components outward, except
/// those nested inside an odd number of others, which bound cavities and
/// face inward. Survivor vertices keep their relative order, so an already
/// consistent mesh comes back unchanged. Defects that cannot be fixed
/// (open or non-manifold edges) are reported, never thrown.
RepairResult repair_mesh(const TriangleMesh& mesh);

/// Translation that moves the bounding-box center to the origin.
Transform centering_transform(const TriangleMesh& mesh);

}  // namespace remixd
