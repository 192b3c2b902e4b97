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

#include "remixd/repair.hpp"

#include <cmath>
#include <deque>
#include <numbers>

#include "remixd/topology.hpp"

namespace remixd {
namespace {

/// Signed solid angle of triangle (a, b, c) seen from the origin
/// (Van Oosterom and Strackee).
double triangle_solid_angle(const Vector3& a, const Vector3& b, const Vector3& c) {
  const double la = a.norm(), lb = b.norm(), lc = c.norm();
  const double numerator = a.dot(b.cross(c));
  const double denominator = la * lb * lc + a.dot(b) * lc + b.dot(c) * la + c.dot(a) * lb;
  return 2 * std::atan2(numerator, denominator);
}

}  // namespace

void validate_transform(const Transform& t) {
  if (!t.translation.allFinite()) throw Error(ErrorCode::kInvalidArgument, "transform translation is not finite");
  if (!t.rotation.coeffs().allFinite() || std::abs(t.rotation.norm() - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "transform rotation is not a unit quaternion");
  }
  if (!t.scale.allFinite() || (t.scale.array() <= 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "transform scale factors must be positive");
  }
}

RepairResult repair_mesh(const TriangleMesh& input) {
  RepairResult result;
  RepairDiagnostics& diag = result.diagnostics;
  const int n = static_cast<int>(input.vertices.size());
  for (const auto& v : input.vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::kInvalidArgument, "mesh has a non-finite vertex coordinate");
  }

  const std::vector<int> rep = weld_map(input.vertices, kWeldTolerance);
  for (int i = 0; i < n; ++i) diag.welded_vertices += rep[static_cast<std::size_t>(i)] != i;

  TriangleMesh welded;
  welded.vertices = input.vertices;
  welded.triangles.reserve(input.triangles.size());
  for (const auto& t : input.triangles) {
    if ((t.array() < 0).any() || (t.array() >= n).any()) {
      throw Error(ErrorCode::kInvalidArgument, "triangle index out of range");
    }
    const Triangle w(rep[static_cast<std::size_t>(t[0])], rep[static_cast<std::size_t>(t[1])],
                     rep[static_cast<std::size_t>(t[2])]);
    if (w[0] == w[1] || w[1] == w[2] || w[0] == w[2] ||
        triangle_area(welded.vertices[static_cast<std::size_t>(w[0])], welded.vertices[static_cast<std::size_t>(w[1])],
                      welded.vertices[static_cast<std::size_t>(w[2])]) < kDegenerateArea) {
      ++diag.removed_degenerate;
      continue;
    }
    welded.triangles.push_back(w);
  }
  TriangleMesh mesh = compact(welded);
  diag.removed_unreferenced = input.vertices.size() - mesh.vertices.size() - diag.welded_vertices;

  // Orientation propagation across manifold edges.
  const std::size_t nt = mesh.triangles.size();
  const auto uses = edge_uses(mesh);
  std::vector<std::vector<std::pair<int, bool>>> neighbors(nt);  // (triangle, same direction)
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    if (j - i == 2) {
      const bool same = uses[i].forward == uses[i + 1].forward;
      neighbors[static_cast<std::size_t>(uses[i].triangle)].emplace_back(uses[i + 1].triangle, same);
      neighbors[static_cast<std::size_t>(uses[i + 1].triangle)].emplace_back(uses[i].triangle, same);
    } else if (j - i == 1) {
      ++diag.boundary_edges;
    } else {
      ++diag.non_manifold_edges;
    }
    i = j;
  }

  std::vector<int> component(nt, -1);
  std::vector<char> flip(nt, 0);
  std::vector<std::vector<int>> members;
  for (std::size_t seed = 0; seed < nt; ++seed) {
    if (component[seed] >= 0) continue;
    const int label = static_cast<int>(members.size());
    members.emplace_back();
    std::deque<int> queue{static_cast<int>(seed)};
    component[seed] = label;
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      members.back().push_back(t);
      for (const auto& [other, same] : neighbors[static_cast<std::size_t>(t)]) {
        if (component[static_cast<std::size_t>(other)] >= 0) continue;
        component[static_cast<std::size_t>(other)] = label;
        // Same traversal direction on a shared edge means opposite winding.
        flip[static_cast<std::size_t>(other)] = static_cast<char>(flip[static_cast<std::size_t>(t)] ^ (same ? 1 : 0));
        queue.push_back(other);
      }
    }
  }
  // Propagation is relative to each seed; keep the majority winding.
  for (const auto& group : members) {
    std::size_t flips = 0;
    for (int t : group) flips += flip[static_cast<std::size_t>(t)] != 0;
    if (2 * flips > group.size()) {
      for (int t : group) flip[static_cast<std::size_t>(t)] ^= 1;
    }
  }
  for (std::size_t t = 0; t < nt; ++t) {
    if (flip[t]) {
      std::swap(mesh.triangles[t][1], mesh.triangles[t][2]);
      ++diag.flipped_triangles;
    }
  }
  // A component nested inside an odd number of others bounds a cavity and
  // should enclose negative volume; every other one positive.
  std::vector<double> volume(members.size(), 0);
  std::vector<Aabb> bounds(members.size());
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto first = static_cast<std::size_t>(members[c].front());
    bounds[c] = {mesh.corner(first, 0), mesh.corner(first, 0)};
    for (int t : members[c]) {
      const auto i = static_cast<std::size_t>(t);
      volume[c] += mesh.corner(i, 0).dot(mesh.corner(i, 1).cross(mesh.corner(i, 2)));
      for (int k = 0; k < 3; ++k) {
        bounds[c].min = bounds[c].min.cwiseMin(mesh.corner(i, k));
        bounds[c].max = bounds[c].max.cwiseMax(mesh.corner(i, k));
      }
    }
  }
  for (std::size_t c = 0; c < members.size(); ++c) {
    const auto probe_tri = static_cast<std::size_t>(members[c].front());
    const Vector3 probe = (mesh.corner(probe_tri, 0) + mesh.corner(probe_tri, 1) + mesh.corner(probe_tri, 2)) / 3;
    int depth = 0;
    for (std::size_t o = 0; o < members.size() && members.size() > 1; ++o) {
      if (o == c || !bounds[o].contains(probe)) continue;
      double solid_angle = 0;
      for (int t : members[o]) {
        const auto i = static_cast<std::size_t>(t);
        solid_angle += triangle_solid_angle(mesh.corner(i, 0) - probe, mesh.corner(i, 1) - probe,
                                            mesh.corner(i, 2) - probe);
      }
      depth += std::abs(solid_angle) > 2 * std::numbers::pi;  // winding number above 1/2
    }
    const bool cavity = depth % 2 == 1;
    if ((volume[c] < 0) != cavity) {
      for (int t : members[c]) std::swap(mesh.triangles[static_cast<std::size_t>(t)][1], mesh.triangles[static_cast<std::size_t>(t)][2]);
      ++diag.flipped_components;
    }
  }

  if (diag.boundary_edges > 0) {
    diag.warnings.push_back(std::to_string(diag.boundary_edges) + " boundary edge(s); mesh is not closed");
  }
  if (diag.non_manifold_edges > 0) {
    diag.warnings.push_back(std::to_string(diag.non_manifold_edges) + " non-manifold edge(s)");
  }
  result.mesh = std::move(mesh);
  return result;
}

Transform centering_transform(const TriangleMesh& mesh) {
  return Transform::translate(-compute_bounds(mesh).center());
}

}  // namespace remixd
