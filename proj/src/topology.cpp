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

#include "remixd/topology.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

namespace remixd {
namespace {

struct CellKey {
  std::int64_t x, y, z;
  bool operator==(const CellKey&) const = default;
};

struct CellHash {
  std::size_t operator()(const CellKey& k) const {
    std::uint64_t h = static_cast<std::uint64_t>(k.x) * 0x9E3779B97F4A7C15ull;
    h ^= static_cast<std::uint64_t>(k.y) * 0xC2B2AE3D27D4EB4Full + (h << 6) + (h >> 2);
    h ^= static_cast<std::uint64_t>(k.z) * 0x165667B19E3779F9ull + (h << 6) + (h >> 2);
    return static_cast<std::size_t>(h);
  }
};

int find_root(std::vector<int>& parent, int i) {
  while (parent[i] != i) {
    parent[i] = parent[parent[i]];
    i = parent[i];
  }
  return i;
}

}  // namespace

std::vector<int> weld_map(const std::vector<Vector3>& points, double tol) {
  std::vector<int> map(points.size());
  std::unordered_map<CellKey, std::vector<int>, CellHash> grid;
  grid.reserve(points.size());
  const double tol2 = tol * tol;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Vector3& p = points[i];
    const CellKey cell{static_cast<std::int64_t>(std::floor(p.x() / tol)),
                       static_cast<std::int64_t>(std::floor(p.y() / tol)),
                       static_cast<std::int64_t>(std::floor(p.z() / tol))};
    int found = -1;
    for (int dx = -1; dx <= 1; ++dx) {
      for (int dy = -1; dy <= 1; ++dy) {
        for (int dz = -1; dz <= 1; ++dz) {
          auto it = grid.find({cell.x + dx, cell.y + dy, cell.z + dz});
          if (it == grid.end()) continue;
          for (int rep : it->second) {
            if ((points[static_cast<std::size_t>(rep)] - p).squaredNorm() <= tol2 &&
                (found < 0 || rep < found)) {
              found = rep;
            }
          }
        }
      }
    }
    if (found >= 0) {
      map[i] = found;
    } else {
      map[i] = static_cast<int>(i);
      grid[cell].push_back(static_cast<int>(i));
    }
  }
  return map;
}

TriangleMesh compact(const TriangleMesh& mesh) {
  std::vector<int> remap(mesh.vertices.size(), -1);
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) remap[static_cast<std::size_t>(t[k])] = 0;
  }
  TriangleMesh out;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (remap[i] < 0) continue;
    remap[i] = static_cast<int>(out.vertices.size());
    out.vertices.push_back(mesh.vertices[i]);
  }
  out.triangles.reserve(mesh.triangles.size());
  for (const auto& t : mesh.triangles) {
    out.triangles.emplace_back(remap[static_cast<std::size_t>(t[0])], remap[static_cast<std::size_t>(t[1])],
                               remap[static_cast<std::size_t>(t[2])]);
  }
  return out;
}

std::vector<EdgeUse> edge_uses(const TriangleMesh& mesh) {
  std::vector<EdgeUse> uses;
  uses.reserve(mesh.triangles.size() * 3);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    const Triangle& t = mesh.triangles[i];
    for (int k = 0; k < 3; ++k) {
      const int a = t[k];
      const int b = t[(k + 1) % 3];
      uses.push_back({std::min(a, b), std::max(a, b), static_cast<int>(i), a < b});
    }
  }
  std::sort(uses.begin(), uses.end(), [](const EdgeUse& x, const EdgeUse& y) {
    if (x.lo != y.lo) return x.lo < y.lo;
    if (x.hi != y.hi) return x.hi < y.hi;
    return x.triangle < y.triangle;
  });
  return uses;
}

EdgeReport check_watertight(const TriangleMesh& mesh) {
  EdgeReport report;
  const auto uses = edge_uses(mesh);
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    const std::size_t n = j - i;
    if (n == 1) {
      ++report.boundary_edges;
      report.boundary.emplace_back(uses[i].lo, uses[i].hi);
    } else if (n > 2) {
      ++report.non_manifold_edges;
    } else if (uses[i].forward == uses[i + 1].forward) {
      ++report.misoriented_edges;
    }
    i = j;
  }
  report.watertight = !mesh.triangles.empty() && report.boundary_edges == 0 &&
                      report.non_manifold_edges == 0 && report.misoriented_edges == 0;
  return report;
}

std::vector<int> triangle_components(const TriangleMesh& mesh, int* count) {
  std::vector<int> parent(mesh.triangles.size());
  std::iota(parent.begin(), parent.end(), 0);
  const auto uses = edge_uses(mesh);
  for (std::size_t i = 1; i < uses.size(); ++i) {
    if (uses[i].key() != uses[i - 1].key()) continue;
    const int a = find_root(parent, uses[i].triangle);
    const int b = find_root(parent, uses[i - 1].triangle);
    if (a != b) parent[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }
  std::vector<int> label(mesh.triangles.size(), -1);
  std::vector<int> root_label(mesh.triangles.size(), -1);
  int next = 0;
  for (std::size_t i = 0; i < parent.size(); ++i) {
    const int r = find_root(parent, static_cast<int>(i));
    if (root_label[static_cast<std::size_t>(r)] < 0) root_label[static_cast<std::size_t>(r)] = next++;
    label[i] = root_label[static_cast<std::size_t>(r)];
  }
  if (count) *count = next;
  return label;
}

}  // namespace remixd
