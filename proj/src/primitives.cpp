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

#include "remixd/primitives.hpp"

#include <cmath>
#include <map>
#include <numbers>

namespace remixd {
namespace {

// Sphere subdivision beyond this is a typo, not a request (5.2M triangles).
constexpr int kMaxSubdivisions = 8;

TriangleMesh make_cube(const CubeSpec& spec) {
  const double h = spec.edge / 2;
  TriangleMesh mesh;
  for (int i = 0; i < 8; ++i) {
    mesh.vertices.emplace_back((i & 1) ? h : -h, (i & 2) ? h : -h, (i & 4) ? h : -h);
  }
  mesh.triangles = {
      {0, 2, 1}, {1, 2, 3},  // -z
      {4, 5, 6}, {5, 7, 6},  // +z
      {0, 1, 4}, {1, 5, 4},  // -y
      {2, 6, 3}, {3, 6, 7},  // +y
      {0, 4, 2}, {2, 4, 6},  // -x
      {1, 3, 5}, {3, 7, 5},  // +x
  };
  return mesh;
}

TriangleMesh make_sphere(const SphereSpec& spec) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {{-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
                   {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
  for (auto& v : mesh.vertices) v.normalize();
  mesh.triangles = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
                    {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
                    {3, 8, 9},  {4, 9, 5},  {2, 4, 11},  {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int level = 0; level < spec.subdivisions; ++level) {
    std::map<std::pair<int, int>, int> midpoint;
    auto mid = [&](int a, int b) {
      const std::pair<int, int> key(std::min(a, b), std::max(a, b));
      auto it = midpoint.find(key);
      if (it != midpoint.end()) return it->second;
      const Vector3 p = (mesh.vertices[static_cast<std::size_t>(a)] + mesh.vertices[static_cast<std::size_t>(b)]).normalized();
      const int id = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(p);
      midpoint.emplace(key, id);
      return id;
    };
    std::vector<Triangle> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const int ab = mid(t[0], t[1]);
      const int bc = mid(t[1], t[2]);
      const int ca = mid(t[2], t[0]);
      next.emplace_back(t[0], ab, ca);
      next.emplace_back(t[1], bc, ab);
      next.emplace_back(t[2], ca, bc);
      next.emplace_back(ab, bc, ca);
    }
    mesh.triangles = std::move(next);
  }
  for (auto& v : mesh.vertices) v *= spec.radius;
  // The tessellation is not symmetric along every axis; recenter the box.
  const Vector3 c = compute_bounds(mesh).center();
  for (auto& v : mesh.vertices) v -= c;
  return mesh;
}

TriangleMesh make_pyramid(const PyramidSpec& spec) {
  const double b = spec.base_edge / 2;
  const double h = spec.height / 2;
  TriangleMesh mesh;
  mesh.vertices = {{-b, -b, -h}, {b, -b, -h}, {b, b, -h}, {-b, b, -h}, {0, 0, h}};
  mesh.triangles = {{0, 2, 1}, {0, 3, 2}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}};
  return mesh;
}

TriangleMesh make_cylinder(const CylinderSpec& spec) {
  const int n = spec.segments;
  const double h = spec.height / 2;
  TriangleMesh mesh;
  for (int i = 0; i < n; ++i) {
    const double a = 2.0 * std::numbers::pi * i / n;
    const double x = spec.radius * std::cos(a);
    const double y = spec.radius * std::sin(a);
    mesh.vertices.emplace_back(x, y, -h);
    mesh.vertices.emplace_back(x, y, h);
  }
  const int bottom = 2 * n;
  const int top = 2 * n + 1;
  mesh.vertices.emplace_back(0, 0, -h);
  mesh.vertices.emplace_back(0, 0, h);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    const int b0 = 2 * i, t0 = 2 * i + 1, b1 = 2 * j, t1 = 2 * j + 1;
    mesh.triangles.emplace_back(b0, b1, t1);
    mesh.triangles.emplace_back(b0, t1, t0);
    mesh.triangles.emplace_back(bottom, b1, b0);
    mesh.triangles.emplace_back(top, t0, t1);
  }
  return mesh;
}

}  // namespace

std::string_view primitive_name(const PrimitiveKind& kind) {
  static constexpr std::string_view names[] = {"cube", "sphere", "pyramid", "cylinder"};
  return names[kind.index()];
}

void validate_primitive(const PrimitiveKind& kind) {
  auto positive = [](double v, const char* what) {
    if (!(v > 0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument, std::string(what) + " must be a positive number");
    }
  };
  std::visit(
      [&](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, CubeSpec>) {
          positive(spec.edge, "cube edge");
        } else if constexpr (std::is_same_v<T, SphereSpec>) {
          positive(spec.radius, "sphere radius");
          if (spec.subdivisions < 3 || spec.subdivisions > kMaxSubdivisions) {
            throw Error(ErrorCode::kInvalidArgument, "sphere subdivisions must be in [3, 8]");
          }
        } else if constexpr (std::is_same_v<T, PyramidSpec>) {
          positive(spec.base_edge, "pyramid base edge");
          positive(spec.height, "pyramid height");
        } else {
          positive(spec.radius, "cylinder radius");
          positive(spec.height, "cylinder height");
          if (spec.segments < 3) throw Error(ErrorCode::kInvalidArgument, "cylinder segments must be >= 3");
        }
      },
      kind);
}

TriangleMesh make_primitive(const PrimitiveKind& kind) {
  validate_primitive(kind);
  return std::visit(
      [](const auto& spec) {
        using T = std::decay_t<decltype(spec)>;
        if constexpr (std::is_same_v<T, CubeSpec>) {
          return make_cube(spec);
        } else if constexpr (std::is_same_v<T, SphereSpec>) {
          return make_sphere(spec);
        } else if constexpr (std::is_same_v<T, PyramidSpec>) {
          return make_pyramid(spec);
        } else {
          return make_cylinder(spec);
        }
      },
      kind);
}

}  // namespace remixd
