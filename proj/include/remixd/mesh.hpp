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

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "remixd/error.hpp"

namespace remixd {

template <typename Scalar>
using Vec3 = Eigen::Matrix<Scalar, 3, 1>;
using Vector3 = Vec3<double>;
using Triangle = Eigen::Vector3i;

/// Indexed triangle set. Coordinates are millimeters; triangles wind
/// counter-clockwise when seen from outside the solid.
template <typename Scalar>
struct BasicTriangleMesh {
  using Point = Vec3<Scalar>;

  std::vector<Point> vertices;
  std::vector<Triangle> triangles;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
  bool empty() const { return triangles.empty(); }

  const Point& corner(std::size_t tri, int k) const {
    return vertices[static_cast<std::size_t>(triangles[tri][k])];
  }

  template <typename Other>
  BasicTriangleMesh<Other> cast() const {
    BasicTriangleMesh<Other> out;
    out.vertices.reserve(vertices.size());
    for (const auto& v : vertices) out.vertices.push_back(v.template cast<Other>());
    out.triangles = triangles;
    return out;
  }

  bool operator==(const BasicTriangleMesh&) const = default;
};

using TriangleMesh = BasicTriangleMesh<double>;
using TriangleMeshf = BasicTriangleMesh<float>;

template <typename Scalar>
struct BasicAabb {
  Vec3<Scalar> min = Vec3<Scalar>::Constant(std::numeric_limits<Scalar>::infinity());
  Vec3<Scalar> max = Vec3<Scalar>::Constant(-std::numeric_limits<Scalar>::infinity());

  bool valid() const { return (min.array() <= max.array()).all(); }
  Vec3<Scalar> size() const { return max - min; }
  Vec3<Scalar> center() const { return (min + max) / Scalar(2); }
  Scalar diagonal() const { return size().norm(); }

  void extend(const Vec3<Scalar>& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }

  BasicAabb inflated(Scalar margin) const {
    return {min.array() - margin, max.array() + margin};
  }

  bool contains(const Vec3<Scalar>& p, Scalar tol = 0) const {
    return ((p.array() >= min.array() - tol) && (p.array() <= max.array() + tol)).all();
  }

  bool contains(const BasicAabb& other, Scalar tol = 0) const {
    return contains(other.min, tol) && contains(other.max, tol);
  }
};

using Aabb = BasicAabb<double>;

/// Scale, then rotate, then translate. Scale factors are strictly positive,
/// so a transform never changes triangle orientation.
template <typename Scalar>
struct BasicTransform {
  Vec3<Scalar> translation = Vec3<Scalar>::Zero();
  Eigen::Quaternion<Scalar> rotation = Eigen::Quaternion<Scalar>::Identity();
  Vec3<Scalar> scale = Vec3<Scalar>::Ones();

  static BasicTransform identity() { return {}; }

  static BasicTransform translate(const Vec3<Scalar>& t) {
    BasicTransform out;
    out.translation = t;
    return out;
  }

  static BasicTransform uniform_scale(Scalar s) {
    BasicTransform out;
    out.scale = Vec3<Scalar>::Constant(s);
    return out;
  }

  bool valid() const {
    return std::abs(rotation.norm() - Scalar(1)) <= Scalar(1e-9) &&
           (scale.array() > Scalar(0)).all() && translation.allFinite() &&
           scale.allFinite() && rotation.coeffs().allFinite();
  }

  Vec3<Scalar> apply(const Vec3<Scalar>& p) const {
    return rotation * scale.cwiseProduct(p) + translation;
  }

  Vec3<Scalar> apply_inverse(const Vec3<Scalar>& p) const {
    return (rotation.conjugate() * (p - translation)).cwiseQuotient(scale);
  }

  Eigen::Transform<Scalar, 3, Eigen::Affine> matrix() const {
    Eigen::Transform<Scalar, 3, Eigen::Affine> m = Eigen::Transform<Scalar, 3, Eigen::Affine>::Identity();
    m.translate(translation);
    m.rotate(rotation);
    m.scale(scale);
    return m;
  }

  bool is_identity(Scalar tol = 0) const {
    return translation.cwiseAbs().maxCoeff() <= tol &&
           (scale.array() - Scalar(1)).abs().maxCoeff() <= tol &&
           rotation.angularDistance(Eigen::Quaternion<Scalar>::Identity()) <= tol;
  }
};

using Transform = BasicTransform<double>;

/// Throws kInvalidArgument naming the offending field.
void validate_transform(const Transform& t);

/// Throws kInvalidArgument when the mesh breaks an index or finiteness
/// invariant. Degenerate triangles are allowed here; repair removes them.
template <typename Scalar>
void validate_mesh(const BasicTriangleMesh<Scalar>& mesh) {
  const auto n = static_cast<int>(mesh.vertices.size());
  for (const auto& v : mesh.vertices) {
    if (!v.allFinite()) throw Error(ErrorCode::kInvalidArgument, "mesh has a non-finite vertex coordinate");
  }
  for (const auto& t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      if (t[k] < 0 || t[k] >= n) throw Error(ErrorCode::kInvalidArgument, "triangle index out of range");
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      throw Error(ErrorCode::kInvalidArgument, "triangle repeats a vertex index");
    }
  }
}

template <typename Scalar>
Vec3<Scalar> triangle_normal(const Vec3<Scalar>& a, const Vec3<Scalar>& b, const Vec3<Scalar>& c) {
  return (b - a).cross(c - a);
}

template <typename Scalar>
Scalar triangle_area(const Vec3<Scalar>& a, const Vec3<Scalar>& b, const Vec3<Scalar>& c) {
  return triangle_normal(a, b, c).norm() / Scalar(2);
}

/// Divergence-theorem volume. Positive iff the (closed) mesh is oriented
/// outward; meaningless for open meshes.
template <typename Scalar>
Scalar signed_volume(const BasicTriangleMesh<Scalar>& mesh) {
  Scalar total = 0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += mesh.corner(i, 0).dot(mesh.corner(i, 1).cross(mesh.corner(i, 2)));
  }
  return total / Scalar(6);
}

template <typename Scalar>
Scalar surface_area(const BasicTriangleMesh<Scalar>& mesh) {
  Scalar total = 0;
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    total += triangle_area(mesh.corner(i, 0), mesh.corner(i, 1), mesh.corner(i, 2));
  }
  return total;
}

template <typename Scalar>
BasicAabb<Scalar> compute_bounds(const BasicTriangleMesh<Scalar>& mesh) {
  if (mesh.vertices.empty()) throw Error(ErrorCode::kEmptyMesh, "cannot compute bounds of an empty mesh");
  BasicAabb<Scalar> box;
  for (const auto& v : mesh.vertices) box.extend(v);
  return box;
}

template <typename Scalar>
BasicTriangleMesh<Scalar> apply_transform(const BasicTriangleMesh<Scalar>& mesh,
                                          const BasicTransform<Scalar>& t) {
  BasicTriangleMesh<Scalar> out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(t.apply(v));
  return out;
}

template <typename Scalar>
BasicTriangleMesh<Scalar> apply_inverse_transform(const BasicTriangleMesh<Scalar>& mesh,
                                                  const BasicTransform<Scalar>& t) {
  BasicTriangleMesh<Scalar> out;
  out.triangles = mesh.triangles;
  out.vertices.reserve(mesh.vertices.size());
  for (const auto& v : mesh.vertices) out.vertices.push_back(t.apply_inverse(v));
  return out;
}

/// Reverses every triangle's winding.
template <typename Scalar>
BasicTriangleMesh<Scalar> flipped(BasicTriangleMesh<Scalar> mesh) {
  for (auto& t : mesh.triangles) std::swap(t[1], t[2]);
  return mesh;
}

/// Concatenates two meshes into one (no welding).
template <typename Scalar>
BasicTriangleMesh<Scalar> merged(const BasicTriangleMesh<Scalar>& a, const BasicTriangleMesh<Scalar>& b) {
  BasicTriangleMesh<Scalar> out = a;
  const int offset = static_cast<int>(a.vertices.size());
  out.vertices.insert(out.vertices.end(), b.vertices.begin(), b.vertices.end());
  for (const auto& t : b.triangles) out.triangles.push_back(t.array() + offset);
  return out;
}

/// Vertex-wise comparison with identical connectivity.
template <typename Scalar>
bool approx_equal(const BasicTriangleMesh<Scalar>& a, const BasicTriangleMesh<Scalar>& b, Scalar tol) {
  if (a.vertices.size() != b.vertices.size() || a.triangles != b.triangles) return false;
  for (std::size_t i = 0; i < a.vertices.size(); ++i) {
    if ((a.vertices[i] - b.vertices[i]).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

inline bool approx_equal(const Transform& a, const Transform& b, double tol) {
  return (a.translation - b.translation).cwiseAbs().maxCoeff() <= tol &&
         (a.scale - b.scale).cwiseAbs().maxCoeff() <= tol &&
         (a.rotation.coeffs() - b.rotation.coeffs()).cwiseAbs().maxCoeff() <= tol;
}

}  // namespace remixd
