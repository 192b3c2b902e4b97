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

#include <string_view>
#include <variant>

#include "remixd/mesh.hpp"

namespace remixd {

struct CubeSpec {
  double edge = 1.0;
  bool operator==(const CubeSpec&) const = default;
};

/// Icosphere: an icosahedron subdivided `subdivisions` times.
struct SphereSpec {
  double radius = 1.0;
  int subdivisions = 3;
  bool operator==(const SphereSpec&) const = default;
};

/// Square base on the bottom, apex above the base center.
struct PyramidSpec {
  double base_edge = 1.0;
  double height = 1.0;
  bool operator==(const PyramidSpec&) const = default;
};

/// Axis along z.
struct CylinderSpec {
  double radius = 1.0;
  double height = 1.0;
  int segments = 64;
  bool operator==(const CylinderSpec&) const = default;
};

using PrimitiveKind = std::variant<CubeSpec, SphereSpec, PyramidSpec, CylinderSpec>;

std::string_view primitive_name(const PrimitiveKind& kind);

/// Throws kInvalidArgument for non-positive dimensions or counts below 3.
void validate_primitive(const PrimitiveKind& kind);

/// Watertight, outward-oriented mesh whose bounding box is centered at the
/// origin.
TriangleMesh make_primitive(const PrimitiveKind& kind);

}  // namespace remixd
