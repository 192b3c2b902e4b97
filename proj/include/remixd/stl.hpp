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
#include <string_view>
#include <vector>

#include "remixd/mesh.hpp"

namespace remixd {

enum class StlFormat { kAscii, kBinary };

struct StlLoadResult {
  TriangleMesh mesh;
  StlFormat format = StlFormat::kBinary;
  std::size_t facet_count = 0;
  std::size_t dropped_degenerate = 0;
  std::vector<std::string> warnings;
};

/// Parses ASCII or binary STL. The buffer is binary iff its length equals
/// 84 + 50 * (declared facet count); anything else is tried as ASCII.
/// Facet normals are ignored. Vertices are welded at kWeldTolerance in
/// first-appearance order and degenerate facets are dropped with a warning.
/// Throws Error(kStlParse) on malformed input or zero facets.
StlLoadResult load_stl(std::string_view bytes);

/// Serializes the mesh with normals recomputed from winding. Binary output
/// is exactly 84 + 50 * triangle_count bytes. Throws kEmptyMesh.
std::string write_stl(const TriangleMesh& mesh, StlFormat format = StlFormat::kBinary);

/// The mesh as it would come back from a binary STL roundtrip: float32
/// coordinates, welded, in first-appearance vertex order. Empty stays empty.
TriangleMesh canonicalize(const TriangleMesh& mesh);

std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view bytes);

}  // namespace remixd
