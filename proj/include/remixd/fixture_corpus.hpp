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

#include <filesystem>
#include <string>

#include "remixd/mesh.hpp"

namespace remixd {

/// Closed, bumpy UV sphere standing in for a dense photogrammetry scan.
/// Face count is 2 * segments * (bands - 1); the defaults give 699,000.
TriangleMesh make_scan_sculpture(int segments = 500, int bands = 700, double radius = 40.0);

/// Fox-head pendant hanging from a 10 x 6 x 10 mm tab. The tab spans
/// x in [-5, 5], y in [-3, 3], z in [-10, 0]; nothing else reaches above
/// z = -7.
TriangleMesh make_animal_pendant();
/// Head-and-shoulders figure standing on z = 0.
TriangleMesh make_figure_bust();

/// Environment stand-ins, each in its own local frame.
TriangleMesh make_shelf_scan();  // 295 x 300 x 18 mm slab centered at the origin
TriangleMesh make_desk_planter_scan();  // desk top at z = 0 with a fused planter at (60, 40)
TriangleMesh make_wall_hook_scan();

/// Writes the offline repository corpus (index.json, STL payloads and
/// thumbnails) into `dir`, creating it if needed.
void write_fixture_corpus(const std::filesystem::path& dir);

}  // namespace remixd
