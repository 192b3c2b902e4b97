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

// Expected results for the scripted walkthroughs, derived from the scripts'
// dimensions rather than from the CSG engine.

#include <filesystem>

#include "csg_oracles.hpp"

#ifndef REMIXD_SOURCE_DIR
#error "REMIXD_SOURCE_DIR must point at the source tree"
#endif

namespace remixd::testing {

inline std::filesystem::path walkthrough_dir() {
  return std::filesystem::path(REMIXD_SOURCE_DIR) / "scripts" / "walkthroughs";
}

/// walkthrough2_path2: a 64-gon cylinder r20 h60 centered at z = 109, minus
/// the shelf board (x >= 5, z in [100, 118], well inside the cylinder's
/// height), united with the pendant hung at z = 84. Only the top 5 mm of the
/// pendant's 10 x 6 mm tab reach into the cylinder (its bottom is z = 79).
inline double hanger_volume(double pendant_volume) {
  const Polygon2 disk = regular_polygon(20, 64);
  const double cylinder = shoelace_area(disk) * 60;
  const double notch = shoelace_area(clip_x_at_least(disk, 5)) * 18;
  const double tab_overlap = 10.0 * 6.0 * 5.0;
  return cylinder - notch + pendant_volume - tab_overlap;
}

}  // namespace remixd::testing
