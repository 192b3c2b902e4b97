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
#include "remixd/polygon.hpp"

namespace remixd {

struct SliceConfig {
  double layer_height = 0.2;  // mm
  double extrusion_width = 0.4;  // mm
  double filament_diameter = 1.75;  // mm
  int perimeter_count = 2;
  double infill_density = 0.2;  // 0 = hollow, 1 = solid
  bool support_enabled = true;
  double overhang_threshold_deg = 45;  // measured from vertical
  double print_speed = 1800;  // mm/min
  double travel_speed = 7200;  // mm/min
  double nozzle_temp = 210;  // C
  double bed_temp = 60;  // C
  Vector3 build_volume{220, 220, 250};  // mm
  double retract_length = 1.0;  // mm of filament
  double retract_min_travel = 2.0;  // mm
  double retract_speed = 2100;  // mm/min
};

/// Throws kInvalidArgument naming the first bad field.
void validate_config(const SliceConfig& config);

/// Support infill density; not user-tunable.
inline constexpr double kSupportDensity = 0.15;
/// XY gap kept between support and the model (mm).
inline constexpr double kSupportGap = 0.3;
/// Segment endpoints closer than this are joined when chaining (mm).
inline constexpr double kChainTolerance = 1e-4;

/// A closed extrusion loop (perimeter) or an open polyline.
struct Path2 {
  std::vector<Point2> points;
  bool closed = false;
};

struct LayerSlice {
  std::size_t index = 0;
  double z = 0;  // slicing plane, mid-layer
  double top = 0;  // nozzle height when printing this layer
  std::vector<Ring> contours;
  std::vector<Path2> perimeters;  // outermost first
  std::vector<Ring> infill_region;  // area inside the innermost perimeter
  std::vector<Segment2> infill;
  double infill_angle_deg = 0;
  std::vector<Ring> support_regions;  // axis-aligned cells merged into rectangles
  std::vector<Segment2> support;
  std::vector<std::string> diagnostics;
};

struct SliceResult {
  std::vector<LayerSlice> layers;
  std::vector<std::string> warnings;
};

/// Moves the mesh so it rests on the bed (min z = 0), centered in x and y.
/// The bed-centering is a convenience: slicing itself only lifts z.
TriangleMesh place_on_bed(const TriangleMesh& mesh, const SliceConfig& config);

/// Contours of a watertight mesh at z = layer_height * (k + 1/2) after
/// lifting min z to 0. Errors: kNotWatertight, kEmptyMesh, kSliceFailed for
/// contours that do not close (layer index and gap in the message).
SliceResult slice_mesh(const TriangleMesh& mesh, const SliceConfig& config);

/// Inward offsets at width/2, 3*width/2, ... Emits a diagnostic when a
/// region is too thin for all requested loops.
void generate_perimeters(LayerSlice& layer, const SliceConfig& config);
/// Rectilinear lines over the innermost region, spaced width/density and
/// alternating 45/135 degrees by layer parity.
void generate_infill(LayerSlice& layer, const SliceConfig& config);
/// Marks columns under faces that overhang more than the threshold (strict)
/// down to the bed or the model below, keeping kSupportGap from the model.
/// `mesh` must be in the same frame that was sliced (min z = 0).
void generate_supports(const TriangleMesh& mesh, std::vector<LayerSlice>& layers, const SliceConfig& config);

/// Filament length for an extrusion segment.
double extrusion_for(double length, const SliceConfig& config);

/// Whole pipeline for one mesh: place on bed, slice, perimeters, infill and
/// supports when enabled.
SliceResult slice_for_print(const TriangleMesh& mesh, const SliceConfig& config);

}  // namespace remixd
