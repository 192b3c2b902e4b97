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

// Minimal 2D polygon toolkit for the slicer: areas, containment, inward
// offsets and scanline clipping. Not a general clipping engine.

#include <string>
#include <vector>

#include <Eigen/Core>

namespace remixd {

using Point2 = Eigen::Vector2d;
/// Closed ring; the edge from the last point back to the first is implied.
/// Outer boundaries run counter-clockwise, holes clockwise, so material is
/// always on the left.
using Ring = std::vector<Point2>;

struct Segment2 {
  Point2 a;
  Point2 b;
  double length() const { return (b - a).norm(); }
};

double signed_area(const Ring& ring);
double perimeter(const Ring& ring);
/// Sum of signed areas: material area for a well-oriented region.
double region_area(const std::vector<Ring>& rings);

/// Even-odd containment over all rings.
bool contains(const std::vector<Ring>& rings, const Point2& p);

/// Drops points closer than `tol` to their predecessor and points whose
/// neighbors are collinear with them within `tol`.
Ring simplify_ring(const Ring& ring, double tol);

/// Moves every edge `distance` to its left (into the material for a
/// well-oriented region) with mitered corners, then prunes the loops that
/// self-intersection and collapsed edges leave behind. Loops whose
/// orientation flips or whose area vanishes are dropped, so the result may
/// be empty or hold several rings. Highly concave input is handled only
/// approximately: offsets of different rings are not merged.
std::vector<Ring> offset_ring(const Ring& ring, double distance);
std::vector<Ring> offset_region(const std::vector<Ring>& rings, double distance);

/// Parallel lines at `angle_rad` (direction of travel), spaced `spacing`
/// apart on a grid anchored at the origin, clipped to the region by the
/// even-odd rule. Lines run in a consistent direction; callers reorder.
std::vector<Segment2> hatch(const std::vector<Ring>& rings, double angle_rad, double spacing);

}  // namespace remixd
