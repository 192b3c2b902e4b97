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

// Independent geometric oracles for Boolean results. Nothing here calls
// into the CSG engine.

#include <cmath>
#include <numbers>
#include <vector>

#include <Eigen/Core>

namespace remixd::testing {

using Polygon2 = std::vector<Eigen::Vector2d>;

inline double shoelace_area(const Polygon2& poly) {
  double a = 0;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    a += p.x() * q.y() - q.x() * p.y();
  }
  return a / 2;
}

/// Sutherland-Hodgman clip of a convex polygon to the half-plane x >= x0.
inline Polygon2 clip_x_at_least(const Polygon2& poly, double x0) {
  Polygon2 out;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % poly.size()];
    const bool pin = p.x() >= x0;
    const bool qin = q.x() >= x0;
    if (pin) out.push_back(p);
    if (pin != qin) {
      const double t = (x0 - p.x()) / (q.x() - p.x());
      out.push_back(p + (q - p) * t);
    }
  }
  return out;
}

inline Polygon2 regular_polygon(double radius, int segments) {
  Polygon2 out;
  for (int i = 0; i < segments; ++i) {
    const double a = 2 * std::numbers::pi * i / segments;
    out.emplace_back(radius * std::cos(a), radius * std::sin(a));
  }
  return out;
}

/// Area of the circular segment of a radius-r disk beyond the chord x = d.
inline double circular_segment_area(double r, double d) {
  return r * r * std::acos(d / r) - d * std::sqrt(r * r - d * d);
}

}  // namespace remixd::testing
