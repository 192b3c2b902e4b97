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


#include "remixd/polygon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace remixd {
namespace {

double cross(const Point2& a, const Point2& b) { return a.x() * b.y() - a.y() * b.x(); }

Point2 left_normal(const Point2& u) { return {-u.y(), u.x()}; }

double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
  const Point2 d = b - a;
  const double len2 = d.squaredNorm();
  const double t = len2 > 0 ? std::clamp((p - a).dot(d) / len2, 0.0, 1.0) : 0.0;
  return (a + d * t - p).norm();
}

/// Proper crossing of segments ab and cd (shared endpoints excluded).
bool segment_crossing(const Point2& a, const Point2& b, const Point2& c, const Point2& d, Point2& at) {
  const Point2 r = b - a;
  const Point2 s = d - c;
  const double denom = cross(r, s);
  if (std::abs(denom) < 1e-18) return false;
  const double t = cross(c - a, s) / denom;
  const double u = cross(c - a, r) / denom;
  constexpr double kInside = 1e-12;
  if (t <= kInside || t >= 1 - kInside || u <= kInside || u >= 1 - kInside) return false;
  at = a + r * t;
  return true;
}

/// Splits a ring at its self-crossings into simple loops.
void split_loops(const Ring& ring, std::vector<Ring>& out, int depth) {
  const std::size_t n = ring.size();
  if (n < 3) return;
  if (depth < 64) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 2; j < n; ++j) {
        if (i == 0 && j + 1 == n) continue;  // adjacent through the wrap
        Point2 x;
        if (!segment_crossing(ring[i], ring[(i + 1) % n], ring[j], ring[(j + 1) % n], x)) continue;
        Ring a{x};
        for (std::size_t k = i + 1; k <= j; ++k) a.push_back(ring[k]);
        Ring b{x};
        for (std::size_t k = j + 1; k < n; ++k) b.push_back(ring[k]);
        for (std::size_t k = 0; k <= i; ++k) b.push_back(ring[k]);
        split_loops(a, out, depth + 1);
        split_loops(b, out, depth + 1);
        return;
      }
    }
  }
  out.push_back(ring);
}

}  // namespace

double signed_area(const Ring& ring) {
  double a = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) a += cross(ring[i], ring[(i + 1) % ring.size()]);
  return a / 2;
}

double perimeter(const Ring& ring) {
  double p = 0;
  for (std::size_t i = 0; i < ring.size(); ++i) p += (ring[(i + 1) % ring.size()] - ring[i]).norm();
  return p;
}

double region_area(const std::vector<Ring>& rings) {
  double a = 0;
  for (const Ring& r : rings) a += signed_area(r);
  return a;
}

bool contains(const std::vector<Ring>& rings, const Point2& p) {
  bool inside = false;
  for (const Ring& r : rings) {
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
      const Point2& a = r[i];
      const Point2& b = r[j];
      if ((a.y() > p.y()) != (b.y() > p.y()) &&
          p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x()) {
        inside = !inside;
      }
    }
  }
  return inside;
}

Ring simplify_ring(const Ring& ring, double tol) {
  Ring out;
  out.reserve(ring.size());
  for (const Point2& p : ring) {
    if (out.empty() || (p - out.back()).norm() >= tol) out.push_back(p);
  }
  while (out.size() > 1 && (out.front() - out.back()).norm() < tol) out.pop_back();
  // Collinear points; repeat until nothing changes since each removal can
  // expose another.
  for (bool changed = true; changed && out.size() >= 3;) {
    changed = false;
    for (std::size_t i = 0; i < out.size() && out.size() >= 3;) {
      const Point2& prev = out[(i + out.size() - 1) % out.size()];
      const Point2& next = out[(i + 1) % out.size()];
      if (point_segment_distance(out[i], prev, next) < tol) {
        out.erase(out.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
  }
  if (out.size() < 3) out.clear();
  return out;
}

std::vector<Ring> offset_ring(const Ring& input, double distance) {
  const Ring ring = simplify_ring(input, 1e-9);
  if (ring.size() < 3) return {};
  const double sign = signed_area(ring) >= 0 ? 1.0 : -1.0;
  if (distance == 0) return {ring};

  const std::size_t n = ring.size();
  std::vector<Point2> dir(n);
  for (std::size_t i = 0; i < n; ++i) dir[i] = (ring[(i + 1) % n] - ring[i]).normalized();

  // Edges whose offset image runs backwards are dropped and the corners
  // recomputed until every surviving edge keeps its direction.
  std::vector<std::size_t> live(n);
  for (std::size_t i = 0; i < n; ++i) live[i] = i;
  std::vector<Point2> corner;
  auto corner_of = [&](std::size_t prev, std::size_t cur) -> Point2 {
    // Intersection of the two offset lines.
    const Point2 p0 = ring[prev] + left_normal(dir[prev]) * distance;
    const Point2 p1 = ring[cur] + left_normal(dir[cur]) * distance;
    const double denom = cross(dir[prev], dir[cur]);
    if (std::abs(denom) < 1e-12) return p1;
    const double t = cross(p1 - p0, dir[cur]) / denom;
    return p0 + dir[prev] * t;
  };
  for (std::size_t iter = 0; iter < n && live.size() >= 3; ++iter) {
    const std::size_t m = live.size();
    corner.assign(m, Point2::Zero());
    for (std::size_t k = 0; k < m; ++k) corner[k] = corner_of(live[(k + m - 1) % m], live[k]);
    std::vector<std::size_t> keep;
    for (std::size_t k = 0; k < m; ++k) {
      if ((corner[(k + 1) % m] - corner[k]).dot(dir[live[k]]) > 0) keep.push_back(live[k]);
    }
    if (keep.size() == m) break;
    live = std::move(keep);
  }
  if (live.size() < 3) return {};

  // Rebuild with a miter limit: long spikes at sharp reflex corners are
  // cut to a bevel.
  const std::size_t m = live.size();
  Ring shifted;
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t prev = live[(k + m - 1) % m];
    const std::size_t cur = live[k];
    const Point2 c = corner_of(prev, cur);
    const Point2 base = ring[cur];
    if (prev == (cur + n - 1) % n && (c - base).norm() > 4 * std::abs(distance)) {
      shifted.push_back(base + left_normal(dir[prev]) * distance);
      shifted.push_back(base + left_normal(dir[cur]) * distance);
    } else {
      shifted.push_back(c);
    }
  }

  std::vector<Ring> loops;
  split_loops(simplify_ring(shifted, 1e-9), loops, 0);
  std::vector<Ring> out;
  const double min_clearance = std::abs(distance) * (1 - 1e-3);
  for (Ring& loop : loops) {
    loop = simplify_ring(loop, 1e-7);
    if (loop.size() < 3) continue;
    const double area = signed_area(loop);
    if (area * sign <= 1e-8) continue;
    // Pieces of the raw offset that come too close to the source ring lie
    // in territory another edge already claimed.
    bool clear = true;
    for (const Point2& p : loop) {
      for (std::size_t i = 0; i < n && clear; ++i) {
        clear = point_segment_distance(p, ring[i], ring[(i + 1) % n]) >= min_clearance;
      }
      if (!clear) break;
    }
    if (clear) out.push_back(std::move(loop));
  }
  return out;
}

std::vector<Ring> offset_region(const std::vector<Ring>& rings, double distance) {
  std::vector<Ring> out;
  for (const Ring& r : rings) {
    for (Ring& piece : offset_ring(r, distance)) out.push_back(std::move(piece));
  }
  return out;
}

std::vector<Segment2> hatch(const std::vector<Ring>& rings, double angle_rad, double spacing) {
  std::vector<Segment2> out;
  if (rings.empty() || !(spacing > 0)) return out;
  const double c = std::cos(angle_rad);
  const double s = std::sin(angle_rad);
  // Rotate so hatch lines run along +x.
  auto to_local = [&](const Point2& p) { return Point2(c * p.x() + s * p.y(), -s * p.x() + c * p.y()); };
  auto to_world = [&](const Point2& p) { return Point2(c * p.x() - s * p.y(), s * p.x() + c * p.y()); };
  std::vector<Ring> local;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const Ring& r : rings) {
    Ring l;
    for (const Point2& p : r) {
      l.push_back(to_local(p));
      lo = std::min(lo, l.back().y());
      hi = std::max(hi, l.back().y());
    }
    local.push_back(std::move(l));
  }
  const auto first = static_cast<long long>(std::ceil(lo / spacing - 0.5));
  const auto last = static_cast<long long>(std::floor(hi / spacing - 0.5));
  std::vector<double> xs;
  for (long long k = first; k <= last; ++k) {
    const double y = (static_cast<double>(k) + 0.5) * spacing;
    xs.clear();
    for (const Ring& r : local) {
      for (std::size_t i = 0; i < r.size(); ++i) {
        const Point2& a = r[i];
        const Point2& b = r[(i + 1) % r.size()];
        if ((a.y() <= y) == (b.y() <= y)) continue;  // half-open rule
        xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t i = 0; i + 1 < xs.size(); i += 2) {
      if (xs[i + 1] - xs[i] < 1e-6) continue;
      out.push_back({to_world(Point2(xs[i], y)), to_world(Point2(xs[i + 1], y))});
    }
  }
  return out;
}

}  // namespace remixd
