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


#include "remixd/slicer.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <limits>
#include <numbers>
#include <unordered_map>

#include "remixd/error.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::uint64_t edge_key(int a, int b) {
  const auto lo = static_cast<std::uint32_t>(std::min(a, b));
  const auto hi = static_cast<std::uint32_t>(std::max(a, b));
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

struct CutSegment {
  std::uint64_t from_key;
  std::uint64_t to_key;
  Point2 from;
  Point2 to;
};

std::size_t layer_count(double height, double layer_height) {
  // The small bias keeps 0.6 / 0.2 from flooring to 2.
  const double n = std::floor(height / layer_height + 1e-9);
  return n > 0 ? static_cast<std::size_t>(n) : 0;
}

std::vector<Ring> chain_layer(std::vector<CutSegment>& segs, std::size_t layer) {
  std::unordered_map<std::uint64_t, std::size_t> by_start;
  by_start.reserve(segs.size());
  for (std::size_t i = 0; i < segs.size(); ++i) by_start.emplace(segs[i].from_key, i);
  std::vector<char> used(segs.size(), 0);
  std::vector<Ring> rings;
  std::vector<std::vector<Point2>> open;
  for (std::size_t s = 0; s < segs.size(); ++s) {
    if (used[s]) continue;
    std::vector<Point2> pts;
    std::size_t cur = s;
    bool closed = false;
    for (;;) {
      used[cur] = 1;
      pts.push_back(segs[cur].from);
      if (segs[cur].to_key == segs[s].from_key) {
        closed = true;
        break;
      }
      const auto it = by_start.find(segs[cur].to_key);
      if (it == by_start.end() || used[it->second]) {
        pts.push_back(segs[cur].to);
        break;
      }
      cur = it->second;
    }
    if (closed) {
      rings.push_back(std::move(pts));
    } else {
      open.push_back(std::move(pts));
    }
  }
  // Stragglers: join chain ends that meet within the chaining tolerance.
  for (bool merged = true; merged && !open.empty();) {
    merged = false;
    for (std::size_t i = 0; i < open.size() && !merged; ++i) {
      if ((open[i].back() - open[i].front()).norm() <= kChainTolerance) {
        open[i].pop_back();
        rings.push_back(std::move(open[i]));
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
        merged = true;
        break;
      }
      for (std::size_t j = 0; j < open.size() && !merged; ++j) {
        if (i == j || (open[i].back() - open[j].front()).norm() > kChainTolerance) continue;
        open[i].insert(open[i].end(), open[j].begin() + 1, open[j].end());
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(j));
        merged = true;
      }
    }
  }
  if (!open.empty()) {
    const double gap = (open.front().back() - open.front().front()).norm();
    throw Error(ErrorCode::kSliceFailed, "layer " + std::to_string(layer) + ": contour does not close (gap " + fmt(gap) + " mm)");
  }
  std::vector<Ring> out;
  for (Ring& r : rings) {
    Ring clean = simplify_ring(r, kChainTolerance);
    if (clean.size() >= 3) out.push_back(std::move(clean));
  }
  return out;
}

std::size_t outer_count(const std::vector<Ring>& rings) {
  return static_cast<std::size_t>(
      std::count_if(rings.begin(), rings.end(), [](const Ring& r) { return signed_area(r) > 0; }));
}

/// Occupancy grid over the mesh footprint, one byte per cell.
struct Grid {
  double x0 = 0, y0 = 0, cell = 0.2;
  int nx = 0, ny = 0;

  std::size_t size() const { return static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny); }
  std::size_t at(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i); }
  double cx(int i) const { return x0 + (i + 0.5) * cell; }
  double cy(int j) const { return y0 + (j + 0.5) * cell; }
};

void rasterize_region(const Grid& g, const std::vector<Ring>& rings, std::vector<char>& out) {
  std::fill(out.begin(), out.end(), 0);
  std::vector<double> xs;
  for (int j = 0; j < g.ny; ++j) {
    const double y = g.cy(j);
    xs.clear();
    for (const Ring& r : rings) {
      for (std::size_t k = 0; k < r.size(); ++k) {
        const Point2& a = r[k];
        const Point2& b = r[(k + 1) % r.size()];
        if ((a.y() <= y) == (b.y() <= y)) continue;
        xs.push_back(a.x() + (y - a.y()) * (b.x() - a.x()) / (b.y() - a.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const int i0 = std::max(0, static_cast<int>(std::ceil((xs[k] - g.x0) / g.cell - 0.5)));
      const int i1 = std::min(g.nx - 1, static_cast<int>(std::floor((xs[k + 1] - g.x0) / g.cell - 0.5)));
      for (int i = i0; i <= i1; ++i) out[g.at(i, j)] = 1;
    }
  }
}

void dilate(const Grid& g, const std::vector<char>& in, int radius, std::vector<char>& out) {
  out = in;
  if (radius <= 0) return;
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (!in[g.at(i, j)]) continue;
      for (int dj = -radius; dj <= radius; ++dj) {
        for (int di = -radius; di <= radius; ++di) {
          if (di * di + dj * dj > radius * radius) continue;
          const int a = i + di, b = j + dj;
          if (a >= 0 && b >= 0 && a < g.nx && b < g.ny) out[g.at(a, b)] = 1;
        }
      }
    }
  }
}

Ring rectangle(double x0, double y0, double x1, double y1) { return {{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}; }

}  // namespace

void validate_config(const SliceConfig& c) {
  auto bad = [](const std::string& what) { throw Error(ErrorCode::kInvalidArgument, "slice config: " + what); };
  if (!(c.layer_height > 0) || !std::isfinite(c.layer_height)) bad("layer_height must be > 0");
  if (!(c.extrusion_width >= c.layer_height) || !std::isfinite(c.extrusion_width)) bad("extrusion_width must be >= layer_height");
  if (!(c.filament_diameter > 0) || !std::isfinite(c.filament_diameter)) bad("filament_diameter must be > 0");
  if (c.perimeter_count < 0 || c.perimeter_count > 50) bad("perimeter_count must be in [0, 50]");
  if (!(c.infill_density >= 0 && c.infill_density <= 1)) bad("infill_density must be in [0, 1]");
  if (!(c.overhang_threshold_deg >= 0 && c.overhang_threshold_deg <= 90)) bad("overhang_threshold_deg must be in [0, 90]");
  if (!(c.print_speed > 0) || !(c.travel_speed > 0) || !(c.retract_speed > 0)) bad("speeds must be > 0");
  if (!(c.nozzle_temp >= 0 && c.nozzle_temp <= 400) || !(c.bed_temp >= 0 && c.bed_temp <= 150)) bad("temperatures out of range");
  if (!(c.build_volume.array() > 0).all() || !c.build_volume.allFinite()) bad("build_volume must be positive");
  if (!(c.retract_length >= 0) || !(c.retract_min_travel >= 0)) bad("retraction settings must be >= 0");
}

double extrusion_for(double length, const SliceConfig& config) {
  const double r = config.filament_diameter / 2;
  return length * config.layer_height * config.extrusion_width / (std::numbers::pi * r * r);
}

TriangleMesh place_on_bed(const TriangleMesh& mesh, const SliceConfig& config) {
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "nothing to place on the bed");
  const Aabb b = compute_bounds(mesh);
  const Vector3 shift(config.build_volume.x() / 2 - b.center().x(), config.build_volume.y() / 2 - b.center().y(), -b.min.z());
  return apply_transform(mesh, Transform::translate(shift));
}

SliceResult slice_mesh(const TriangleMesh& mesh, const SliceConfig& config) {
  validate_config(config);
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "cannot slice an empty mesh");
  const EdgeReport report = check_watertight(mesh);
  if (!report.watertight) {
    throw Error(ErrorCode::kNotWatertight, "cannot slice an open mesh (" + std::to_string(report.boundary_edges) +
                                               " boundary, " + std::to_string(report.non_manifold_edges) +
                                               " non-manifold edges)");
  }
  const Aabb bounds = compute_bounds(mesh);
  const double zmin = bounds.min.z();
  const double lh = config.layer_height;
  const std::size_t n = layer_count(bounds.max.z() - zmin, lh);

  SliceResult result;
  if (n == 0) {
    result.warnings.push_back("mesh is " + fmt(bounds.max.z() - zmin) + " mm tall, below one layer of " + fmt(lh) +
                              " mm; nothing to print");
    return result;
  }

  std::vector<std::vector<CutSegment>> buckets(n);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Triangle& tri = mesh.triangles[t];
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (int k = 0; k < 3; ++k) {
      const double z = mesh.vertices[static_cast<std::size_t>(tri[k])].z() - zmin;
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    const double first = std::max(0.0, std::ceil(lo / lh - 0.5));
    const double last = std::min(static_cast<double>(n) - 1, std::floor(hi / lh - 0.5));
    for (double kd = first; kd <= last; kd += 1) {
      const auto k = static_cast<std::size_t>(kd);
      const double plane = (kd + 0.5) * lh + zmin;
      // A vertex exactly on the plane counts as above it, consistently for
      // every triangle sharing it.
      bool above[3];
      for (int c = 0; c < 3; ++c) above[c] = mesh.vertices[static_cast<std::size_t>(tri[c])].z() >= plane;
      if (above[0] == above[1] && above[1] == above[2]) continue;
      auto crossing = [&](int a, int b) {
        // Computed from the lower-indexed end so both neighbors agree bitwise.
        const int u = std::min(a, b), v = std::max(a, b);
        const Vector3& pu = mesh.vertices[static_cast<std::size_t>(u)];
        const Vector3& pv = mesh.vertices[static_cast<std::size_t>(v)];
        const double s = (plane - pu.z()) / (pv.z() - pu.z());
        return Point2(pu.x() + (pv.x() - pu.x()) * s, pu.y() + (pv.y() - pu.y()) * s);
      };
      CutSegment seg{};
      for (int c = 0; c < 3; ++c) {
        const int a = tri[c], b = tri[(c + 1) % 3];
        if (above[c] == above[(c + 1) % 3]) continue;
        if (above[c]) {  // going down: the contour enters here
          seg.from_key = edge_key(a, b);
          seg.from = crossing(a, b);
        } else {
          seg.to_key = edge_key(a, b);
          seg.to = crossing(a, b);
        }
      }
      buckets[k].push_back(seg);
    }
  }

  result.layers.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    LayerSlice& layer = result.layers[k];
    layer.index = k;
    layer.z = (static_cast<double>(k) + 0.5) * lh;
    layer.top = static_cast<double>(k + 1) * lh;
    layer.contours = chain_layer(buckets[k], k);
    if (region_area(layer.contours) < -1e-9) {
      throw Error(ErrorCode::kSliceFailed, "layer " + std::to_string(k) + ": contours enclose negative area; is the mesh inside out?");
    }
  }
  return result;
}

void generate_perimeters(LayerSlice& layer, const SliceConfig& config) {
  layer.perimeters.clear();
  const double w = config.extrusion_width;
  const std::size_t islands = outer_count(layer.contours);
  for (int k = 0; k < config.perimeter_count; ++k) {
    const std::vector<Ring> loops = offset_region(layer.contours, w / 2 + k * w);
    if (outer_count(loops) < islands) {
      layer.diagnostics.push_back("layer " + std::to_string(layer.index) + ": region too thin for perimeter " +
                                  std::to_string(k + 1) + " of " + std::to_string(config.perimeter_count));
    }
    for (const Ring& r : loops) layer.perimeters.push_back({r, true});
    if (loops.empty()) break;
  }
  layer.infill_region = config.perimeter_count == 0 ? layer.contours : offset_region(layer.contours, config.perimeter_count * w);
}

void generate_infill(LayerSlice& layer, const SliceConfig& config) {
  layer.infill.clear();
  layer.infill_angle_deg = layer.index % 2 == 0 ? 45 : 135;
  if (config.infill_density <= 0) return;
  const double spacing = config.extrusion_width / config.infill_density;
  layer.infill = hatch(layer.infill_region, layer.infill_angle_deg * std::numbers::pi / 180, spacing);
}

void generate_supports(const TriangleMesh& mesh, std::vector<LayerSlice>& layers, const SliceConfig& config) {
  for (LayerSlice& l : layers) {
    l.support_regions.clear();
    l.support.clear();
  }
  if (layers.empty() || mesh.empty()) return;
  const Aabb bounds = compute_bounds(mesh);
  const double zmin = bounds.min.z();
  const double lh = config.layer_height;
  const double threshold = std::sin(config.overhang_threshold_deg * std::numbers::pi / 180) + 1e-9;

  Grid g;
  g.cell = config.extrusion_width / 2;
  const double margin = kSupportGap + 2 * g.cell;
  g.x0 = bounds.min.x() - margin;
  g.y0 = bounds.min.y() - margin;
  g.nx = static_cast<int>(std::ceil((bounds.max.x() - bounds.min.x() + 2 * margin) / g.cell));
  g.ny = static_cast<int>(std::ceil((bounds.max.y() - bounds.min.y() + 2 * margin) / g.cell));

  // starts[k]: cells whose overhang surface sits on top of layer k.
  std::vector<std::vector<std::size_t>> starts(layers.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    const Vector3 a = mesh.corner(t, 0) - Vector3(0, 0, zmin);
    const Vector3 b = mesh.corner(t, 1) - Vector3(0, 0, zmin);
    const Vector3 c = mesh.corner(t, 2) - Vector3(0, 0, zmin);
    const Vector3 nrm = triangle_normal(a, b, c);
    const double len = nrm.norm();
    if (len <= 0 || -nrm.z() / len <= threshold) continue;
    // Rasterize the projection; each covered cell center gets the surface
    // height there.
    const double det = (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
    if (std::abs(det) < 1e-18) continue;
    const int i0 = std::max(0, static_cast<int>(std::floor((std::min({a.x(), b.x(), c.x()}) - g.x0) / g.cell)));
    const int i1 = std::min(g.nx - 1, static_cast<int>(std::floor((std::max({a.x(), b.x(), c.x()}) - g.x0) / g.cell)));
    const int j0 = std::max(0, static_cast<int>(std::floor((std::min({a.y(), b.y(), c.y()}) - g.y0) / g.cell)));
    const int j1 = std::min(g.ny - 1, static_cast<int>(std::floor((std::max({a.y(), b.y(), c.y()}) - g.y0) / g.cell)));
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double px = g.cx(i), py = g.cy(j);
        const double l1 = ((px - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (py - a.y())) / det;
        const double l2 = ((b.x() - a.x()) * (py - a.y()) - (px - a.x()) * (b.y() - a.y())) / det;
        if (l1 < 0 || l2 < 0 || l1 + l2 > 1) continue;
        const double h = a.z() + l1 * (b.z() - a.z()) + l2 * (c.z() - a.z());
        const double top_layer = std::floor(h / lh + 1e-9) - 1;  // highest layer wholly below h
        if (top_layer < 0) continue;
        const auto k = std::min(static_cast<std::size_t>(top_layer), layers.size() - 1);
        starts[k].push_back(g.at(i, j));
      }
    }
  }

  const int gap_cells = static_cast<int>(std::ceil(kSupportGap / g.cell));
  const double line_spacing = config.extrusion_width / kSupportDensity;
  std::vector<char> need(g.size(), 0), model(g.size(), 0), keepout(g.size(), 0);
  for (std::size_t kk = layers.size(); kk-- > 0;) {
    LayerSlice& layer = layers[kk];
    for (std::size_t cell : starts[kk]) need[cell] = 1;
    rasterize_region(g, layer.contours, model);
    dilate(g, model, gap_cells, keepout);
    for (std::size_t i = 0; i < need.size(); ++i) {
      if (model[i]) need[i] = 0;  // landed on the model
    }
    // Runs per row, then stacked into rectangles where rows repeat.
    struct Run {
      int i0, i1, j0, j1;
    };
    std::vector<Run> finished, active;
    for (int j = 0; j <= g.ny; ++j) {
      std::vector<Run> row;
      if (j < g.ny) {
        for (int i = 0; i < g.nx;) {
          if (!need[g.at(i, j)] || keepout[g.at(i, j)]) {
            ++i;
            continue;
          }
          int e = i;
          while (e + 1 < g.nx && need[g.at(e + 1, j)] && !keepout[g.at(e + 1, j)]) ++e;
          row.push_back({i, e, j, j});
          i = e + 1;
        }
      }
      std::vector<Run> next;
      for (Run& r : row) {
        auto it = std::find_if(active.begin(), active.end(), [&](const Run& a) { return a.i0 == r.i0 && a.i1 == r.i1; });
        if (it != active.end()) {
          r.j0 = it->j0;
          active.erase(it);
        }
        next.push_back(r);
      }
      finished.insert(finished.end(), active.begin(), active.end());
      active = std::move(next);
    }
    for (const Run& r : finished) {
      const double x0 = g.x0 + r.i0 * g.cell, x1 = g.x0 + (r.i1 + 1) * g.cell;
      const double y0 = g.y0 + r.j0 * g.cell, y1 = g.y0 + (r.j1 + 1) * g.cell;
      layer.support_regions.push_back(rectangle(x0, y0, x1, y1));
      // Sparse lines along x on a global grid.
      const auto first = static_cast<long long>(std::ceil(y0 / line_spacing - 0.5));
      for (long long m = first;; ++m) {
        const double y = (static_cast<double>(m) + 0.5) * line_spacing;
        if (y >= y1) break;
        if (x1 - x0 > 1e-9) layer.support.push_back({Point2(x0, y), Point2(x1, y)});
      }
    }
  }
}

SliceResult slice_for_print(const TriangleMesh& mesh, const SliceConfig& config) {
  const TriangleMesh placed = place_on_bed(mesh, config);
  SliceResult result = slice_mesh(placed, config);
  for (LayerSlice& layer : result.layers) {
    generate_perimeters(layer, config);
    generate_infill(layer, config);
  }
  if (config.support_enabled) generate_supports(placed, result.layers, config);
  for (const LayerSlice& layer : result.layers) {
    result.warnings.insert(result.warnings.end(), layer.diagnostics.begin(), layer.diagnostics.end());
  }
  return result;
}

}  // namespace remixd
