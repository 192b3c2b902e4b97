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

#include "remixd/csg.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <limits>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "remixd/topology.hpp"

namespace remixd {
namespace {

struct Plane {
  Vector3 normal = Vector3::Zero();
  double w = 0;

  void flip() {
    normal = -normal;
    w = -w;
  }
};

struct Polygon {
  std::vector<Vector3> vertices;
  Plane plane;

  void flip() {
    std::reverse(vertices.begin(), vertices.end());
    plane.flip();
  }
};

enum : int { kCoplanar = 0, kFront = 1, kBack = 2, kSpanning = 3 };

bool overlaps(const Aabb& box, const Polygon& p) {
  Aabb b{p.vertices.front(), p.vertices.front()};
  for (const Vector3& v : p.vertices) {
    b.min = b.min.cwiseMin(v);
    b.max = b.max.cwiseMax(v);
  }
  return !((b.max.array() < box.min.array()) || (box.max.array() < b.min.array())).any();
}

Aabb polygon_bounds(const std::vector<Polygon>& polygons) {
  Aabb b{Vector3::Constant(std::numeric_limits<double>::infinity()),
         Vector3::Constant(-std::numeric_limits<double>::infinity())};
  for (const Polygon& p : polygons) {
    for (const Vector3& v : p.vertices) {
      b.min = b.min.cwiseMin(v);
      b.max = b.max.cwiseMax(v);
    }
  }
  return b;
}

/// BSP tree over polygons, stored as an arena so traversal never recurses;
/// convex inputs produce chains as deep as their face count.
class BspTree {
 public:
  explicit BspTree(std::vector<Polygon> polygons, std::size_t* splits) : splits_(splits) {
    nodes_.emplace_back();
    build(std::move(polygons));
  }

  /// Removes the parts of `polygons` inside this tree's solid, or outside
  /// it when `inverted`. Polygons clear of `reach` are not tested: they are
  /// outside the solid, so they pass untouched (or vanish when inverted).
  std::vector<Polygon> clip(std::vector<Polygon> polygons, const Aabb& reach, bool inverted) const {
    std::vector<Polygon> result;
    std::vector<std::pair<int, std::vector<Polygon>>> work;
    std::vector<Polygon> near;
    for (Polygon& p : polygons) {
      if (overlaps(reach, p)) {
        near.push_back(std::move(p));
      } else if (!inverted) {
        result.push_back(std::move(p));
      }
    }
    if (nodes_.front().has_plane) {
      work.emplace_back(0, std::move(near));
    } else if (!inverted) {
      std::move(near.begin(), near.end(), std::back_inserter(result));
    }
    while (!work.empty()) {
      auto [id, list] = std::move(work.back());
      work.pop_back();
      const Node& node = nodes_[static_cast<std::size_t>(id)];
      Plane plane = node.plane;
      if (inverted) plane.flip();
      const int front_child = inverted ? node.back : node.front;
      const int back_child = inverted ? node.front : node.back;
      std::vector<Polygon> front, back;
      for (Polygon& p : list) split(plane, std::move(p), front, back, front, back);
      if (back_child >= 0) work.emplace_back(back_child, std::move(back));
      if (front_child >= 0) {
        work.emplace_back(front_child, std::move(front));
      } else {
        std::move(front.begin(), front.end(), std::back_inserter(result));
      }
    }
    return result;
  }

  void build(std::vector<Polygon> polygons) {
    if (polygons.empty()) return;
    std::vector<std::pair<int, std::vector<Polygon>>> work;
    work.emplace_back(0, std::move(polygons));
    while (!work.empty()) {
      auto [id, list] = std::move(work.back());
      work.pop_back();
      const auto index = static_cast<std::size_t>(id);
      if (!nodes_[index].has_plane) {
        nodes_[index].plane = list.front().plane;
        nodes_[index].has_plane = true;
      }
      const Plane plane = nodes_[index].plane;
      std::vector<Polygon> front, back;
      for (Polygon& p : list) {
        split(plane, std::move(p), nodes_[index].polygons, nodes_[index].polygons, front, back);
      }
      if (!front.empty()) {
        if (nodes_[index].front < 0) {
          nodes_[index].front = static_cast<int>(nodes_.size());
          nodes_.emplace_back();
        }
        work.emplace_back(nodes_[index].front, std::move(front));
      }
      if (!back.empty()) {
        if (nodes_[index].back < 0) {
          nodes_[index].back = static_cast<int>(nodes_.size());
          nodes_.emplace_back();
        }
        work.emplace_back(nodes_[index].back, std::move(back));
      }
    }
  }

 private:
  struct Node {
    Plane plane;
    bool has_plane = false;
    int front = -1;
    int back = -1;
    std::vector<Polygon> polygons;
  };

  /// Classifies `poly` against `plane` and distributes it (or its split
  /// halves) into the given lists. Coplanar polygons go front when their
  /// normal agrees with the plane's (dot >= 0), back otherwise.
  void split(const Plane& plane, Polygon&& poly, std::vector<Polygon>& coplanar_front,
             std::vector<Polygon>& coplanar_back, std::vector<Polygon>& front,
             std::vector<Polygon>& back) const {
    const std::size_t n = poly.vertices.size();
    int polygon_type = 0;
    types_.resize(n);
    dists_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = plane.normal.dot(poly.vertices[i]) - plane.w;
      dists_[i] = t;
      types_[i] = t < -kCsgEpsilon ? kBack : (t > kCsgEpsilon ? kFront : kCoplanar);
      polygon_type |= types_[i];
    }
    switch (polygon_type) {
      case kCoplanar:
        (plane.normal.dot(poly.plane.normal) >= 0 ? coplanar_front : coplanar_back).push_back(std::move(poly));
        return;
      case kFront:
        front.push_back(std::move(poly));
        return;
      case kBack:
        back.push_back(std::move(poly));
        return;
      default:
        break;
    }
    Polygon f{{}, poly.plane};
    Polygon b{{}, poly.plane};
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = (i + 1) % n;
      const int ti = types_[i];
      const int tj = types_[j];
      const Vector3& vi = poly.vertices[i];
      const Vector3& vj = poly.vertices[j];
      if (ti != kBack) f.vertices.push_back(vi);
      if (ti != kFront) b.vertices.push_back(vi);
      if ((ti | tj) == kSpanning) {
        // Parametrize from the lexicographically smaller end so that both
        // polygons sharing this edge compute the same point.
        const bool forward = std::lexicographical_compare(vi.data(), vi.data() + 3, vj.data(), vj.data() + 3);
        const Vector3& from = forward ? vi : vj;
        const Vector3& to = forward ? vj : vi;
        const double df = forward ? dists_[i] : dists_[j];
        const double dt = forward ? dists_[j] : dists_[i];
        const Vector3 v = from + (to - from) * (df / (df - dt));
        f.vertices.push_back(v);
        b.vertices.push_back(v);
      }
    }
    if (splits_) ++*splits_;
    if (f.vertices.size() >= 3) front.push_back(std::move(f));
    if (b.vertices.size() >= 3) back.push_back(std::move(b));
  }

  std::vector<Node> nodes_;
  std::size_t* splits_;
  mutable std::vector<int> types_;
  mutable std::vector<double> dists_;
};

std::vector<Polygon> to_polygons(const TriangleMesh& mesh) {
  std::vector<Polygon> out;
  out.reserve(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    Polygon p;
    p.vertices = {mesh.corner(i, 0), mesh.corner(i, 1), mesh.corner(i, 2)};
    const Vector3 n = triangle_normal(p.vertices[0], p.vertices[1], p.vertices[2]);
    const double len = n.norm();
    if (len <= 0) continue;
    p.plane.normal = n / len;
    p.plane.w = p.plane.normal.dot(p.vertices[0]);
    out.push_back(std::move(p));
  }
  return out;
}

/// Fan-triangulates polygons and welds their corners at the CSG epsilon.
TriangleMesh to_mesh(const std::vector<Polygon>& polygons) {
  std::vector<Vector3> points;
  std::vector<std::size_t> starts;
  for (const Polygon& p : polygons) {
    starts.push_back(points.size());
    points.insert(points.end(), p.vertices.begin(), p.vertices.end());
  }
  const std::vector<int> rep = weld_map(points, kCsgEpsilon);
  TriangleMesh mesh;
  mesh.vertices = points;
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    const std::size_t s = starts[k];
    for (std::size_t i = 1; i + 1 < polygons[k].vertices.size(); ++i) {
      const Triangle t(rep[s], rep[s + i], rep[s + i + 1]);
      if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) continue;
      mesh.triangles.push_back(t);
    }
  }
  return compact(mesh);
}

/// Removes zero-area triangles and pairs of coincident opposite triangles.
std::size_t drop_degenerate(TriangleMesh& mesh) {
  std::vector<Triangle> kept;
  kept.reserve(mesh.triangles.size());
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    if (triangle_area(mesh.corner(i, 0), mesh.corner(i, 1), mesh.corner(i, 2)) >= kDegenerateArea) {
      kept.push_back(mesh.triangles[i]);
    }
  }
  // Opposite duplicates enclose no volume.
  std::vector<std::pair<std::array<int, 3>, std::size_t>> keys;
  keys.reserve(kept.size());
  for (std::size_t i = 0; i < kept.size(); ++i) {
    std::array<int, 3> k{kept[i][0], kept[i][1], kept[i][2]};
    std::sort(k.begin(), k.end());
    keys.emplace_back(k, i);
  }
  std::sort(keys.begin(), keys.end());
  std::vector<char> removed(kept.size(), 0);
  for (std::size_t i = 0; i + 1 < keys.size(); ++i) {
    if (keys[i].first != keys[i + 1].first) continue;
    const Triangle& x = kept[keys[i].second];
    const Triangle& y = kept[keys[i + 1].second];
    const Vector3 nx = triangle_normal(mesh.vertices[static_cast<std::size_t>(x[0])], mesh.vertices[static_cast<std::size_t>(x[1])],
                                       mesh.vertices[static_cast<std::size_t>(x[2])]);
    const Vector3 ny = triangle_normal(mesh.vertices[static_cast<std::size_t>(y[0])], mesh.vertices[static_cast<std::size_t>(y[1])],
                                       mesh.vertices[static_cast<std::size_t>(y[2])]);
    if (nx.dot(ny) < 0) {
      removed[keys[i].second] = removed[keys[i + 1].second] = 1;
      ++i;
    }
  }
  std::vector<Triangle> out;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (!removed[i]) out.push_back(kept[i]);
  }
  const std::size_t dropped = mesh.triangles.size() - out.size();
  mesh.triangles = std::move(out);
  return dropped;
}

/// Splits triangles whose open edges pass through another open edge's
/// endpoint, closing the cracks BSP splitting leaves between neighbors.
std::size_t stitch_t_junctions(TriangleMesh& mesh, double tol) {
  const auto uses = edge_uses(mesh);
  std::vector<EdgeUse> open;
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    if (j - i == 1) open.push_back(uses[i]);
    i = j;
  }
  if (open.empty()) return 0;

  std::vector<int> candidates;
  for (const EdgeUse& e : open) {
    candidates.push_back(e.lo);
    candidates.push_back(e.hi);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  auto vx = [&](int v) { return mesh.vertices[static_cast<std::size_t>(v)].x(); };
  std::sort(candidates.begin(), candidates.end(), [&](int a, int b) { return vx(a) != vx(b) ? vx(a) < vx(b) : a < b; });

  // For each triangle: per local edge, the vertices to insert, by parameter.
  std::vector<std::array<std::vector<std::pair<double, int>>, 3>> inserts(mesh.triangles.size());
  std::size_t inserted = 0;
  for (const EdgeUse& e : open) {
    const Vector3& p = mesh.vertices[static_cast<std::size_t>(e.lo)];
    const Vector3& q = mesh.vertices[static_cast<std::size_t>(e.hi)];
    const Vector3 d = q - p;
    const double len2 = d.squaredNorm();
    if (len2 <= 0) continue;
    const double xmin = std::min(p.x(), q.x()) - tol;
    const double xmax = std::max(p.x(), q.x()) + tol;
    auto it = std::lower_bound(candidates.begin(), candidates.end(), xmin,
                               [&](int v, double x) { return vx(v) < x; });
    const Triangle& tri = mesh.triangles[static_cast<std::size_t>(e.triangle)];
    int local = 0;
    for (int k = 0; k < 3; ++k) {
      const int u = tri[k], v = tri[(k + 1) % 3];
      if (std::min(u, v) == e.lo && std::max(u, v) == e.hi) local = k;
    }
    const int from = tri[local];
    const Vector3& origin = mesh.vertices[static_cast<std::size_t>(from)];
    const Vector3 dir = mesh.vertices[static_cast<std::size_t>(tri[(local + 1) % 3])] - origin;
    for (; it != candidates.end() && vx(*it) <= xmax; ++it) {
      const int v = *it;
      if (v == e.lo || v == e.hi) continue;
      const Vector3& w = mesh.vertices[static_cast<std::size_t>(v)];
      const double t = (w - origin).dot(dir) / len2;
      if (t <= 0 || t >= 1) continue;
      if ((origin + dir * t - w).norm() > tol) continue;
      if ((w - p).norm() <= tol || (w - q).norm() <= tol) continue;
      inserts[static_cast<std::size_t>(e.triangle)][static_cast<std::size_t>(local)].emplace_back(t, v);
      ++inserted;
    }
  }
  if (inserted == 0) return 0;

  std::vector<Triangle> out;
  out.reserve(mesh.triangles.size() + inserted);
  for (std::size_t i = 0; i < mesh.triangles.size(); ++i) {
    auto& edges = inserts[i];
    if (edges[0].empty() && edges[1].empty() && edges[2].empty()) {
      out.push_back(mesh.triangles[i]);
      continue;
    }
    // Boundary loop of the triangle with the inserted points, then a fan
    // from the corner opposite the most-split edge.
    std::vector<int> loop;
    int best = 0;
    for (int k = 0; k < 3; ++k) {
      auto& list = edges[static_cast<std::size_t>(k)];
      std::sort(list.begin(), list.end());
      if (list.size() > edges[static_cast<std::size_t>(best)].size()) best = k;
    }
    const int start = (best + 2) % 3;  // corner opposite edge `best`
    for (int step = 0; step < 3; ++step) {
      const int k = (start + step) % 3;
      loop.push_back(mesh.triangles[i][k]);
      for (const auto& [t, v] : edges[static_cast<std::size_t>(k)]) loop.push_back(v);
    }
    for (std::size_t k = 1; k + 1 < loop.size(); ++k) out.emplace_back(loop[0], loop[k], loop[k + 1]);
  }
  mesh.triangles = std::move(out);
  return inserted;
}

/// Welds the endpoints of open edges that lie within `tol` of each other,
/// zipping cracks whose sides never got a shared vertex.
std::size_t weld_open_vertices(TriangleMesh& mesh, double tol) {
  const auto uses = edge_uses(mesh);
  std::vector<int> ends;
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    if (j - i == 1) {
      ends.push_back(uses[i].lo);
      ends.push_back(uses[i].hi);
    }
    i = j;
  }
  if (ends.empty()) return 0;
  std::sort(ends.begin(), ends.end());
  ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
  std::vector<Vector3> points;
  points.reserve(ends.size());
  for (int v : ends) points.push_back(mesh.vertices[static_cast<std::size_t>(v)]);
  const std::vector<int> rep = weld_map(points, tol);
  std::vector<int> target(mesh.vertices.size());
  for (std::size_t v = 0; v < target.size(); ++v) target[v] = static_cast<int>(v);
  std::size_t welded = 0;
  for (std::size_t i = 0; i < ends.size(); ++i) {
    if (rep[i] == static_cast<int>(i)) continue;
    target[static_cast<std::size_t>(ends[i])] = ends[static_cast<std::size_t>(rep[i])];
    ++welded;
  }
  if (welded == 0) return 0;
  std::vector<Triangle> kept;
  kept.reserve(mesh.triangles.size());
  for (Triangle t : mesh.triangles) {
    for (int k = 0; k < 3; ++k) t[k] = target[static_cast<std::size_t>(t[k])];
    if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) kept.push_back(t);
  }
  mesh.triangles = std::move(kept);
  return welded;
}

/// Resolves edges shared by more than two faces by discarding their
/// smallest sliver users. Such slivers are left over where neighbors
/// disagree about a split.
std::size_t drop_excess_slivers(TriangleMesh& mesh) {
  const auto uses = edge_uses(mesh);
  std::vector<double> area(mesh.triangles.size());
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    area[t] = triangle_area(mesh.corner(t, 0), mesh.corner(t, 1), mesh.corner(t, 2));
  }
  std::vector<char> removed(mesh.triangles.size(), 0);
  std::size_t dropped = 0;
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    std::vector<std::size_t> users;
    for (std::size_t k = i; k < j; ++k) {
      const auto t = static_cast<std::size_t>(uses[k].triangle);
      if (!removed[t]) users.push_back(t);
    }
    std::sort(users.begin(), users.end(), [&](std::size_t x, std::size_t y) { return area[x] < area[y]; });
    for (std::size_t k = 0; users.size() - k > 2 && area[users[k]] < kSliverArea; ++k) {
      removed[users[k]] = 1;
      ++dropped;
    }
    i = j;
  }
  if (dropped == 0) return 0;
  std::vector<Triangle> kept;
  kept.reserve(mesh.triangles.size() - dropped);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    if (!removed[t]) kept.push_back(mesh.triangles[t]);
  }
  mesh.triangles = std::move(kept);
  return dropped;
}

/// Closes boundary loops shorter than `max_perimeter` by ear clipping, and
/// zips zero-width cracks of any length.
std::size_t fill_small_holes(TriangleMesh& mesh, double max_perimeter) {
  const auto uses = edge_uses(mesh);
  // Open half-edges as the triangle traverses them; the patch runs the
  // other way.
  std::vector<std::pair<int, int>> open;
  for (std::size_t i = 0; i < uses.size();) {
    std::size_t j = i;
    while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
    if (j - i == 1) {
      const EdgeUse& e = uses[i];
      open.emplace_back(e.forward ? e.hi : e.lo, e.forward ? e.lo : e.hi);
    }
    i = j;
  }
  if (open.empty()) return 0;
  std::sort(open.begin(), open.end());
  std::vector<char> used(open.size(), 0);
  auto out_edges = [&](int v) {
    return std::equal_range(open.begin(), open.end(), std::pair(v, 0),
                            [](const auto& x, const auto& y) { return x.first < y.first; });
  };
  // Shortest cycle of unused open half-edges through open[first]. Where a
  // vertex has several open edges this splits figure-eight cracks into
  // their small loops.
  auto shortest_loop = [&](std::size_t first) -> std::vector<std::size_t> {
    constexpr std::size_t kMaxHops = 64;
    const int start = open[first].first;
    std::map<int, std::size_t> via;  // vertex -> half-edge that reached it
    std::vector<int> frontier{open[first].second};
    via[open[first].second] = first;
    for (std::size_t hop = 0; hop < kMaxHops && !frontier.empty(); ++hop) {
      std::vector<int> next;
      for (int v : frontier) {
        if (v == start) {
          std::vector<std::size_t> path;
          for (int w = start;;) {
            const std::size_t e = via.at(w);
            path.push_back(e);
            w = open[e].first;
            if (w == start) break;
          }
          std::reverse(path.begin(), path.end());
          return path;
        }
        const auto [lo, hi] = out_edges(v);
        for (auto it = lo; it != hi; ++it) {
          const auto e = static_cast<std::size_t>(it - open.begin());
          if (used[e] || via.count(it->second)) continue;
          via[it->second] = e;
          next.push_back(it->second);
        }
      }
      frontier = std::move(next);
    }
    return {};
  };

  std::vector<std::pair<int, int>> collapse;
  std::set<std::pair<int, int>> edges;
  for (const EdgeUse& e : uses) edges.insert(e.key());

  std::vector<char> touched(mesh.vertices.size(), 0);
  std::size_t filled = 0;
  for (std::size_t first = 0; first < open.size(); ++first) {
    if (used[first]) continue;
    const std::vector<std::size_t> path = shortest_loop(first);
    if (path.empty()) continue;
    for (std::size_t e : path) used[e] = 1;
    std::vector<int> loop;
    double perimeter = 0;
    bool clash = false;
    for (std::size_t e : path) {
      loop.push_back(open[e].first);
      perimeter += (mesh.vertices[static_cast<std::size_t>(open[e].second)] -
                    mesh.vertices[static_cast<std::size_t>(open[e].first)])
                       .norm();
      clash = clash || touched[static_cast<std::size_t>(open[e].first)];
    }
    // A vertex already moved or patched this pass waits for the next one.
    if (loop.size() < 3 || clash) continue;
    const std::vector<int> ring = loop;
    // Ear clipping on the shortest diagonal that does not duplicate an
    // existing edge.
    std::vector<Triangle> patch;
    while (loop.size() > 3) {
      std::size_t best = loop.size();
      double best_len = 0;
      for (std::size_t i = 0; i < loop.size(); ++i) {
        const int p = loop[(i + loop.size() - 1) % loop.size()];
        const int n = loop[(i + 1) % loop.size()];
        if (edges.count(std::pair(std::min(p, n), std::max(p, n)))) continue;
        const double len = (mesh.vertices[static_cast<std::size_t>(n)] - mesh.vertices[static_cast<std::size_t>(p)]).norm();
        if (best == loop.size() || len < best_len) {
          best = i;
          best_len = len;
        }
      }
      if (best == loop.size()) break;
      const int p = loop[(best + loop.size() - 1) % loop.size()];
      const int n = loop[(best + 1) % loop.size()];
      patch.emplace_back(p, loop[best], n);
      edges.emplace(std::min(p, n), std::max(p, n));
      loop.erase(loop.begin() + static_cast<std::ptrdiff_t>(best));
    }
    if (loop.size() > 3) {
      // Every diagonal is taken; fan around a new centroid vertex instead.
      Vector3 c = Vector3::Zero();
      for (int v : loop) c += mesh.vertices[static_cast<std::size_t>(v)];
      const int center = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(c / static_cast<double>(loop.size()));
      for (std::size_t i = 0; i < loop.size(); ++i) {
        patch.emplace_back(loop[i], loop[(i + 1) % loop.size()], center);
      }
    } else {
      patch.emplace_back(loop[0], loop[1], loop[2]);
    }
    double patch_area = 0;
    double thinnest = std::numeric_limits<double>::infinity();
    for (const Triangle& t : patch) {
      const double area = triangle_area(mesh.vertices[static_cast<std::size_t>(t[0])],
                                        mesh.vertices[static_cast<std::size_t>(t[1])],
                                        mesh.vertices[static_cast<std::size_t>(t[2])]);
      patch_area += area;
      thinnest = std::min(thinnest, area);
    }
    if (patch_area < kDegenerateArea && ring.size() > 3) {
      // A zero-width crack, however long: zip it by merging its closest
      // pair of non-adjacent vertices, which splits it into smaller loops.
      std::size_t bi = 0, bj = 2;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ring.size(); ++i) {
        for (std::size_t j = i + 2; j < ring.size(); ++j) {
          if (i == 0 && j + 1 == ring.size()) continue;
          const double d = (mesh.vertices[static_cast<std::size_t>(ring[i])] - mesh.vertices[static_cast<std::size_t>(ring[j])]).norm();
          if (d < best) {
            best = d;
            bi = i;
            bj = j;
          }
        }
      }
      collapse.emplace_back(ring[bj], ring[bi]);
    } else if (perimeter > max_perimeter) {
      continue;
    } else if (patch_area < kDegenerateArea) {
      // A patch this small would be discarded as degenerate; collapse the
      // loop to a point instead.
      for (int v : ring) collapse.emplace_back(v, ring[0]);
    } else if (thinnest < kDegenerateArea) {
      // Shrink the loop by its shortest edge and let the next pass retry.
      std::size_t shortest = 0;
      double shortest_len = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < ring.size(); ++i) {
        const double len = (mesh.vertices[static_cast<std::size_t>(ring[(i + 1) % ring.size()])] -
                            mesh.vertices[static_cast<std::size_t>(ring[i])])
                               .norm();
        if (len < shortest_len) {
          shortest = i;
          shortest_len = len;
        }
      }
      collapse.emplace_back(ring[(shortest + 1) % ring.size()], ring[shortest]);
    } else {
      mesh.triangles.insert(mesh.triangles.end(), patch.begin(), patch.end());
    }
    for (int v : ring) touched[static_cast<std::size_t>(v)] = 1;
    ++filled;
  }
  if (!collapse.empty()) {
    std::vector<int> target(mesh.vertices.size());
    for (std::size_t v = 0; v < target.size(); ++v) target[v] = static_cast<int>(v);
    for (const auto& [from, to] : collapse) target[static_cast<std::size_t>(from)] = to;
    std::vector<Triangle> kept;
    kept.reserve(mesh.triangles.size());
    for (Triangle t : mesh.triangles) {
      for (int k = 0; k < 3; ++k) t[k] = target[static_cast<std::size_t>(t[k])];
      if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) kept.push_back(t);
    }
    mesh.triangles = std::move(kept);
  }
  return filled;
}

std::vector<Polygon> flipped(std::vector<Polygon> polygons) {
  for (Polygon& p : polygons) p.flip();
  return polygons;
}

/// The classic BSP boolean sequence (clip each operand against the other's
/// tree, with inversions per operation) in functional form. Trees are used
/// only for their planes, so a polygon is split by the other operand's
/// planes and never by its own.
std::vector<Polygon> run_bsp(CsgOp op, std::vector<Polygon> pa, std::vector<Polygon> pb, std::size_t* splits) {
  const Aabb reach_a = polygon_bounds(pa).inflated(10 * kCsgEpsilon);
  const Aabb reach_b = polygon_bounds(pb).inflated(10 * kCsgEpsilon);
  const BspTree a(pa, splits);
  const BspTree b(pb, splits);
  std::vector<Polygon> out;
  switch (op) {
    case CsgOp::kUnion: {
      out = b.clip(std::move(pa), reach_b, false);
      std::vector<Polygon> kept = a.clip(std::move(pb), reach_a, false);
      // Second pass drops B faces coplanar with (and facing like) A's.
      kept = flipped(a.clip(flipped(std::move(kept)), reach_a, false));
      std::move(kept.begin(), kept.end(), std::back_inserter(out));
      return out;
    }
    case CsgOp::kDifference: {
      out = flipped(b.clip(flipped(std::move(pa)), reach_b, false));
      std::vector<Polygon> kept = a.clip(std::move(pb), reach_a, true);
      kept = a.clip(flipped(std::move(kept)), reach_a, true);
      std::move(kept.begin(), kept.end(), std::back_inserter(out));
      return out;
    }
    case CsgOp::kIntersection: {
      out = b.clip(flipped(std::move(pa)), reach_b, true);
      out = flipped(std::move(out));
      std::vector<Polygon> kept = flipped(a.clip(std::move(pb), reach_a, true));
      kept = flipped(a.clip(std::move(kept), reach_a, true));
      std::move(kept.begin(), kept.end(), std::back_inserter(out));
      return out;
    }
  }
  return {};
}

void check_operand(const TriangleMesh& mesh, const char* which) {
  if (mesh.empty()) return;
  if (mesh.triangle_count() > kCsgMaxTriangles) {
    throw Error(ErrorCode::kMeshTooLarge, std::string("csg operand ") + which + " has " +
                                              std::to_string(mesh.triangle_count()) +
                                              " triangles (limit 100000); simplify it first");
  }
  validate_mesh(mesh);
  const EdgeReport report = check_watertight(mesh);
  if (!report.watertight) {
    throw Error(ErrorCode::kNotWatertight,
                std::string("csg operand ") + which + " is not watertight (" + std::to_string(report.boundary_edges) +
                    " boundary, " + std::to_string(report.non_manifold_edges) + " non-manifold, " +
                    std::to_string(report.misoriented_edges) + " misoriented edges)");
  }
}

/// BSP boolean followed by crack repair. Output may still be open when
/// faces meet at grazing angles just outside eps.
TriangleMesh bsp_boolean(CsgOp op, const TriangleMesh& a, const TriangleMesh& b, CsgStats& stats) {
  TriangleMesh mesh = to_mesh(run_bsp(op, to_polygons(a), to_polygons(b), &stats.split_polygons));
  // Degenerate removal can open new cracks and stitching can expose new
  // slivers; a few rounds settle it. Patching leftover holes may create
  // slivers of its own, so the whole sequence repeats.
  for (int pass = 0; pass < 8; ++pass) {
    bool settled = false;
    for (int round = 0; round < 8 && !settled; ++round) {
      const std::size_t stitched = stitch_t_junctions(mesh, 2 * kCsgEpsilon);
      const std::size_t welded = weld_open_vertices(mesh, 2 * kCsgEpsilon);
      const std::size_t dropped = drop_degenerate(mesh);
      stats.stitched_t_junctions += stitched;
      settled = dropped == 0 && stitched == 0 && welded == 0;
    }
    const std::size_t slivers = drop_excess_slivers(mesh);
    const std::size_t holes = fill_small_holes(mesh, kCsgHolePerimeter);
    stats.dropped_slivers += slivers;
    stats.filled_holes += holes;
    if (settled && slivers == 0 && holes == 0) break;
  }
  drop_degenerate(mesh);
  return compact(mesh);
}

}  // namespace

std::string_view csg_op_name(CsgOp op) {
  switch (op) {
    case CsgOp::kUnion: return "union";
    case CsgOp::kDifference: return "difference";
    case CsgOp::kIntersection: return "intersection";
  }
  return "union";
}

CsgOp parse_csg_op(std::string_view name) {
  if (name == "union") return CsgOp::kUnion;
  if (name == "difference" || name == "subtract") return CsgOp::kDifference;
  if (name == "intersection" || name == "intersect") return CsgOp::kIntersection;
  throw Error(ErrorCode::kInvalidArgument, "unknown csg op '" + std::string(name) + "'");
}

CsgResult csg(CsgOp op, const TriangleMesh& a, const TriangleMesh& b) {
  check_operand(a, "A");
  check_operand(b, "B");
  CsgResult result;
  result.stats.input_triangles_a = a.triangle_count();
  result.stats.input_triangles_b = b.triangle_count();

  bool disjoint = a.empty() || b.empty();
  if (!disjoint) {
    const Aabb ba = compute_bounds(a).inflated(kCsgEpsilon);
    const Aabb bb = compute_bounds(b);
    disjoint = ((ba.max.array() < bb.min.array()) || (bb.max.array() < ba.min.array())).any();
  }
  TriangleMesh mesh;
  if (disjoint) {
    switch (op) {
      case CsgOp::kUnion: mesh = merged(a, b); break;
      case CsgOp::kDifference: mesh = a; break;
      case CsgOp::kIntersection: break;
    }
  } else {
    mesh = bsp_boolean(op, a, b, result.stats);
  }
  RepairResult repaired = repair_mesh(mesh);
  if (!disjoint) {
    // Grazing contacts just outside eps can leave cracks no local repair
    // closes. Nudging B a hair breaks the alignment.
    static const Vector3 kNudges[] = {{0.53, 0.31, 0.79}, {-0.62, 0.71, 0.33}, {0.27, -0.58, 0.77}};
    for (const Vector3& dir : kNudges) {
      if (repaired.mesh.empty() || is_watertight(repaired.mesh)) break;
      Transform nudge;
      nudge.translation = dir.normalized() * kCsgNudge;
      CsgStats retry;
      RepairResult candidate = repair_mesh(bsp_boolean(op, a, apply_transform(b, nudge), retry));
      ++result.stats.nudged_retries;
      if (candidate.mesh.empty() || is_watertight(candidate.mesh)) repaired = std::move(candidate);
    }
  }
  result.mesh = std::move(repaired.mesh);
  result.stats.repair = std::move(repaired.diagnostics);
  result.stats.output_triangles = result.mesh.triangle_count();
  return result;
}

}  // namespace remixd
