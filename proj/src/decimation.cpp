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


#include "remixd/decimation.hpp"

#include <algorithm>
#include <array>
#include <iterator>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "remixd/error.hpp"
#include "remixd/repair.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

using Quadric = Eigen::Matrix4d;

struct Candidate {
  double cost;
  int u;
  int v;
  unsigned su;
  unsigned sv;

  bool operator>(const Candidate& o) const {
    if (cost != o.cost) return cost > o.cost;
    if (u != o.u) return u > o.u;
    return v > o.v;
  }
};

class Collapser {
 public:
  explicit Collapser(const TriangleMesh& mesh)
      : pos_(mesh.vertices),
        tris_(mesh.triangles),
        tri_alive_(mesh.triangles.size(), 1),
        vert_alive_(mesh.vertices.size(), 1),
        locked_(mesh.vertices.size(), 0),
        stamp_(mesh.vertices.size(), 0),
        quadric_(mesh.vertices.size(), Quadric::Zero()),
        incident_(mesh.vertices.size()),
        live_triangles_(mesh.triangles.size()) {
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      const Triangle& tri = tris_[t];
      const Vector3 c = (pos_[idx(tri[1])] - pos_[idx(tri[0])]).cross(pos_[idx(tri[2])] - pos_[idx(tri[0])]);
      const double len = c.norm();
      Quadric k = Quadric::Zero();
      if (len > 0) {
        const Vector3 n = c / len;
        Eigen::Vector4d p(n.x(), n.y(), n.z(), -n.dot(pos_[idx(tri[0])]));
        // Weighted by area so dense regions do not dominate.
        k = (0.5 * len) * (p * p.transpose());
      }
      for (int i = 0; i < 3; ++i) {
        quadric_[idx(tri[i])] += k;
        incident_[idx(tri[i])].push_back(static_cast<int>(t));
      }
    }
    // Vertices on open or over-shared edges stay put.
    const auto uses = edge_uses(mesh);
    for (std::size_t i = 0; i < uses.size();) {
      std::size_t j = i;
      while (j < uses.size() && uses[j].key() == uses[i].key()) ++j;
      if (j - i != 2) locked_[idx(uses[i].lo)] = locked_[idx(uses[i].hi)] = 1;
      i = j;
    }
    for (std::size_t i = 0; i < uses.size(); ++i) {
      if (i == 0 || uses[i].key() != uses[i - 1].key()) push(uses[i].lo, uses[i].hi);
    }
  }

  void run(std::size_t target, DecimationStats& stats) {
    while (live_triangles_ >= target + 2) {
      if (heap_.empty()) {
        stats.halt = HaltReason::kQueueExhausted;
        return;
      }
      const Candidate c = heap_.top();
      heap_.pop();
      if (!vert_alive_[idx(c.u)] || !vert_alive_[idx(c.v)]) continue;
      if (stamp_[idx(c.u)] != c.su || stamp_[idx(c.v)] != c.sv) continue;
      if (try_collapse(c, stats)) {
        ++stats.collapses;
        stats.max_error = std::max(stats.max_error, c.cost);
      }
    }
    stats.halt = HaltReason::kTargetReached;
  }

  TriangleMesh result() const {
    TriangleMesh out;
    out.vertices = pos_;
    for (std::size_t t = 0; t < tris_.size(); ++t) {
      if (tri_alive_[t]) out.triangles.push_back(tris_[t]);
    }
    return compact(out);
  }

 private:
  static std::size_t idx(int i) { return static_cast<std::size_t>(i); }

  /// Best position for merging u and v, and its error.
  std::pair<Vector3, double> placement(int u, int v) const {
    const Quadric q = quadric_[idx(u)] + quadric_[idx(v)];
    auto error = [&](const Vector3& x) {
      const Eigen::Vector4d h(x.x(), x.y(), x.z(), 1.0);
      return std::max(0.0, h.dot(q * h));
    };
    if (locked_[idx(u)]) return {pos_[idx(u)], error(pos_[idx(u)])};
    if (locked_[idx(v)]) return {pos_[idx(v)], error(pos_[idx(v)])};

    const Eigen::Matrix3d a = q.topLeftCorner<3, 3>();
    const Vector3 b = q.topRightCorner<3, 1>();
    const double scale = a.norm();
    const Vector3& pu = pos_[idx(u)];
    const Vector3& pv = pos_[idx(v)];
    if (scale > 0 && std::abs(a.determinant()) > 1e-10 * scale * scale * scale) {
      const Vector3 x = a.ldlt().solve(-b);
      // An optimum far off the edge means the system is nearly singular.
      const double reach = 2.0 * (pv - pu).norm();
      if (x.allFinite() && (x - 0.5 * (pu + pv)).norm() <= reach) return {x, error(x)};
    }
    const Vector3 mid = 0.5 * (pu + pv);
    std::pair<Vector3, double> best{pu, error(pu)};
    for (const Vector3& x : {pv, mid}) {
      const double e = error(x);
      if (e < best.second) best = {x, e};
    }
    return best;
  }

  void push(int u, int v) {
    if (locked_[idx(u)] && locked_[idx(v)]) return;
    const double cost = placement(u, v).second;
    heap_.push({cost, u, v, stamp_[idx(u)], stamp_[idx(v)]});
  }

  void prune(int v) {
    auto& list = incident_[idx(v)];
    list.erase(std::remove_if(list.begin(), list.end(), [&](int t) { return !tri_alive_[idx(t)]; }), list.end());
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (int t : incident_[idx(v)]) {
      for (int i = 0; i < 3; ++i) {
        if (tris_[idx(t)][i] != v) out.push_back(tris_[idx(t)][i]);
      }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  static bool has(const Triangle& t, int v) { return t[0] == v || t[1] == v || t[2] == v; }

  bool try_collapse(const Candidate& c, DecimationStats& stats) {
    const int u = c.u;
    const int v = c.v;
    prune(u);
    prune(v);
    std::vector<int> shared;
    for (int t : incident_[idx(u)]) {
      if (has(tris_[idx(t)], v)) shared.push_back(t);
    }
    if (shared.size() != 2) {
      ++stats.rejected_topology;
      return false;
    }
    // Link condition: u and v may share only the two opposite corners.
    const std::vector<int> nu = neighbors(u);
    const std::vector<int> nv = neighbors(v);
    std::vector<int> common;
    std::set_intersection(nu.begin(), nu.end(), nv.begin(), nv.end(), std::back_inserter(common));
    if (common.size() != 2) {
      ++stats.rejected_topology;
      return false;
    }

    const Vector3 x = placement(u, v).first;
    const int keep = locked_[idx(v)] ? v : u;
    const int gone = keep == u ? v : u;

    // Faces that survive must not flip or collapse to zero area.
    std::vector<std::array<int, 3>> survivors;
    for (int w : {u, v}) {
      for (int t : incident_[idx(w)]) {
        if (t == shared[0] || t == shared[1]) continue;
        const Triangle& tri = tris_[idx(t)];
        if (w == v && has(tri, u)) continue;
        Vector3 p[3];
        std::array<int, 3> renamed{};
        for (int i = 0; i < 3; ++i) {
          const bool moved = tri[i] == u || tri[i] == v;
          p[i] = moved ? x : pos_[idx(tri[i])];
          renamed[static_cast<std::size_t>(i)] = moved ? keep : tri[i];
        }
        const Vector3 before = (pos_[idx(tri[1])] - pos_[idx(tri[0])]).cross(pos_[idx(tri[2])] - pos_[idx(tri[0])]);
        const Vector3 after = (p[1] - p[0]).cross(p[2] - p[0]);
        if (0.5 * after.norm() < kDegenerateArea || before.dot(after) <= 0) {
          ++stats.rejected_flips;
          return false;
        }
        std::sort(renamed.begin(), renamed.end());
        survivors.push_back(renamed);
      }
    }
    std::sort(survivors.begin(), survivors.end());
    if (std::adjacent_find(survivors.begin(), survivors.end()) != survivors.end()) {
      ++stats.rejected_topology;
      return false;
    }

    for (int t : shared) tri_alive_[idx(t)] = 0;
    live_triangles_ -= 2;
    for (int t : incident_[idx(gone)]) {
      if (!tri_alive_[idx(t)]) continue;
      Triangle& tri = tris_[idx(t)];
      for (int i = 0; i < 3; ++i) {
        if (tri[i] == gone) tri[i] = keep;
      }
      incident_[idx(keep)].push_back(t);
    }
    incident_[idx(gone)].clear();
    vert_alive_[idx(gone)] = 0;
    pos_[idx(keep)] = x;
    quadric_[idx(keep)] += quadric_[idx(gone)];
    ++stamp_[idx(keep)];
    prune(keep);
    for (int w : neighbors(keep)) push(std::min(keep, w), std::max(keep, w));
    return true;
  }

  std::vector<Vector3> pos_;
  std::vector<Triangle> tris_;
  std::vector<char> tri_alive_;
  std::vector<char> vert_alive_;
  std::vector<char> locked_;
  std::vector<unsigned> stamp_;
  std::vector<Quadric> quadric_;
  std::vector<std::vector<int>> incident_;
  std::size_t live_triangles_;
  std::priority_queue<Candidate, std::vector<Candidate>, std::greater<>> heap_;
};

void check_quality(double quality) {
  if (!(quality > 0.0 && quality <= 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "quality must be in (0, 1], got " + std::to_string(quality));
  }
}

}  // namespace

void validate_config(const DecimationConfig& config) { check_quality(config.quality); }

std::string_view halt_reason_name(HaltReason reason) {
  switch (reason) {
    case HaltReason::kTargetReached: return "target_reached";
    case HaltReason::kIdentity: return "identity";
    case HaltReason::kQueueExhausted: return "queue_exhausted";
  }
  return "target_reached";
}

SimplifyResult simplify(const TriangleMesh& mesh, double quality) {
  check_quality(quality);
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "cannot simplify an empty mesh");
  validate_mesh(mesh);

  SimplifyResult result;
  DecimationStats& stats = result.stats;
  stats.input_triangles = mesh.triangle_count();
  stats.target_triangles = static_cast<std::size_t>(std::llround(quality * static_cast<double>(mesh.triangle_count())));
  if (quality == 1.0) {
    result.mesh = mesh;
    stats.output_triangles = mesh.triangle_count();
    stats.halt = HaltReason::kIdentity;
    return result;
  }
  Collapser collapser(mesh);
  collapser.run(stats.target_triangles, stats);
  result.mesh = repair_mesh(collapser.result()).mesh;
  stats.output_triangles = result.mesh.triangle_count();
  return result;
}

AutoSimplifyResult maybe_auto_simplify(const TriangleMesh& mesh, const DecimationConfig& config) {
  validate_config(config);
  AutoSimplifyResult result;
  if (mesh.triangle_count() > config.auto_threshold) {
    SimplifyResult s = simplify(mesh, config.quality);
    result.mesh = std::move(s.mesh);
    result.stats = s.stats;
    result.applied = true;
  } else {
    result.mesh = mesh;
    result.stats.input_triangles = result.stats.output_triangles = result.stats.target_triangles = mesh.triangle_count();
    result.stats.halt = HaltReason::kIdentity;
  }
  return result;
}

}  // namespace remixd
