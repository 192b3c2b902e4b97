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


#include "remixd/scene.hpp"

#include <algorithm>
#include <utility>

#include "remixd/error.hpp"
#include "remixd/repair.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

MeshPtr share(TriangleMesh mesh) { return std::make_shared<const TriangleMesh>(std::move(mesh)); }

bool same_mesh(const MeshPtr& a, const MeshPtr& b, double tol) {
  if (a == b) return true;
  if (!a || !b) return false;
  return approx_equal(*a, *b, tol);
}

bool same_node(const SceneNode& a, const SceneNode& b, double tol) {
  return a.id == b.id && a.kind == b.kind && a.source == b.source && a.label == b.label && a.warnings == b.warnings &&
         approx_equal(a.transform, b.transform, tol) && same_mesh(a.mesh, b.mesh, tol);
}

bool same_gathered(const GatheredItem& a, const GatheredItem& b, double tol) {
  return a.entry_id == b.entry_id && a.title == b.title && same_mesh(a.mesh, b.mesh, tol);
}

template <typename T, typename Eq>
bool same_list(const std::vector<T>& a, const std::vector<T>& b, Eq eq) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), eq);
}

bool same_record(const UndoRecord& a, const UndoRecord& b, double tol) {
  return a.tag == b.tag && a.gathered_index == b.gathered_index && a.added_node == b.added_node && a.node == b.node &&
         approx_equal(a.previous_transform, b.previous_transform, tol) && a.removed_positions == b.removed_positions &&
         same_list(a.removed_gathered, b.removed_gathered,
                   [tol](const GatheredItem& x, const GatheredItem& y) { return same_gathered(x, y, tol); }) &&
         same_list(a.removed_nodes, b.removed_nodes,
                   [tol](const SceneNode& x, const SceneNode& y) { return same_node(x, y, tol); });
}

}  // namespace

std::string_view node_kind_name(NodeKind kind) { return kind == NodeKind::kModel ? "model" : "environment"; }

std::vector<int> derived_from(const NodeSource& source) {
  if (const auto* c = std::get_if<FromCsg>(&source)) return {c->first, c->second};
  if (const auto* d = std::get_if<FromDuplicate>(&source)) return {d->of};
  return {};
}

std::string_view undo_tag_name(UndoTag tag) {
  switch (tag) {
    case UndoTag::kGather: return "gather";
    case UndoTag::kRemoveGathered: return "remove_gathered";
    case UndoTag::kPlace: return "place";
    case UndoTag::kSetTransform: return "set_transform";
    case UndoTag::kDuplicate: return "duplicate";
    case UndoTag::kCsg: return "csg";
    case UndoTag::kImportEnvironment: return "import_environment";
  }
  return "place";
}

Scene::Scene(std::string id) : id_(std::move(id)) {}

std::size_t Scene::position(int id) const {
  const auto it = std::find_if(nodes_.begin(), nodes_.end(), [id](const SceneNode& n) { return n.id == id; });
  if (it == nodes_.end()) throw Error(ErrorCode::kNotFound, "unknown node " + std::to_string(id));
  return static_cast<std::size_t>(it - nodes_.begin());
}

const SceneNode& Scene::node(int id) const { return nodes_[position(id)]; }

bool Scene::has_node(int id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [id](const SceneNode& n) { return n.id == id; });
}

TriangleMesh Scene::world_mesh(int id) const {
  const SceneNode& n = node(id);
  return apply_transform(*n.mesh, n.transform);
}

int Scene::add_node(SceneNode node, UndoTag tag) {
  node.id = next_id_++;
  UndoRecord record;
  record.tag = tag;
  record.added_node = node.id;
  nodes_.push_back(std::move(node));
  undo_.push_back(std::move(record));
  return nodes_.back().id;
}

std::size_t Scene::gather(const DownloadJob& job) {
  if (job.state != JobState::kReady || !job.mesh) {
    throw Error(ErrorCode::kJobNotReady, "job " + job.id + " is " + std::string(job_state_name(job.state)) + ", not ready");
  }
  gathered_.push_back({job.entry_id, job.title, share(canonicalize(*job.mesh))});
  UndoRecord record;
  record.tag = UndoTag::kGather;
  record.gathered_index = gathered_.size() - 1;
  undo_.push_back(std::move(record));
  return gathered_.size() - 1;
}

void Scene::remove_gathered(std::size_t index) {
  if (index >= gathered_.size()) {
    throw Error(ErrorCode::kNotFound, "gathered index " + std::to_string(index) + " out of range (have " +
                                          std::to_string(gathered_.size()) + ")");
  }
  UndoRecord record;
  record.tag = UndoTag::kRemoveGathered;
  record.gathered_index = index;
  record.removed_gathered.push_back(gathered_[index]);
  gathered_.erase(gathered_.begin() + static_cast<std::ptrdiff_t>(index));
  undo_.push_back(std::move(record));
}

int Scene::place(std::size_t gathered_index, const Transform& transform) {
  if (gathered_index >= gathered_.size()) {
    throw Error(ErrorCode::kNotFound, "gathered index " + std::to_string(gathered_index) + " out of range (have " +
                                          std::to_string(gathered_.size()) + ")");
  }
  validate_transform(transform);
  const GatheredItem& item = gathered_[gathered_index];
  SceneNode n;
  n.kind = NodeKind::kModel;
  n.source = FromRepository{item.entry_id};
  n.label = item.title;
  n.mesh = item.mesh;
  n.transform = transform;
  return add_node(std::move(n), UndoTag::kPlace);
}

int Scene::place(const PrimitiveKind& spec, const Transform& transform) {
  validate_primitive(spec);
  validate_transform(transform);
  SceneNode n;
  n.kind = NodeKind::kModel;
  n.source = FromPrimitive{spec};
  n.label = std::string(primitive_name(spec));
  n.mesh = share(canonicalize(make_primitive(spec)));
  n.transform = transform;
  return add_node(std::move(n), UndoTag::kPlace);
}

void Scene::set_transform(int id, const Transform& transform) {
  validate_transform(transform);
  SceneNode& n = nodes_[position(id)];
  UndoRecord record;
  record.tag = UndoTag::kSetTransform;
  record.node = id;
  record.previous_transform = n.transform;
  n.transform = transform;
  undo_.push_back(std::move(record));
}

int Scene::duplicate(int id) {
  const SceneNode& original = node(id);
  SceneNode copy;
  copy.kind = NodeKind::kModel;
  copy.source = FromDuplicate{id};
  copy.label = original.label + " copy";
  copy.mesh = original.mesh;
  copy.transform = original.transform;
  copy.warnings = original.warnings;
  return add_node(std::move(copy), UndoTag::kDuplicate);
}

int Scene::apply_csg(CsgOp op, int first, int second) {
  if (first == second) throw Error(ErrorCode::kInvalidArgument, "csg needs two distinct nodes");
  const std::size_t pa = position(first);
  const std::size_t pb = position(second);
  const CsgResult result = csg(op, world_mesh(first), world_mesh(second));

  SceneNode out;
  out.kind = NodeKind::kModel;
  out.source = FromCsg{op, first, second};
  out.label = std::string(csg_op_name(op)) + " of " + nodes_[pa].label + " and " + nodes_[pb].label;
  out.mesh = share(canonicalize(result.mesh));
  if (!out.mesh->empty() && !is_watertight(*out.mesh)) {
    out.warnings.push_back("result is not watertight");
  }

  UndoRecord record;
  record.tag = UndoTag::kCsg;
  std::vector<std::size_t> consumed;
  for (std::size_t p : {pa, pb}) {
    if (nodes_[p].kind == NodeKind::kModel) consumed.push_back(p);
  }
  std::sort(consumed.begin(), consumed.end());
  for (std::size_t p : consumed) {
    record.removed_positions.push_back(p);
    record.removed_nodes.push_back(nodes_[p]);
  }
  for (auto it = consumed.rbegin(); it != consumed.rend(); ++it) {
    nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(*it));
  }
  out.id = next_id_++;
  record.added_node = out.id;
  nodes_.push_back(std::move(out));
  undo_.push_back(std::move(record));
  return nodes_.back().id;
}

int Scene::import_environment(std::string_view stl_bytes, const Transform& pose, std::string label) {
  validate_transform(pose);
  StlLoadResult loaded = load_stl(stl_bytes);
  RepairResult repaired = repair_mesh(loaded.mesh);
  if (repaired.mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "environment scan is empty after repair");
  SceneNode n;
  n.kind = NodeKind::kEnvironment;
  n.source = FromEnvironment{label};
  n.label = std::move(label);
  n.mesh = share(canonicalize(repaired.mesh));
  n.transform = pose;
  const EdgeReport report = check_watertight(*n.mesh);
  if (!report.watertight) {
    n.warnings.push_back("scan is not watertight (" + std::to_string(report.boundary_edges) + " boundary, " +
                         std::to_string(report.non_manifold_edges) + " non-manifold edges); csg against it will be rejected");
  }
  return add_node(std::move(n), UndoTag::kImportEnvironment);
}

void Scene::undo() {
  if (undo_.empty()) throw Error(ErrorCode::kNothingToUndo, "nothing to undo");
  UndoRecord record = std::move(undo_.back());
  undo_.pop_back();
  switch (record.tag) {
    case UndoTag::kGather:
      gathered_.erase(gathered_.begin() + static_cast<std::ptrdiff_t>(record.gathered_index));
      break;
    case UndoTag::kRemoveGathered:
      gathered_.insert(gathered_.begin() + static_cast<std::ptrdiff_t>(record.gathered_index),
                       std::move(record.removed_gathered.front()));
      break;
    case UndoTag::kSetTransform:
      nodes_[position(record.node)].transform = record.previous_transform;
      break;
    case UndoTag::kCsg:
      nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(position(record.added_node)));
      for (std::size_t i = 0; i < record.removed_nodes.size(); ++i) {
        nodes_.insert(nodes_.begin() + static_cast<std::ptrdiff_t>(record.removed_positions[i]),
                      std::move(record.removed_nodes[i]));
      }
      break;
    case UndoTag::kPlace:
    case UndoTag::kDuplicate:
    case UndoTag::kImportEnvironment:
      nodes_.erase(nodes_.begin() + static_cast<std::ptrdiff_t>(position(record.added_node)));
      break;
  }
}

std::string Scene::export_node_stl(int id) const {
  const SceneNode& n = node(id);
  if (!n.exportable()) {
    throw Error(ErrorCode::kNotExportable, "node " + std::to_string(id) + " is environment geometry and cannot be exported");
  }
  if (n.mesh->empty()) throw Error(ErrorCode::kEmptyMesh, "node " + std::to_string(id) + " has an empty mesh");
  return write_stl(apply_transform(*n.mesh, n.transform));
}

Scene Scene::restore(std::string id, std::vector<SceneNode> nodes, std::vector<GatheredItem> gathered,
                     std::vector<UndoRecord> undo, int next_id) {
  Scene s(std::move(id));
  s.nodes_ = std::move(nodes);
  s.gathered_ = std::move(gathered);
  s.undo_ = std::move(undo);
  s.next_id_ = next_id;
  return s;
}

bool scenes_equal(const Scene& a, const Scene& b, double tol) {
  return a.id() == b.id() &&
         same_list(a.nodes(), b.nodes(), [tol](const SceneNode& x, const SceneNode& y) { return same_node(x, y, tol); }) &&
         same_list(a.gathered(), b.gathered(),
                   [tol](const GatheredItem& x, const GatheredItem& y) { return same_gathered(x, y, tol); }) &&
         same_list(a.undo_stack(), b.undo_stack(),
                   [tol](const UndoRecord& x, const UndoRecord& y) { return same_record(x, y, tol); });
}

}  // namespace remixd
