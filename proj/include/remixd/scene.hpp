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
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "remixd/csg.hpp"
#include "remixd/mesh.hpp"
#include "remixd/primitives.hpp"
#include "remixd/repo.hpp"

namespace remixd {

enum class NodeKind { kModel, kEnvironment };

std::string_view node_kind_name(NodeKind kind);

struct FromRepository {
  std::string entry_id;
  bool operator==(const FromRepository&) const = default;
};
struct FromPrimitive {
  PrimitiveKind spec;
  bool operator==(const FromPrimitive&) const = default;
};
struct FromEnvironment {
  std::string label;
  bool operator==(const FromEnvironment&) const = default;
};
struct FromCsg {
  CsgOp op;
  int first;
  int second;
  bool operator==(const FromCsg&) const = default;
};
struct FromDuplicate {
  int of;
  bool operator==(const FromDuplicate&) const = default;
};
using NodeSource = std::variant<FromRepository, FromPrimitive, FromEnvironment, FromCsg, FromDuplicate>;

/// Node ids this source was derived from (empty for roots).
std::vector<int> derived_from(const NodeSource& source);

using MeshPtr = std::shared_ptr<const TriangleMesh>;

struct SceneNode {
  int id = 0;
  NodeKind kind = NodeKind::kModel;
  NodeSource source;
  std::string label;
  MeshPtr mesh;  // local frame, immutable, shared between copies
  Transform transform;
  std::vector<std::string> warnings;

  bool exportable() const { return kind == NodeKind::kModel; }
};

struct GatheredItem {
  std::string entry_id;
  std::string title;
  MeshPtr mesh;
};

enum class UndoTag { kGather, kRemoveGathered, kPlace, kSetTransform, kDuplicate, kCsg, kImportEnvironment };

std::string_view undo_tag_name(UndoTag tag);

/// What it takes to step back over one mutation. Fields not used by a tag
/// stay at their defaults.
struct UndoRecord {
  UndoTag tag = UndoTag::kPlace;
  std::size_t gathered_index = 0;  // kGather, kRemoveGathered
  std::vector<GatheredItem> removed_gathered;  // kRemoveGathered
  int added_node = 0;  // kPlace, kDuplicate, kCsg, kImportEnvironment
  int node = 0;  // kSetTransform
  Transform previous_transform;  // kSetTransform
  std::vector<std::size_t> removed_positions;  // kCsg: list positions, ascending
  std::vector<SceneNode> removed_nodes;  // kCsg: consumed operands
};

/// The remix session: placed nodes, the gather carousel and the undo stack.
/// Copies are cheap snapshots because meshes are shared and immutable. Every
/// mutation either pushes exactly one undo record or throws and leaves the
/// scene untouched.
class Scene {
 public:
  explicit Scene(std::string id = "scene");

  const std::string& id() const { return id_; }
  const std::vector<SceneNode>& nodes() const { return nodes_; }
  const std::vector<GatheredItem>& gathered() const { return gathered_; }
  const std::vector<UndoRecord>& undo_stack() const { return undo_; }
  int next_node_id() const { return next_id_; }

  /// Errors: kNotFound.
  const SceneNode& node(int id) const;
  bool has_node(int id) const;
  /// The node's mesh with its transform applied.
  TriangleMesh world_mesh(int id) const;

  /// Appends a ready download to the carousel; returns its index.
  /// Errors: kJobNotReady.
  std::size_t gather(const DownloadJob& job);
  /// Errors: kNotFound for a bad index.
  void remove_gathered(std::size_t index);

  /// Errors: kNotFound for a bad index, kInvalidArgument for a bad transform.
  int place(std::size_t gathered_index, const Transform& transform);
  /// Errors: kInvalidArgument for a bad spec or transform.
  int place(const PrimitiveKind& spec, const Transform& transform);
  /// Always pushes an undo record, even when nothing changes.
  void set_transform(int node, const Transform& transform);
  /// The copy is always a model node, whatever the source's kind.
  int duplicate(int node);
  /// Bakes both operands into world space and replaces them with the result
  /// (identity transform). Environment operands are kept. Errors from the
  /// boolean propagate with the scene unchanged.
  int apply_csg(CsgOp op, int first, int second);
  /// Parses, repairs and adds an environment node. Open or non-manifold
  /// scans are accepted with a warning on the node.
  int import_environment(std::string_view stl_bytes, const Transform& pose, std::string label);
  /// Errors: kNothingToUndo.
  void undo();

  /// Binary STL of the world-frame mesh. Errors: kNotExportable for
  /// environment nodes, kEmptyMesh.
  std::string export_node_stl(int node) const;

  /// Rebuilds a scene from stored parts; used by the scene file reader.
  static Scene restore(std::string id, std::vector<SceneNode> nodes, std::vector<GatheredItem> gathered,
                       std::vector<UndoRecord> undo, int next_id);

 private:
  std::size_t position(int id) const;
  int add_node(SceneNode node, UndoTag tag);

  std::string id_;
  std::vector<SceneNode> nodes_;
  std::vector<GatheredItem> gathered_;
  std::vector<UndoRecord> undo_;
  int next_id_ = 1;
};

/// Deep comparison with numeric tolerance on transforms and vertices. The
/// next-id counter is left out: ids are never reused, so undo cannot
/// rewind it.
bool scenes_equal(const Scene& a, const Scene& b, double tol = 1e-9);

}  // namespace remixd
