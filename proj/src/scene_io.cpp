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


#include "remixd/scene_io.hpp"

#include <sodium.h>

#include <algorithm>
#include <map>
#include <set>
#include <utility>

#include "remixd/error.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

constexpr ErrorCode kCorrupt = ErrorCode::kCorruptPayload;

std::string mesh_b64(const MeshPtr& mesh) {
  if (!mesh || mesh->empty()) return {};
  return base64_encode(write_stl(*mesh));
}

/// Decodes mesh blocks and shares identical ones, as the saved scene did.
class MeshReader {
 public:
  MeshPtr read(const Json& j) {
    if (!j.is_string()) throw Error(kCorrupt, "mesh_stl_b64 must be a string");
    const std::string& text = j.get_ref<const std::string&>();
    if (const auto it = cache_.find(text); it != cache_.end()) return it->second;
    TriangleMesh mesh;
    if (!text.empty()) {
      try {
        mesh = load_stl(base64_decode(text)).mesh;
      } catch (const Error& e) {
        throw Error(kCorrupt, std::string("embedded mesh does not parse: ") + e.what());
      }
    }
    auto ptr = std::make_shared<const TriangleMesh>(std::move(mesh));
    cache_.emplace(text, ptr);
    return ptr;
  }

 private:
  std::map<std::string, MeshPtr> cache_;
};

const Json& field(const Json& j, const char* key) {
  const auto it = j.find(key);
  if (it == j.end()) throw Error(kCorrupt, std::string("scene file lacks \"") + key + "\"");
  return *it;
}

const Json& array_field(const Json& j, const char* key) {
  const Json& a = field(j, key);
  if (!a.is_array()) throw Error(kCorrupt, std::string("\"") + key + "\" must be an array");
  return a;
}

std::string string_of(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw Error(kCorrupt, std::string("\"") + key + "\" must be a string");
  return v.get<std::string>();
}

template <typename Int>
Int int_of(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw Error(kCorrupt, std::string("\"") + key + "\" must be an integer");
  if constexpr (std::is_unsigned_v<Int>) {
    if (v.get<long long>() < 0) throw Error(kCorrupt, std::string("\"") + key + "\" must not be negative");
  }
  return v.get<Int>();
}

Json node_to_json(const SceneNode& n) {
  Json warnings = n.warnings;
  return Json{{"id", n.id},
              {"kind", node_kind_name(n.kind)},
              {"source", to_json(n.source)},
              {"label", n.label},
              {"transform", to_json(n.transform)},
              {"warnings", warnings},
              {"mesh_stl_b64", mesh_b64(n.mesh)}};
}

SceneNode node_from_json(const Json& j, MeshReader& meshes) {
  if (!j.is_object()) throw Error(kCorrupt, "node must be an object");
  SceneNode n;
  n.id = int_of<int>(j, "id");
  const std::string kind = string_of(j, "kind");
  if (kind == "model") {
    n.kind = NodeKind::kModel;
  } else if (kind == "environment") {
    n.kind = NodeKind::kEnvironment;
  } else {
    throw Error(kCorrupt, "unknown node kind \"" + kind + "\"");
  }
  n.source = source_from_json(field(j, "source"), kCorrupt);
  n.label = string_of(j, "label");
  n.transform = transform_from_json(field(j, "transform"), kCorrupt);
  for (const Json& w : array_field(j, "warnings")) {
    if (!w.is_string()) throw Error(kCorrupt, "warnings must be strings");
    n.warnings.push_back(w.get<std::string>());
  }
  n.mesh = meshes.read(field(j, "mesh_stl_b64"));
  return n;
}

Json gathered_to_json(const GatheredItem& g) {
  return Json{{"entry_id", g.entry_id}, {"title", g.title}, {"mesh_stl_b64", mesh_b64(g.mesh)}};
}

GatheredItem gathered_from_json(const Json& j, MeshReader& meshes) {
  if (!j.is_object()) throw Error(kCorrupt, "gathered item must be an object");
  return {string_of(j, "entry_id"), string_of(j, "title"), meshes.read(field(j, "mesh_stl_b64"))};
}

Json undo_to_json(const UndoRecord& r) {
  Json j{{"tag", undo_tag_name(r.tag)}};
  switch (r.tag) {
    case UndoTag::kGather:
      j["gathered_index"] = r.gathered_index;
      break;
    case UndoTag::kRemoveGathered:
      j["gathered_index"] = r.gathered_index;
      j["item"] = gathered_to_json(r.removed_gathered.front());
      break;
    case UndoTag::kSetTransform:
      j["node"] = r.node;
      j["previous_transform"] = to_json(r.previous_transform);
      break;
    case UndoTag::kCsg: {
      j["added_node"] = r.added_node;
      j["removed_positions"] = r.removed_positions;
      Json removed = Json::array();
      for (const SceneNode& n : r.removed_nodes) removed.push_back(node_to_json(n));
      j["removed_nodes"] = removed;
      break;
    }
    case UndoTag::kPlace:
    case UndoTag::kDuplicate:
    case UndoTag::kImportEnvironment:
      j["added_node"] = r.added_node;
      break;
  }
  return j;
}

UndoTag parse_undo_tag(const std::string& name) {
  for (UndoTag t : {UndoTag::kGather, UndoTag::kRemoveGathered, UndoTag::kPlace, UndoTag::kSetTransform,
                    UndoTag::kDuplicate, UndoTag::kCsg, UndoTag::kImportEnvironment}) {
    if (undo_tag_name(t) == name) return t;
  }
  throw Error(kCorrupt, "unknown undo tag \"" + name + "\"");
}

UndoRecord undo_from_json(const Json& j, MeshReader& meshes) {
  if (!j.is_object()) throw Error(kCorrupt, "undo record must be an object");
  UndoRecord r;
  r.tag = parse_undo_tag(string_of(j, "tag"));
  switch (r.tag) {
    case UndoTag::kGather:
      r.gathered_index = int_of<std::size_t>(j, "gathered_index");
      break;
    case UndoTag::kRemoveGathered:
      r.gathered_index = int_of<std::size_t>(j, "gathered_index");
      r.removed_gathered.push_back(gathered_from_json(field(j, "item"), meshes));
      break;
    case UndoTag::kSetTransform:
      r.node = int_of<int>(j, "node");
      r.previous_transform = transform_from_json(field(j, "previous_transform"), kCorrupt);
      break;
    case UndoTag::kCsg: {
      r.added_node = int_of<int>(j, "added_node");
      for (const Json& p : array_field(j, "removed_positions")) {
        if (!p.is_number_unsigned()) throw Error(kCorrupt, "removed_positions must be non-negative integers");
        r.removed_positions.push_back(p.get<std::size_t>());
      }
      for (const Json& n : array_field(j, "removed_nodes")) r.removed_nodes.push_back(node_from_json(n, meshes));
      if (r.removed_positions.size() != r.removed_nodes.size() ||
          !std::is_sorted(r.removed_positions.begin(), r.removed_positions.end())) {
        throw Error(kCorrupt, "csg undo record positions do not match its nodes");
      }
      break;
    }
    case UndoTag::kPlace:
    case UndoTag::kDuplicate:
    case UndoTag::kImportEnvironment:
      r.added_node = int_of<int>(j, "added_node");
      break;
  }
  return r;
}

/// Cheap structural checks so a tampered file fails at load rather than at
/// some later undo.
void check_consistency(const std::vector<SceneNode>& nodes, const std::vector<UndoRecord>& undo, int next_id) {
  std::set<int> ids;
  for (const SceneNode& n : nodes) {
    if (n.id <= 0 || n.id >= next_id) throw Error(kCorrupt, "node id " + std::to_string(n.id) + " is out of range");
    if (!ids.insert(n.id).second) throw Error(kCorrupt, "duplicate node id " + std::to_string(n.id));
  }
  for (const UndoRecord& r : undo) {
    if (r.added_node >= next_id) throw Error(kCorrupt, "undo record refers to an id that was never issued");
    for (const SceneNode& n : r.removed_nodes) {
      if (n.id <= 0 || n.id >= next_id) throw Error(kCorrupt, "undo record holds an out-of-range node id");
    }
  }
}

}  // namespace

std::string base64_encode(std::string_view bytes) {
  if (bytes.empty()) return {};
  std::string out(sodium_base64_ENCODED_LEN(bytes.size(), sodium_base64_VARIANT_ORIGINAL), '\0');
  sodium_bin2base64(out.data(), out.size(), reinterpret_cast<const unsigned char*>(bytes.data()), bytes.size(),
                    sodium_base64_VARIANT_ORIGINAL);
  out.pop_back();  // terminating NUL
  return out;
}

std::string base64_decode(std::string_view text) {
  std::string out(text.size() / 4 * 3 + 3, '\0');
  std::size_t len = 0;
  const char* end = nullptr;
  if (sodium_base642bin(reinterpret_cast<unsigned char*>(out.data()), out.size(), text.data(), text.size(), nullptr,
                        &len, &end, sodium_base64_VARIANT_ORIGINAL) != 0 ||
      end != text.data() + text.size()) {
    throw Error(kCorrupt, "invalid base64 block");
  }
  out.resize(len);
  return out;
}

Json scene_to_json(const Scene& scene) {
  Json nodes = Json::array();
  for (const SceneNode& n : scene.nodes()) nodes.push_back(node_to_json(n));
  Json gathered = Json::array();
  for (const GatheredItem& g : scene.gathered()) gathered.push_back(gathered_to_json(g));
  Json undo = Json::array();
  for (const UndoRecord& r : scene.undo_stack()) undo.push_back(undo_to_json(r));
  return Json{{"version", kSceneFileVersion}, {"scene_id", scene.id()},      {"next_id", scene.next_node_id()},
              {"nodes", nodes},                {"gathered", gathered}, {"undo", undo}};
}

Scene scene_from_json(const Json& j) {
  if (!j.is_object()) throw Error(kCorrupt, "scene file must be a JSON object");
  const Json& version = field(j, "version");
  if (!version.is_number_integer()) throw Error(kCorrupt, "\"version\" must be an integer");
  if (version.get<long long>() != kSceneFileVersion) {
    throw Error(ErrorCode::kVersionMismatch, "scene file version " + version.dump() + " is not supported (expected " +
                                                 std::to_string(kSceneFileVersion) + ")");
  }
  MeshReader meshes;
  std::vector<SceneNode> nodes;
  for (const Json& n : array_field(j, "nodes")) nodes.push_back(node_from_json(n, meshes));
  std::vector<GatheredItem> gathered;
  for (const Json& g : array_field(j, "gathered")) gathered.push_back(gathered_from_json(g, meshes));
  std::vector<UndoRecord> undo;
  for (const Json& r : array_field(j, "undo")) undo.push_back(undo_from_json(r, meshes));
  const int next_id = int_of<int>(j, "next_id");
  check_consistency(nodes, undo, next_id);
  return Scene::restore(string_of(j, "scene_id"), std::move(nodes), std::move(gathered), std::move(undo), next_id);
}

std::string save_scene(const Scene& scene) { return scene_to_json(scene).dump(); }

Scene load_scene(std::string_view bytes) {
  Json j = Json::parse(bytes.begin(), bytes.end(), nullptr, false);
  if (j.is_discarded()) throw Error(kCorrupt, "scene file is not valid JSON");
  return scene_from_json(j);
}

Json node_summary(const SceneNode& n) {
  Json j{{"id", n.id},
         {"kind", node_kind_name(n.kind)},
         {"source", to_json(n.source)},
         {"label", n.label},
         {"transform", to_json(n.transform)},
         {"warnings", n.warnings},
         {"exportable", n.exportable()}};
  const TriangleMesh world = apply_transform(*n.mesh, n.transform);
  j["triangles"] = world.triangle_count();
  j["watertight"] = !world.empty() && is_watertight(world);
  j["volume"] = world.empty() ? 0.0 : signed_volume(world);
  if (!world.empty()) {
    const Aabb b = compute_bounds(world);
    j["bounds"] = {{"min", {b.min.x(), b.min.y(), b.min.z()}}, {"max", {b.max.x(), b.max.y(), b.max.z()}}};
  }
  return j;
}

Json scene_summary(const Scene& scene) {
  Json nodes = Json::array();
  for (const SceneNode& n : scene.nodes()) nodes.push_back(node_summary(n));
  Json gathered = Json::array();
  for (std::size_t i = 0; i < scene.gathered().size(); ++i) {
    const GatheredItem& g = scene.gathered()[i];
    gathered.push_back({{"index", i}, {"entry_id", g.entry_id}, {"title", g.title}, {"triangles", g.mesh->triangle_count()}});
  }
  Json undo = Json::array();
  for (const UndoRecord& r : scene.undo_stack()) undo.push_back(undo_tag_name(r.tag));
  return Json{{"scene_id", scene.id()}, {"next_id", scene.next_node_id()}, {"nodes", nodes},
              {"gathered", gathered},   {"undo", undo},                    {"undo_depth", scene.undo_stack().size()}};
}

}  // namespace remixd
