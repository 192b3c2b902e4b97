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


#include "remixd/json_codec.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace remixd {
namespace {

std::string string_field(const Json& j, const char* key, bool required) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) {
    if (required) throw Error(ErrorCode::kBackendMalformed, std::string("entry record lacks \"") + key + "\"");
    return {};
  }
  if (!it->is_string()) throw Error(ErrorCode::kBackendMalformed, std::string("entry field \"") + key + "\" is not a string");
  return it->get<std::string>();
}

Vector3 vec3_field(const Json& j, const char* key, const Vector3& fallback, ErrorCode code) {
  const auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (it->is_number()) return Vector3::Constant(it->get<double>());
  if (!it->is_array() || it->size() != 3) throw Error(code, std::string("\"") + key + "\" must be an array of 3 numbers");
  Vector3 v;
  for (int i = 0; i < 3; ++i) {
    if (!(*it)[i].is_number()) throw Error(code, std::string("\"") + key + "\" must be an array of 3 numbers");
    v[i] = (*it)[i].get<double>();
  }
  return v;
}

double number_field(const Json& j, const char* key, double fallback, ErrorCode code) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number()) throw Error(code, std::string("\"") + key + "\" must be a number");
  return it->get<double>();
}

int int_field(const Json& j, const char* key, int fallback, ErrorCode code) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  if (!it->is_number_integer()) throw Error(code, std::string("\"") + key + "\" must be an integer");
  return it->get<int>();
}

std::string name_field(const Json& j, const char* key, ErrorCode code) {
  const auto it = j.find(key);
  if (it == j.end() || !it->is_string()) throw Error(code, std::string("missing string \"") + key + "\"");
  return it->get<std::string>();
}

}  // namespace

Json to_json(const RepoEntry& entry) {
  return Json{{"id", entry.id},
              {"title", entry.title},
              {"thumbnail_url", entry.thumbnail_url},
              {"license", entry.license},
              {"remix_allowed", entry.remix_allowed},
              {"file_locators", entry.file_locators}};
}

RepoEntry entry_from_json(const Json& j) {
  if (!j.is_object()) throw Error(ErrorCode::kBackendMalformed, "entry record is not an object");
  RepoEntry e;
  e.id = string_field(j, "id", true);
  if (e.id.empty()) throw Error(ErrorCode::kBackendMalformed, "entry record has an empty id");
  e.title = string_field(j, "title", true);
  e.thumbnail_url = string_field(j, "thumbnail_url", false);
  e.license = string_field(j, "license", false);
  e.remix_allowed = license_allows_remix(e.license);
  if (const auto it = j.find("file_locators"); it != j.end() && !it->is_null()) {
    if (!it->is_array()) throw Error(ErrorCode::kBackendMalformed, "entry field \"file_locators\" is not an array");
    for (const Json& f : *it) {
      if (!f.is_string()) throw Error(ErrorCode::kBackendMalformed, "file locator is not a string");
      e.file_locators.push_back(f.get<std::string>());
    }
  }
  return e;
}

Json to_json(const SearchPage& page) {
  Json entries = Json::array();
  for (const RepoEntry& e : page.entries) entries.push_back(to_json(e));
  return Json{{"query", page.query}, {"page", page.page}, {"entries", entries}, {"total_available", page.total_available}};
}

Json to_json(const DownloadJob& job) {
  Json history = Json::array();
  for (JobState s : job.history) history.push_back(job_state_name(s));
  Json j{{"id", job.id},
         {"entry_id", job.entry_id},
         {"title", job.title},
         {"state", job_state_name(job.state)},
         {"history", history},
         {"auto_simplified", job.auto_simplified},
         {"downloaded_triangles", job.downloaded_triangles}};
  if (job.mesh) j["triangles"] = job.mesh->triangle_count();
  if (job.state == JobState::kFailed) j["failure_reason"] = job.failure_reason;
  return j;
}

Json to_json(const Transform& t) {
  const Eigen::Quaterniond& q = t.rotation;
  return Json{{"t", {t.translation.x(), t.translation.y(), t.translation.z()}},
              {"q", {q.w(), q.x(), q.y(), q.z()}},
              {"s", {t.scale.x(), t.scale.y(), t.scale.z()}}};
}

Transform transform_from_json(const Json& j, ErrorCode code) {
  if (j.is_null()) return Transform::identity();
  if (!j.is_object()) throw Error(code, "transform must be an object");
  Transform t;
  t.translation = vec3_field(j, "t", Vector3::Zero(), code);
  t.scale = vec3_field(j, "s", Vector3::Ones(), code);
  if (const auto it = j.find("q"); it != j.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 4) throw Error(code, "\"q\" must be [w, x, y, z]");
    double c[4];
    for (int i = 0; i < 4; ++i) {
      if (!(*it)[i].is_number()) throw Error(code, "\"q\" must be [w, x, y, z]");
      c[i] = (*it)[i].get<double>();
    }
    t.rotation = Eigen::Quaterniond(c[0], c[1], c[2], c[3]);
  } else if (j.contains("euler_deg")) {
    const Vector3 e = vec3_field(j, "euler_deg", Vector3::Zero(), code) * (std::numbers::pi / 180.0);
    t.rotation = Eigen::AngleAxisd(e.z(), Vector3::UnitZ()) * Eigen::AngleAxisd(e.y(), Vector3::UnitY()) *
                 Eigen::AngleAxisd(e.x(), Vector3::UnitX());
  }
  const double norm = t.rotation.norm();
  if (std::isfinite(norm) && norm > 0 && std::abs(norm - 1.0) > 1e-9) t.rotation.normalize();
  if (!t.valid()) throw Error(code, "transform needs finite values, a non-zero quaternion and positive scale");
  return t;
}

Json to_json(const PrimitiveKind& spec) {
  Json j{{"primitive", primitive_name(spec)}};
  std::visit(
      [&j](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, CubeSpec>) {
          j["edge"] = s.edge;
        } else if constexpr (std::is_same_v<T, SphereSpec>) {
          j["radius"] = s.radius;
          j["subdivisions"] = s.subdivisions;
        } else if constexpr (std::is_same_v<T, PyramidSpec>) {
          j["base_edge"] = s.base_edge;
          j["height"] = s.height;
        } else {
          j["radius"] = s.radius;
          j["height"] = s.height;
          j["segments"] = s.segments;
        }
      },
      spec);
  return j;
}

PrimitiveKind primitive_from_json(const Json& j, ErrorCode code) {
  if (!j.is_object()) throw Error(code, "primitive spec must be an object");
  const std::string name = name_field(j, "primitive", code);
  PrimitiveKind spec;
  if (name == "cube") {
    spec = CubeSpec{number_field(j, "edge", CubeSpec{}.edge, code)};
  } else if (name == "sphere") {
    spec = SphereSpec{number_field(j, "radius", SphereSpec{}.radius, code),
                      int_field(j, "subdivisions", SphereSpec{}.subdivisions, code)};
  } else if (name == "pyramid") {
    spec = PyramidSpec{number_field(j, "base_edge", PyramidSpec{}.base_edge, code),
                       number_field(j, "height", PyramidSpec{}.height, code)};
  } else if (name == "cylinder") {
    spec = CylinderSpec{number_field(j, "radius", CylinderSpec{}.radius, code),
                        number_field(j, "height", CylinderSpec{}.height, code),
                        int_field(j, "segments", CylinderSpec{}.segments, code)};
  } else {
    throw Error(code, "unknown primitive \"" + name + "\" (cube, sphere, pyramid, cylinder)");
  }
  try {
    validate_primitive(spec);
  } catch (const Error& e) {
    throw Error(code, e.what());
  }
  return spec;
}

Json to_json(const NodeSource& source) {
  return std::visit(
      [](const auto& s) -> Json {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, FromRepository>) {
          return {{"type", "repository"}, {"entry_id", s.entry_id}};
        } else if constexpr (std::is_same_v<T, FromPrimitive>) {
          return {{"type", "primitive"}, {"spec", to_json(s.spec)}};
        } else if constexpr (std::is_same_v<T, FromEnvironment>) {
          return {{"type", "environment"}, {"label", s.label}};
        } else if constexpr (std::is_same_v<T, FromCsg>) {
          return {{"type", "csg"}, {"op", csg_op_name(s.op)}, {"first", s.first}, {"second", s.second}};
        } else {
          return {{"type", "duplicate"}, {"of", s.of}};
        }
      },
      source);
}

NodeSource source_from_json(const Json& j, ErrorCode code) {
  if (!j.is_object()) throw Error(code, "node source must be an object");
  const std::string type = name_field(j, "type", code);
  if (type == "repository") return FromRepository{name_field(j, "entry_id", code)};
  if (type == "primitive") {
    if (!j.contains("spec")) throw Error(code, "primitive source lacks \"spec\"");
    return FromPrimitive{primitive_from_json(j["spec"], code)};
  }
  if (type == "environment") return FromEnvironment{name_field(j, "label", code)};
  if (type == "csg") {
    CsgOp op;
    try {
      op = parse_csg_op(name_field(j, "op", code));
    } catch (const Error& e) {
      throw Error(code, e.what());
    }
    return FromCsg{op, int_field(j, "first", 0, code), int_field(j, "second", 0, code)};
  }
  if (type == "duplicate") return FromDuplicate{int_field(j, "of", 0, code)};
  throw Error(code, "unknown node source type \"" + type + "\"");
}

Json to_json(const SliceConfig& c) {
  return Json{{"layer_height", c.layer_height},
              {"extrusion_width", c.extrusion_width},
              {"filament_diameter", c.filament_diameter},
              {"perimeter_count", c.perimeter_count},
              {"infill_density", c.infill_density},
              {"support_enabled", c.support_enabled},
              {"overhang_threshold_deg", c.overhang_threshold_deg},
              {"print_speed", c.print_speed},
              {"travel_speed", c.travel_speed},
              {"nozzle_temp", c.nozzle_temp},
              {"bed_temp", c.bed_temp},
              {"build_volume", {c.build_volume.x(), c.build_volume.y(), c.build_volume.z()}},
              {"retract_length", c.retract_length},
              {"retract_min_travel", c.retract_min_travel},
              {"retract_speed", c.retract_speed}};
}

SliceConfig slice_config_from_json(const Json& j, const SliceConfig& base, ErrorCode code) {
  if (j.is_null()) return base;
  if (!j.is_object()) throw Error(code, "slice config must be an object");
  const Json known = to_json(base);
  for (const auto& [key, value] : j.items()) {
    if (!known.contains(key)) throw Error(code, "unknown slice setting \"" + key + "\"");
  }
  SliceConfig c = base;
  c.layer_height = number_field(j, "layer_height", c.layer_height, code);
  c.extrusion_width = number_field(j, "extrusion_width", c.extrusion_width, code);
  c.filament_diameter = number_field(j, "filament_diameter", c.filament_diameter, code);
  c.perimeter_count = int_field(j, "perimeter_count", c.perimeter_count, code);
  c.infill_density = number_field(j, "infill_density", c.infill_density, code);
  if (const auto it = j.find("support_enabled"); it != j.end()) {
    if (!it->is_boolean()) throw Error(code, "\"support_enabled\" must be true or false");
    c.support_enabled = it->get<bool>();
  }
  c.overhang_threshold_deg = number_field(j, "overhang_threshold_deg", c.overhang_threshold_deg, code);
  c.print_speed = number_field(j, "print_speed", c.print_speed, code);
  c.travel_speed = number_field(j, "travel_speed", c.travel_speed, code);
  c.nozzle_temp = number_field(j, "nozzle_temp", c.nozzle_temp, code);
  c.bed_temp = number_field(j, "bed_temp", c.bed_temp, code);
  c.build_volume = vec3_field(j, "build_volume", c.build_volume, code);
  c.retract_length = number_field(j, "retract_length", c.retract_length, code);
  c.retract_min_travel = number_field(j, "retract_min_travel", c.retract_min_travel, code);
  c.retract_speed = number_field(j, "retract_speed", c.retract_speed, code);
  try {
    validate_config(c);
  } catch (const Error& e) {
    throw Error(code, e.what());
  }
  return c;
}

}  // namespace remixd
