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

#include <string>
#include <string_view>

#include "remixd/json_codec.hpp"
#include "remixd/scene.hpp"

namespace remixd {

inline constexpr int kSceneFileVersion = 1;

/// Self-contained JSON document; meshes travel as base64 binary STL and an
/// empty mesh as "". The undo stack is included.
std::string save_scene(const Scene& scene);
/// Errors: kVersionMismatch for any version other than kSceneFileVersion,
/// kCorruptPayload for everything else that does not parse.
Scene load_scene(std::string_view bytes);

Json scene_to_json(const Scene& scene);
Scene scene_from_json(const Json& j);

/// Scene-file node fields minus the mesh, plus geometry facts for clients.
Json node_summary(const SceneNode& node);
/// Whole-scene summary for the service: nodes, carousel and undo depth.
Json scene_summary(const Scene& scene);

std::string base64_encode(std::string_view bytes);
/// Errors: kCorruptPayload on bad characters or padding.
std::string base64_decode(std::string_view text);

}  // namespace remixd
