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

// JSON mappings shared by the fixture index, the live backend, the service
// and the CLI. Field names follow the scene-file vocabulary.

#include "json.hpp"
#include "remixd/error.hpp"
#include "remixd/primitives.hpp"
#include "remixd/repo.hpp"
#include "remixd/scene.hpp"
#include "remixd/slicer.hpp"

namespace remixd {

using Json = nlohmann::json;

Json to_json(const RepoEntry& entry);
/// remix_allowed is always recomputed from the license; a stored value is
/// ignored. Errors: kBackendMalformed.
RepoEntry entry_from_json(const Json& j);

Json to_json(const SearchPage& page);
/// Job summary without the mesh itself.
Json to_json(const DownloadJob& job);

/// {"t":[x,y,z],"q":[w,x,y,z],"s":[sx,sy,sz]}.
Json to_json(const Transform& t);
/// Missing fields default to identity. "s" may be a single number and
/// "euler_deg" ([x,y,z], applied x then y then z) may stand in for "q". A
/// quaternion that is off unit length is normalized. Malformed input throws
/// Error(code).
Transform transform_from_json(const Json& j, ErrorCode code);

/// {"primitive":"cylinder","radius":20,"height":60,"segments":64}.
Json to_json(const PrimitiveKind& spec);
PrimitiveKind primitive_from_json(const Json& j, ErrorCode code);

Json to_json(const NodeSource& source);
NodeSource source_from_json(const Json& j, ErrorCode code);

Json to_json(const SliceConfig& config);
/// Overrides on top of `base`, field names as in SliceConfig. Unknown keys
/// and invalid results throw Error(code).
SliceConfig slice_config_from_json(const Json& j, const SliceConfig& base, ErrorCode code);

}  // namespace remixd
