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

#include <chrono>
#include <filesystem>
#include <string>
#include <vector>

#include "remixd/json_codec.hpp"
#include "remixd/repo.hpp"
#include "remixd/scene.hpp"

namespace remixd {

/// A remix session as a flat JSON array of steps, each an object with an
/// "op" field:
///
///   search            {"query", "page"?}
///   gather            {"entry_id"}                 waits for the download
///   remove_gathered   {"index"}
///   place             {"gathered_index" | primitive fields, "transform"?}
///   transform         {"node", "transform"}
///   duplicate         {"node"}
///   csg               {"operation", "first", "second"}
///   undo              {}
///   import_environment {"path", "pose"?, "label"?}
///   export_stl        {"node", "file"}
///   export_gcode      {"node", "file", "config"?}
///   save_scene        {"file"}
///
/// Steps that create a node may name it with "as"; later steps can use that
/// name wherever a node id is expected.
struct ReplayOptions {
  std::filesystem::path out_dir;  // exports and report.json go here
  /// Relative environment paths are tried here first, then next to the
  /// script.
  std::filesystem::path asset_dir;
  std::filesystem::path script_dir;
  std::chrono::milliseconds download_timeout{120'000};
};

struct ReplayResult {
  Json report;
  Scene scene;
  std::vector<std::filesystem::path> outputs;
};

/// Errors: kInvalidArgument for a malformed script (with the step number),
/// plus whatever the failing step raised, prefixed with its number.
ReplayResult replay_script(const Json& script, RepoClient& repo, const ReplayOptions& options);

/// Reads and parses a script file. Errors: kNotFound, kInvalidArgument.
Json load_script(const std::filesystem::path& path);

}  // namespace remixd
