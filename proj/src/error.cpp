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

#include "remixd/error.hpp"

namespace remixd {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kEmptyMesh: return "empty_mesh";
    case ErrorCode::kStlParse: return "stl_parse_error";
    case ErrorCode::kNotWatertight: return "not_watertight";
    case ErrorCode::kMeshTooLarge: return "mesh_too_large";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kJobNotReady: return "job_not_ready";
    case ErrorCode::kNothingToUndo: return "nothing_to_undo";
    case ErrorCode::kNotExportable: return "not_exportable";
    case ErrorCode::kBackendUnreachable: return "backend_unreachable";
    case ErrorCode::kBackendMalformed: return "backend_malformed";
    case ErrorCode::kCorruptPayload: return "corrupt_payload";
    case ErrorCode::kVersionMismatch: return "version_mismatch";
    case ErrorCode::kSliceFailed: return "slice_failed";
    case ErrorCode::kOutOfBuildVolume: return "out_of_build_volume";
    case ErrorCode::kGcodeParse: return "gcode_parse_error";
  }
  return "unknown";
}

}  // namespace remixd
