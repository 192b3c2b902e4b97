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

#include <stdexcept>
#include <string>
#include <string_view>

namespace remixd {

/// Stable, machine-readable error codes. The service layer maps these onto
/// HTTP statuses; the CLI maps them onto exit code 1.
enum class ErrorCode {
  kInvalidArgument,
  kEmptyMesh,
  kStlParse,
  kNotWatertight,
  kMeshTooLarge,
  kNotFound,
  kJobNotReady,
  kNothingToUndo,
  kNotExportable,
  kBackendUnreachable,
  kBackendMalformed,
  kCorruptPayload,
  kVersionMismatch,
  kSliceFailed,
  kOutOfBuildVolume,
  kGcodeParse,
};

/// Snake-case name used on the wire ("nothing_to_undo", ...).
std::string_view error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace remixd
