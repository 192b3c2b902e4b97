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
#include <string_view>

#include "remixd/mesh.hpp"

namespace remixd {

struct DecimationConfig {
  double quality = 0.30;  // target fraction of faces kept
  std::size_t auto_threshold = 150'000;
};

/// Throws kInvalidArgument unless 0 < quality <= 1.
void validate_config(const DecimationConfig& config);

enum class HaltReason {
  kTargetReached,
  kIdentity,  // quality 1, nothing to do
  kQueueExhausted,  // every remaining collapse was blocked by a guard
};

std::string_view halt_reason_name(HaltReason reason);

struct DecimationStats {
  std::size_t input_triangles = 0;
  std::size_t target_triangles = 0;
  std::size_t output_triangles = 0;
  std::size_t collapses = 0;
  std::size_t rejected_flips = 0;
  std::size_t rejected_topology = 0;
  double max_error = 0;  // largest quadric error accepted
  HaltReason halt = HaltReason::kTargetReached;
};

struct SimplifyResult {
  TriangleMesh mesh;
  DecimationStats stats;
};

/// Quadric-error edge collapse down to round(quality * triangles). Boundary
/// edges are never collapsed and no collapse may turn an incident face by
/// more than 90 degrees. The collapse order is fully deterministic.
SimplifyResult simplify(const TriangleMesh& mesh, double quality);

struct AutoSimplifyResult {
  TriangleMesh mesh;
  bool applied = false;
  DecimationStats stats;
};

/// Simplifies only meshes with strictly more than `auto_threshold` faces.
AutoSimplifyResult maybe_auto_simplify(const TriangleMesh& mesh, const DecimationConfig& config);

}  // namespace remixd
