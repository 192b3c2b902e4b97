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
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "remixd/slicer.hpp"

namespace remixd {

/// One address word such as X12.5.
struct GcodeWord {
  char letter = 0;
  double value = 0;

  bool operator==(const GcodeWord&) const = default;
};

/// A single line. Comment-only and blank lines have an empty op. Commands
/// outside the dialect keep their source text in `raw` and are written back
/// unchanged.
struct GcodeCommand {
  std::string op;
  std::vector<GcodeWord> words;
  std::optional<std::string> comment;  // text after ';'
  std::optional<std::string> raw;

  std::optional<double> get(char letter) const;
  bool operator==(const GcodeCommand&) const = default;
};

struct ToolpathProgram {
  std::vector<GcodeCommand> commands;
  double total_extruded = 0;  // mm of filament pushed while moving in XY
  double filament_volume = 0;  // mm^3
  double extrusion_path_length = 0;  // mm of nozzle travel while extruding
  std::size_t extrusion_moves = 0;
  std::size_t layer_count = 0;
  std::size_t unknown_commands = 0;
  std::vector<std::string> warnings;
};

/// Commands this emitter writes and the parser understands.
bool is_known_gcode(std::string_view op);

/// Marlin-flavored program: header, one block per layer, footer. Paths are
/// printed perimeters first, then infill, then support; lines within a group
/// are visited nearest-first. Throws kOutOfBuildVolume.
ToolpathProgram emit_gcode(const std::vector<LayerSlice>& layers, const SliceConfig& config);

/// LF-terminated text, one line per command.
std::string to_text(const ToolpathProgram& program);

/// Parses text in the emitted dialect and recomputes the extrusion totals
/// from the moves, assuming the filament diameter recorded in the header
/// (1.75 mm when absent). Throws kGcodeParse with the line number.
ToolpathProgram parse_gcode(std::string_view text);

/// Fixed-point with at most five decimals and no trailing zeros.
std::string format_gcode_number(double v);

}  // namespace remixd
