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


#include "remixd/gcode.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>

#include "remixd/error.hpp"

namespace remixd {
namespace {

constexpr std::array<std::string_view, 12> kKnown{"G0",   "G1",   "G21",  "G28",  "G90",  "G92",
                                                  "M82",  "M84",  "M104", "M109", "M140", "M190"};

// E carries more digits so single-move increments survive the rounding.
constexpr int kAxisDecimals = 5;
constexpr int kExtrudeDecimals = 7;

std::string format_fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  std::string s = buf;
  if (s.find('.') != std::string::npos) {
    while (s.back() == '0') s.pop_back();
    if (s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

/// Replays moves to recover extrusion totals; shared by emitter and parser
/// so both report the same numbers for the same text.
struct Machine {
  double x = 0, y = 0, z = 0, e = 0;

  void step(const GcodeCommand& c, ToolpathProgram& out) {
    if (c.raw) return;
    if (c.op == "G0" || c.op == "G1") {
      const double nx = c.get('X').value_or(x), ny = c.get('Y').value_or(y), nz = c.get('Z').value_or(z);
      const double dist = std::hypot(nx - x, ny - y);
      if (const auto ne = c.get('E')) {
        const double de = *ne - e;
        if (dist > 0 && de > 0) {
          out.total_extruded += de;
          out.extrusion_path_length += dist;
          ++out.extrusion_moves;
        }
        e = *ne;
      }
      x = nx;
      y = ny;
      z = nz;
    } else if (c.op == "G92") {
      if (const auto v = c.get('E')) e = *v;
      if (const auto v = c.get('X')) x = *v;
      if (const auto v = c.get('Y')) y = *v;
      if (const auto v = c.get('Z')) z = *v;
    } else if (c.op == "G28") {
      const bool all = c.words.empty();
      if (all || c.get('X')) x = 0;
      if (all || c.get('Y')) y = 0;
      if (all || c.get('Z')) z = 0;
    }
  }
};

void finish_totals(ToolpathProgram& p, double filament_diameter) {
  const double r = filament_diameter / 2;
  p.filament_volume = p.total_extruded * std::numbers::pi * r * r;
}

class Emitter {
 public:
  explicit Emitter(const SliceConfig& c) : c_(c) {}

  void line(std::string op, std::vector<GcodeWord> words = {}, std::optional<std::string> comment = std::nullopt) {
    GcodeCommand cmd{std::move(op), std::move(words), std::move(comment), std::nullopt};
    machine_.step(cmd, prog_);
    prog_.commands.push_back(std::move(cmd));
  }

  void comment(std::string text) { line("", {}, std::move(text)); }

  void header(std::size_t layers) {
    comment("remixd toolpath");
    auto kv = [&](const char* k, double v) { comment(std::string(k) + " = " + format_gcode_number(v)); };
    kv("layer_height", c_.layer_height);
    kv("extrusion_width", c_.extrusion_width);
    kv("filament_diameter", c_.filament_diameter);
    kv("perimeter_count", c_.perimeter_count);
    kv("infill_density", c_.infill_density);
    kv("support_enabled", c_.support_enabled ? 1 : 0);
    kv("overhang_threshold_deg", c_.overhang_threshold_deg);
    kv("print_speed", c_.print_speed);
    kv("travel_speed", c_.travel_speed);
    kv("nozzle_temp", c_.nozzle_temp);
    kv("bed_temp", c_.bed_temp);
    comment("build_volume = " + format_gcode_number(c_.build_volume.x()) + " x " +
            format_gcode_number(c_.build_volume.y()) + " x " + format_gcode_number(c_.build_volume.z()));
    kv("retract_length", c_.retract_length);
    kv("layers", static_cast<double>(layers));
    line("G21", {}, "millimeters");
    line("G90", {}, "absolute positioning");
    line("M82", {}, "absolute extrusion");
    line("M140", {{'S', c_.bed_temp}});
    line("M190", {{'S', c_.bed_temp}}, "wait for bed");
    line("M104", {{'S', c_.nozzle_temp}});
    line("M109", {{'S', c_.nozzle_temp}}, "wait for nozzle");
    line("G28", {}, "home");
    line("G92", {{'E', 0}});
  }

  void footer() {
    line("M104", {{'S', 0}});
    line("M140", {{'S', 0}});
    line("G28", {{'X', 0}, {'Y', 0}});
    line("M84", {}, "motors off");
  }

  void begin_layer(const LayerSlice& layer) {
    comment("LAYER:" + std::to_string(layer.index));
    check(pos_, layer.top);
    z_ = layer.top;
    line("G0", {{'Z', z_}, feed(c_.travel_speed)});
  }

  void travel_to(const Point2& p) {
    check(p, z_);
    if (has_pos_ && (p - pos_).norm() <= 1e-9) return;
    const bool retract = has_pos_ && c_.retract_length > 0 && (p - pos_).norm() > c_.retract_min_travel;
    if (retract) line("G1", {{'E', e_ - c_.retract_length}, feed(c_.retract_speed)});
    line("G0", {{'X', p.x()}, {'Y', p.y()}, feed(c_.travel_speed)});
    if (retract) line("G1", {{'E', e_}, feed(c_.retract_speed)});
    pos_ = p;
    has_pos_ = true;
  }

  void extrude_to(const Point2& p) {
    check(p, z_);
    const double len = (p - pos_).norm();
    if (len <= 1e-9) return;
    e_ += extrusion_for(len, c_);
    line("G1", {{'X', p.x()}, {'Y', p.y()}, {'E', e_}, feed(c_.print_speed)});
    pos_ = p;
  }

  void path(const std::vector<Point2>& pts, bool closed) {
    if (pts.size() < 2) return;
    travel_to(pts.front());
    for (std::size_t i = 1; i < pts.size(); ++i) extrude_to(pts[i]);
    if (closed) extrude_to(pts.front());
  }

  /// Greedy nearest-endpoint order, flipping segments as needed.
  void segments(std::vector<Segment2> segs) {
    std::vector<char> done(segs.size(), 0);
    for (std::size_t n = 0; n < segs.size(); ++n) {
      std::size_t best = segs.size();
      bool flip = false;
      double best_d = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < segs.size(); ++i) {
        if (done[i]) continue;
        const double da = has_pos_ ? (segs[i].a - pos_).squaredNorm() : 0;
        const double db = has_pos_ ? (segs[i].b - pos_).squaredNorm() : 0;
        if (da < best_d) best_d = da, best = i, flip = false;
        if (db < best_d) best_d = db, best = i, flip = true;
      }
      done[best] = 1;
      const Segment2& s = segs[best];
      path({flip ? s.b : s.a, flip ? s.a : s.b}, false);
    }
  }

  ToolpathProgram finish() {
    finish_totals(prog_, c_.filament_diameter);
    return std::move(prog_);
  }

 private:
  GcodeWord feed(double f) { return {'F', f}; }

  void check(const Point2& p, double z) const {
    const Vector3& v = c_.build_volume;
    constexpr double slack = 1e-9;
    if (p.x() < -slack || p.y() < -slack || p.x() > v.x() + slack || p.y() > v.y() + slack || z < -slack ||
        z > v.z() + slack) {
      throw Error(ErrorCode::kOutOfBuildVolume, "toolpath point (" + format_gcode_number(p.x()) + ", " +
                                                    format_gcode_number(p.y()) + ", " + format_gcode_number(z) +
                                                    ") is outside the " + format_gcode_number(v.x()) + " x " +
                                                    format_gcode_number(v.y()) + " x " + format_gcode_number(v.z()) +
                                                    " mm build volume");
    }
  }

  SliceConfig c_;
  ToolpathProgram prog_;
  Machine machine_;
  Point2 pos_ = Point2::Zero();
  bool has_pos_ = false;
  double z_ = 0;
  double e_ = 0;
};

std::string word_text(const GcodeWord& w) {
  return std::string(1, w.letter) + format_fixed(w.value, w.letter == 'E' ? kExtrudeDecimals : kAxisDecimals);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::optional<double> GcodeCommand::get(char letter) const {
  for (const GcodeWord& w : words) {
    if (w.letter == letter) return w.value;
  }
  return std::nullopt;
}

bool is_known_gcode(std::string_view op) { return std::find(kKnown.begin(), kKnown.end(), op) != kKnown.end(); }

std::string format_gcode_number(double v) { return format_fixed(v, kAxisDecimals); }

ToolpathProgram emit_gcode(const std::vector<LayerSlice>& layers, const SliceConfig& config) {
  validate_config(config);
  Emitter em(config);
  em.header(layers.size());
  for (const LayerSlice& layer : layers) {
    em.begin_layer(layer);
    for (const Path2& p : layer.perimeters) em.path(p.points, p.closed);
    em.segments(layer.infill);
    em.segments(layer.support);
  }
  em.footer();
  ToolpathProgram out = em.finish();
  out.layer_count = layers.size();
  return out;
}

std::string to_text(const ToolpathProgram& program) {
  std::string out;
  for (const GcodeCommand& c : program.commands) {
    if (c.raw) {
      out += *c.raw;
    } else {
      out += c.op;
      for (const GcodeWord& w : c.words) out += " " + word_text(w);
      if (c.comment) out += (c.op.empty() ? ";" : " ;") + *c.comment;
    }
    out += '\n';
  }
  return out;
}

ToolpathProgram parse_gcode(std::string_view text) {
  ToolpathProgram prog;
  Machine machine;
  double filament_diameter = 1.75;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);

    GcodeCommand cmd;
    const auto semi = line.find(';');
    if (semi != std::string_view::npos) cmd.comment = std::string(line.substr(semi + 1));
    const std::string_view code = trim(line.substr(0, semi));
    if (code.empty()) {
      if (cmd.comment) {
        const std::string_view c = *cmd.comment;
        if (c.starts_with("LAYER:")) ++prog.layer_count;
        if (c.starts_with("filament_diameter = ")) {
          const std::string_view v = c.substr(20);
          double d = 0;
          if (std::from_chars(v.data(), v.data() + v.size(), d).ec == std::errc{} && d > 0) filament_diameter = d;
        }
      }
      prog.commands.push_back(std::move(cmd));
      continue;
    }

    std::vector<std::string_view> tokens;
    for (std::size_t i = 0; i < code.size();) {
      const auto b = code.find_first_not_of(" \t", i);
      if (b == std::string_view::npos) break;
      const auto e = code.find_first_of(" \t", b);
      tokens.push_back(code.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b));
      i = e == std::string_view::npos ? code.size() : e;
    }
    if (!is_known_gcode(tokens.front())) {
      ++prog.unknown_commands;
      prog.warnings.push_back("line " + std::to_string(line_no) + ": unknown command " + std::string(tokens.front()) +
                              " kept verbatim");
      prog.commands.push_back(GcodeCommand{std::string(tokens.front()), {}, std::nullopt, std::string(line)});
      continue;
    }
    cmd.op = std::string(tokens.front());
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const std::string_view tok = tokens[t];
      GcodeWord w;
      w.letter = tok.front();
      const char* first = tok.data() + 1;
      const char* last = tok.data() + tok.size();
      const auto res = std::from_chars(first, last, w.value);
      if (w.letter < 'A' || w.letter > 'Z' || first == last || res.ec != std::errc{} || res.ptr != last ||
          !std::isfinite(w.value)) {
        throw Error(ErrorCode::kGcodeParse,
                    "line " + std::to_string(line_no) + ": malformed word '" + std::string(tok) + "'");
      }
      cmd.words.push_back(w);
    }
    machine.step(cmd, prog);
    prog.commands.push_back(std::move(cmd));
  }
  finish_totals(prog, filament_diameter);
  return prog;
}

}  // namespace remixd
