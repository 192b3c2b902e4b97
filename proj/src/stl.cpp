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

#include "remixd/stl.hpp"

#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "remixd/topology.hpp"

namespace remixd {
namespace {

constexpr std::size_t kHeaderSize = 80;
constexpr std::size_t kFacetSize = 50;

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kStlParse, "stl parse error: " + what);
}

std::uint32_t read_u32(const char* p) {
  const auto* b = reinterpret_cast<const unsigned char*>(p);
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

float read_f32(const char* p) {
  const std::uint32_t bits = read_u32(p);
  float f;
  std::memcpy(&f, &bits, sizeof f);
  return f;
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

void put_f32(std::string& out, float f) {
  std::uint32_t bits;
  std::memcpy(&bits, &f, sizeof f);
  put_u32(out, bits);
}

bool starts_with_solid(std::string_view bytes) {
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  return bytes.substr(i, 5) == "solid";
}

/// Whitespace tokenizer that remembers line numbers.
class Tokenizer {
 public:
  explicit Tokenizer(std::string_view text) : text_(text) {}

  bool next(std::string_view& token) {
    skip_space();
    if (pos_ >= text_.size()) return false;
    const std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    token = text_.substr(start, pos_ - start);
    token_line_ = line_;
    return true;
  }

  void skip_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  std::size_t line() const { return token_line_; }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      if (text_[pos_] == '\n') ++line_;
      ++pos_;
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t token_line_ = 1;
};

class AsciiParser {
 public:
  explicit AsciiParser(std::string_view text) : tok_(text) {}

  std::vector<Vec3<float>> parse() {
    std::string_view t;
    bool any_solid = false;
    while (tok_.next(t)) {
      if (t != "solid") fail("expected 'solid', got '" + std::string(t) + "'");
      any_solid = true;
      tok_.skip_line();  // solid name
      parse_body();
    }
    if (!any_solid) parse_error("empty ascii stl");
    return std::move(corners_);
  }

 private:
  [[noreturn]] void fail(const std::string& what) {
    parse_error("line " + std::to_string(tok_.line()) + ": " + what);
  }

  void expect(std::string_view word) {
    std::string_view t;
    if (!tok_.next(t)) fail("unexpected end of file, expected '" + std::string(word) + "'");
    if (t != word) fail("expected '" + std::string(word) + "', got '" + std::string(t) + "'");
  }

  float number() {
    std::string_view t;
    if (!tok_.next(t)) fail("unexpected end of file, expected a number");
    float value = 0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (!t.empty() && *first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc() || ptr != last) fail("malformed number '" + std::string(t) + "'");
    if (!std::isfinite(value)) fail("non-finite coordinate");
    return value;
  }

  void parse_body() {
    std::string_view t;
    while (true) {
      if (!tok_.next(t)) fail("unexpected end of file, expected 'endsolid'");
      if (t == "endsolid") {
        tok_.skip_line();
        return;
      }
      if (t != "facet") fail("expected 'facet' or 'endsolid', got '" + std::string(t) + "'");
      expect("normal");
      for (int i = 0; i < 3; ++i) number();
      expect("outer");
      expect("loop");
      for (int v = 0; v < 3; ++v) {
        expect("vertex");
        const float x = number();
        const float y = number();
        const float z = number();
        corners_.emplace_back(x, y, z);
      }
      expect("endloop");
      expect("endfacet");
    }
  }

  Tokenizer tok_;
  std::vector<Vec3<float>> corners_;
};

std::vector<Vec3<float>> parse_binary(std::string_view bytes, std::uint32_t count) {
  std::vector<Vec3<float>> corners;
  corners.reserve(std::size_t{count} * 3);
  const char* p = bytes.data() + kHeaderSize + 4;
  for (std::uint32_t i = 0; i < count; ++i, p += kFacetSize) {
    for (int v = 1; v <= 3; ++v) {
      const char* q = p + 12 * v;
      Vec3<float> c(read_f32(q), read_f32(q + 4), read_f32(q + 8));
      if (!c.allFinite()) parse_error("non-finite coordinate in facet " + std::to_string(i));
      corners.push_back(c);
    }
  }
  return corners;
}

/// Welds a triangle soup and drops degenerate facets.
StlLoadResult build_mesh(const std::vector<Vec3<float>>& corners) {
  StlLoadResult result;
  result.facet_count = corners.size() / 3;
  std::vector<Vector3> points;
  points.reserve(corners.size());
  for (const auto& c : corners) points.push_back(c.cast<double>());

  const std::vector<int> rep = weld_map(points, kWeldTolerance);
  std::vector<int> index(points.size(), -1);
  TriangleMesh& mesh = result.mesh;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto r = static_cast<std::size_t>(rep[i]);
    if (index[r] < 0) {
      index[r] = static_cast<int>(mesh.vertices.size());
      mesh.vertices.push_back(points[r]);
    }
  }
  mesh.triangles.reserve(result.facet_count);
  for (std::size_t f = 0; f < result.facet_count; ++f) {
    Triangle t;
    for (int k = 0; k < 3; ++k) t[k] = index[static_cast<std::size_t>(rep[3 * f + static_cast<std::size_t>(k)])];
    const bool repeated = t[0] == t[1] || t[1] == t[2] || t[0] == t[2];
    if (repeated || triangle_area(mesh.vertices[static_cast<std::size_t>(t[0])],
                                  mesh.vertices[static_cast<std::size_t>(t[1])],
                                  mesh.vertices[static_cast<std::size_t>(t[2])]) < kDegenerateArea) {
      ++result.dropped_degenerate;
      continue;
    }
    mesh.triangles.push_back(t);
  }
  if (result.dropped_degenerate > 0) {
    result.warnings.push_back("dropped " + std::to_string(result.dropped_degenerate) + " degenerate facet(s)");
    mesh = compact(mesh);
  }
  return result;
}

void append_facet_ascii(std::string& out, const Vec3<float>& n, const Vec3<float> (&v)[3]) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "  facet normal %.9g %.9g %.9g\n    outer loop\n", static_cast<double>(n.x()),
                static_cast<double>(n.y()), static_cast<double>(n.z()));
  out += buf;
  for (const auto& p : v) {
    std::snprintf(buf, sizeof buf, "      vertex %.9g %.9g %.9g\n", static_cast<double>(p.x()),
                  static_cast<double>(p.y()), static_cast<double>(p.z()));
    out += buf;
  }
  out += "    endloop\n  endfacet\n";
}

}  // namespace

StlLoadResult load_stl(std::string_view bytes) {
  std::vector<Vec3<float>> corners;
  StlFormat format;
  const bool size_matches =
      bytes.size() >= kHeaderSize + 4 &&
      bytes.size() == kHeaderSize + 4 + kFacetSize * std::size_t{read_u32(bytes.data() + kHeaderSize)};
  if (size_matches) {
    format = StlFormat::kBinary;
    corners = parse_binary(bytes, read_u32(bytes.data() + kHeaderSize));
  } else if (starts_with_solid(bytes)) {
    format = StlFormat::kAscii;
    corners = AsciiParser(bytes).parse();
  } else if (bytes.size() < kHeaderSize + 4) {
    parse_error("file too short for a binary header (" + std::to_string(bytes.size()) + " bytes)");
  } else {
    const std::size_t expected = kHeaderSize + 4 + kFacetSize * std::size_t{read_u32(bytes.data() + kHeaderSize)};
    if (bytes.size() < expected) {
      parse_error("truncated binary body (" + std::to_string(bytes.size()) + " of " + std::to_string(expected) +
                  " bytes)");
    }
    parse_error("binary size mismatch (" + std::to_string(bytes.size()) + " bytes, expected " +
                std::to_string(expected) + ")");
  }
  if (corners.empty()) parse_error("zero facets");
  StlLoadResult result = build_mesh(corners);
  result.format = format;
  return result;
}

std::string write_stl(const TriangleMesh& mesh, StlFormat format) {
  if (mesh.empty()) throw Error(ErrorCode::kEmptyMesh, "cannot write an empty mesh to stl");
  validate_mesh(mesh);
  std::string out;
  if (format == StlFormat::kBinary) {
    out.reserve(kHeaderSize + 4 + kFacetSize * mesh.triangle_count());
    std::string header = "remixd binary stl";
    header.resize(kHeaderSize, '\0');
    out += header;
    put_u32(out, static_cast<std::uint32_t>(mesh.triangle_count()));
  } else {
    out += "solid remixd\n";
  }
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    const Vec3<float> v[3] = {mesh.corner(i, 0).cast<float>(), mesh.corner(i, 1).cast<float>(),
                              mesh.corner(i, 2).cast<float>()};
    Vector3 n = triangle_normal(mesh.corner(i, 0), mesh.corner(i, 1), mesh.corner(i, 2));
    const double len = n.norm();
    n = len > 0 ? Vector3(n / len) : Vector3::Zero();
    const Vec3<float> nf = n.cast<float>();
    if (format == StlFormat::kBinary) {
      put_f32(out, nf.x());
      put_f32(out, nf.y());
      put_f32(out, nf.z());
      for (const auto& p : v) {
        put_f32(out, p.x());
        put_f32(out, p.y());
        put_f32(out, p.z());
      }
      out.push_back('\0');
      out.push_back('\0');
    } else {
      append_facet_ascii(out, nf, v);
    }
  }
  if (format == StlFormat::kAscii) out += "endsolid remixd\n";
  return out;
}

TriangleMesh canonicalize(const TriangleMesh& mesh) {
  if (mesh.empty()) return {};
  std::vector<Vec3<float>> corners;
  corners.reserve(mesh.triangle_count() * 3);
  for (std::size_t i = 0; i < mesh.triangle_count(); ++i) {
    for (int k = 0; k < 3; ++k) corners.push_back(mesh.corner(i, k).cast<float>());
  }
  return build_mesh(corners).mesh;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kNotFound, "cannot open file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kInvalidArgument, "cannot write file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace remixd
