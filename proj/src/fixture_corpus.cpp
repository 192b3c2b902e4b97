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


#include "remixd/fixture_corpus.hpp"

#include <zlib.h>

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "json.hpp"
#include "remixd/csg.hpp"
#include "remixd/error.hpp"
#include "remixd/primitives.hpp"
#include "remixd/repo.hpp"
#include "remixd/stl.hpp"
#include "remixd/topology.hpp"

namespace remixd {
namespace {

constexpr double kPi = std::numbers::pi;

TriangleMesh box(const Vector3& lo, const Vector3& hi) {
  Transform t;
  t.scale = hi - lo;
  t.translation = 0.5 * (lo + hi);
  return apply_transform(make_primitive(CubeSpec{1.0}), t);
}

/// Cylinder along z standing on `base`.
TriangleMesh cylinder(const Vector3& base, double r, double h, int segments) {
  return apply_transform(make_primitive(CylinderSpec{r, h, segments}), Transform::translate(base + Vector3(0, 0, h / 2)));
}

/// Closed frustum along z standing on `base`.
TriangleMesh frustum(const Vector3& base, double r_bottom, double r_top, double h, int segments) {
  TriangleMesh m;
  for (int ring = 0; ring < 2; ++ring) {
    const double r = ring == 0 ? r_bottom : r_top;
    for (int s = 0; s < segments; ++s) {
      const double a = 2 * kPi * s / segments;
      m.vertices.push_back(base + Vector3(r * std::cos(a), r * std::sin(a), ring * h));
    }
  }
  const int bottom = static_cast<int>(m.vertices.size());
  m.vertices.push_back(base);
  m.vertices.push_back(base + Vector3(0, 0, h));
  for (int s = 0; s < segments; ++s) {
    const int n = (s + 1) % segments;
    m.triangles.emplace_back(s, n, segments + n);
    m.triangles.emplace_back(s, segments + n, segments + s);
    m.triangles.emplace_back(bottom, n, s);
    m.triangles.emplace_back(bottom + 1, segments + s, segments + n);
  }
  return m;
}

TriangleMesh boolean(CsgOp op, const TriangleMesh& a, const TriangleMesh& b) {
  return csg(op, a, b).mesh;
}

TriangleMesh unite(std::initializer_list<TriangleMesh> parts) {
  TriangleMesh acc;
  for (const TriangleMesh& p : parts) acc = acc.empty() ? p : boolean(CsgOp::kUnion, acc, p);
  return acc;
}

/// Cup with a floor: outer shell minus a raised inner solid.
TriangleMesh hollow(const TriangleMesh& outer, const TriangleMesh& inner) { return boolean(CsgOp::kDifference, outer, inner); }

TriangleMesh ribbed_planter() {
  TriangleMesh pot = hollow(cylinder({0, 0, 0}, 40, 70, 48), cylinder({0, 0, 5}, 35, 70, 48));
  for (int i = 0; i < 8; ++i) {
    Transform t;
    t.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(kPi * i / 4 + kPi / 16, Vector3::UnitZ()));
    pot = boolean(CsgOp::kUnion, pot, apply_transform(box({38.5, -2, 4}, {42.5, 2, 66}), t));
  }
  return pot;
}

TriangleMesh faceted_planter() {
  return hollow(cylinder({0, 0, 0}, 45, 60, 6), cylinder({0, 0, 6}, 40, 60, 6));
}

TriangleMesh tapered_planter() {
  return hollow(frustum({0, 0, 0}, 30, 42, 55, 40), frustum({0, 0, 4}, 26.5, 38.5, 55, 40));
}

TriangleMesh cloth_hook() {
  return unite({box({0, -8, 0}, {4, 8, 60}), box({0, -6, 0}, {45, 6, 6}), box({39, -6, 0}, {45, 6, 22})});
}

TriangleMesh headphone_hook() {
  // Clamp plate on top, a drop arm, and a rounded cradle underneath.
  return unite({box({0, -15, 0}, {60, 15, 5}), box({0, -15, -45}, {6, 15, 0}), box({0, -15, -51}, {50, 15, -45}),
                box({44, -15, -51}, {50, 15, -38}), cylinder({25, 0, -62}, 6, 11, 24)});
}

TriangleMesh wire_hook() {
  return unite({box({-10, -3, 0}, {10, 3, 25}), cylinder({0, 0, 25}, 3, 15, 24)});
}

}  // namespace

TriangleMesh make_scan_sculpture(int segments, int bands, double radius) {
  if (segments < 3 || bands < 2 || !(radius > 0)) {
    throw Error(ErrorCode::kInvalidArgument, "sculpture needs segments >= 3, bands >= 2 and a positive radius");
  }
  constexpr double pi = std::numbers::pi;
  TriangleMesh m;
  m.vertices.reserve(static_cast<std::size_t>(segments) * static_cast<std::size_t>(bands - 1) + 2);
  m.vertices.emplace_back(0, 0, -radius);
  for (int b = 1; b < bands; ++b) {
    const double theta = pi * b / bands;
    for (int s = 0; s < segments; ++s) {
      const double phi = 2 * pi * s / segments;
      // Low-frequency lumps plus a fine ripple, like a weathered carving.
      const double r = radius * (1 + 0.04 * std::sin(6 * theta) * std::cos(9 * phi) +
                                 0.01 * std::sin(37 * theta + 3 * phi));
      m.vertices.emplace_back(r * std::sin(theta) * std::cos(phi), r * std::sin(theta) * std::sin(phi),
                              -r * std::cos(theta));
    }
  }
  m.vertices.emplace_back(0, 0, radius);
  const int top = static_cast<int>(m.vertices.size()) - 1;
  auto id = [&](int b, int s) { return 1 + (b - 1) * segments + s % segments; };

  m.triangles.reserve(2 * static_cast<std::size_t>(segments) * static_cast<std::size_t>(bands - 1));
  for (int s = 0; s < segments; ++s) m.triangles.emplace_back(0, id(1, s + 1), id(1, s));
  for (int b = 1; b + 1 < bands; ++b) {
    for (int s = 0; s < segments; ++s) {
      m.triangles.emplace_back(id(b, s), id(b, s + 1), id(b + 1, s + 1));
      m.triangles.emplace_back(id(b, s), id(b + 1, s + 1), id(b + 1, s));
    }
  }
  for (int s = 0; s < segments; ++s) m.triangles.emplace_back(top, id(bands - 1, s), id(bands - 1, s + 1));
  return m;
}

TriangleMesh make_animal_pendant() {
  // Fox head: flattened sphere with two ears and a snout, hung from a tab
  // whose upper half is a clean 10 x 6 x 5 block.
  Transform head;
  head.scale = Vector3(1.0, 0.35, 0.9);
  head.translation = Vector3(0, 0, -23);
  Transform ear_l;
  ear_l.scale = Vector3(1, 0.4, 1);
  ear_l.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(0.45, Vector3::UnitY()));
  ear_l.translation = Vector3(-9.5, 0, -12);
  Transform ear_r = ear_l;
  ear_r.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(-0.45, Vector3::UnitY()));
  ear_r.translation = Vector3(9.5, 0, -12);
  Transform snout;
  snout.scale = Vector3(0.8, 0.5, 1.0);
  snout.rotation = Eigen::Quaterniond(Eigen::AngleAxisd(kPi, Vector3::UnitX()));
  snout.translation = Vector3(0, 0, -38);
  return unite({apply_transform(make_primitive(SphereSpec{15, 3}), head),
                apply_transform(make_primitive(PyramidSpec{9, 11}), ear_l),
                apply_transform(make_primitive(PyramidSpec{9, 11}), ear_r),
                apply_transform(make_primitive(PyramidSpec{10, 10}), snout), box({-5, -3, -10}, {5, 3, 0})});
}

TriangleMesh make_figure_bust() {
  Transform head;
  head.scale = Vector3(1.0, 0.9, 1.1);
  head.translation = Vector3(0, 0, 68);
  return unite({apply_transform(make_primitive(SphereSpec{26, 3}), head), cylinder({0, 0, 24}, 11, 24, 32),
                box({-34, -16, 0}, {34, 16, 26})});
}

TriangleMesh make_shelf_scan() { return box({-147.5, -150, -9}, {147.5, 150, 9}); }

TriangleMesh make_desk_planter_scan() {
  // The planter is fused to the desk top, as a room scan would capture it.
  return unite({box({-300, -200, -20}, {300, 200, 0}), cylinder({60, 40, 0}, 38, 75, 40)});
}

TriangleMesh make_wall_hook_scan() {
  return unite({box({0, -12, -30}, {5, 12, 30}), box({0, -5, -30}, {55, 5, -24}), box({49, -5, -30}, {55, 5, -8})});
}

namespace {

std::string png_chunk(const char* type, const std::string& data) {
  std::string out;
  const auto n = static_cast<std::uint32_t>(data.size());
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((n >> s) & 0xff));
  std::string body = std::string(type, 4) + data;
  out += body;
  const auto crc = static_cast<std::uint32_t>(crc32(0, reinterpret_cast<const Bytef*>(body.data()), static_cast<uInt>(body.size())));
  for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<char>((crc >> s) & 0xff));
  return out;
}

/// 16x16 RGB swatch with a diagonal stripe, enough to tell entries apart.
std::string thumbnail_png(unsigned char r, unsigned char g, unsigned char b) {
  constexpr int kSide = 16;
  std::string raw;
  for (int y = 0; y < kSide; ++y) {
    raw.push_back(0);  // filter: none
    for (int x = 0; x < kSide; ++x) {
      const bool stripe = std::abs(x - y) <= 1;
      raw.push_back(static_cast<char>(stripe ? 255 - r : r));
      raw.push_back(static_cast<char>(stripe ? 255 - g : g));
      raw.push_back(static_cast<char>(stripe ? 255 - b : b));
    }
  }
  uLongf size = compressBound(static_cast<uLong>(raw.size()));
  std::string packed(size, '\0');
  compress2(reinterpret_cast<Bytef*>(packed.data()), &size, reinterpret_cast<const Bytef*>(raw.data()),
            static_cast<uLong>(raw.size()), 9);
  packed.resize(size);
  const std::string ihdr{0, 0, 0, kSide, 0, 0, 0, kSide, 8, 2, 0, 0, 0};
  return std::string("\x89PNG\r\n\x1a\n", 8) + png_chunk("IHDR", ihdr) + png_chunk("IDAT", packed) +
         png_chunk("IEND", {});
}

struct CorpusItem {
  std::string id;
  std::string title;
  std::string license;
  std::vector<std::string> tags;
  std::string stl;
  unsigned char color[3];
};

std::string checked_stl(const TriangleMesh& mesh, const std::string& name) {
  const std::string bytes = write_stl(mesh);
  if (!is_watertight(load_stl(bytes).mesh)) {
    throw Error(ErrorCode::kNotWatertight, "fixture mesh '" + name + "' is not watertight after a float roundtrip");
  }
  return bytes;
}

}  // namespace

void write_fixture_corpus(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "models");
  fs::create_directories(dir / "thumbs");
  fs::create_directories(dir / "environment");

  const std::string truncated = [] {
    std::string full = write_stl(make_primitive(SphereSpec{30, 3}));
    full.resize(84 + 50 * 400 + 17);  // cut mid-facet
    return full;
  }();

  const std::vector<CorpusItem> items = {
      {"planter-ribbed", "Ribbed Plant Pot", "CC-BY-4.0", {"pot", "planter", "plant"},
       checked_stl(ribbed_planter(), "planter-ribbed"), {196, 120, 84}},
      {"planter-faceted", "Faceted Hexagon Pot", "CC-BY-SA-4.0", {"pot", "planter", "geometric"},
       checked_stl(faceted_planter(), "planter-faceted"), {90, 160, 110}},
      {"planter-tapered", "Tapered Succulent Pot", "CC0-1.0", {"pot", "planter", "succulent"},
       checked_stl(tapered_planter(), "planter-tapered"), {220, 210, 190}},
      {"planter-designer", "Designer Pot (no derivatives)", "CC-BY-ND-4.0", {"pot", "planter"},
       checked_stl(faceted_planter(), "planter-designer"), {40, 40, 40}},
      {"planter-mystery", "Mystery Pot", "custom-eula", {"pot"}, checked_stl(tapered_planter(), "planter-mystery"),
       {120, 0, 120}},
      {"hook-cloth", "Simple Cloth Hook", "CC-BY-4.0", {"hook", "coat", "cloth", "wall"},
       checked_stl(cloth_hook(), "hook-cloth"), {70, 90, 200}},
      {"hook-headphone", "Under-Shelf Headphone Hook", "CC-BY-NC-SA-4.0", {"hook", "headphones", "shelf"},
       checked_stl(headphone_hook(), "hook-headphone"), {30, 30, 30}},
      {"hook-wire", "Cable Wire Hook", "CC0-1.0", {"hook", "cable", "wire"}, checked_stl(wire_hook(), "hook-wire"),
       {250, 200, 0}},
      {"hook-premium", "Premium Coat Hook", "All Rights Reserved", {"hook", "coat"},
       checked_stl(cloth_hook(), "hook-premium"), {150, 150, 150}},
      {"pendant-fox", "Fox Head Pendant", "CC-BY-4.0", {"pendant", "animal", "fox", "jewellery", "jewelry"},
       checked_stl(make_animal_pendant(), "pendant-fox"), {230, 110, 30}},
      {"figure-bust", "Stylized Bust Figure", "CC-BY-SA-4.0", {"figure", "bust", "head", "statue"},
       checked_stl(make_figure_bust(), "figure-bust"), {200, 200, 220}},
      {"sculpture-scan", "Weathered Sculpture Scan", "CC-BY-4.0", {"sculpture", "scan", "statue"},
       write_stl(make_scan_sculpture()), {120, 110, 100}},
      {"vase-cracked", "Cracked Vase", "CC-BY-4.0", {"vase"}, truncated, {100, 140, 180}},
  };

  nlohmann::json index = nlohmann::json::array();
  for (const CorpusItem& item : items) {
    const std::string model = "models/" + item.id + ".stl";
    const std::string thumb = "thumbs/" + item.id + ".png";
    write_file((dir / model).string(), item.stl);
    write_file((dir / thumb).string(), thumbnail_png(item.color[0], item.color[1], item.color[2]));
    index.push_back({{"id", item.id},
                     {"title", item.title},
                     {"thumbnail_url", thumb},
                     {"license", item.license},
                     {"remix_allowed", license_allows_remix(item.license)},
                     {"file_locators", {model}},
                     {"tags", item.tags}});
  }
  write_file((dir / "index.json").string(), index.dump(2) + "\n");

  write_file((dir / "environment/shelf.stl").string(), checked_stl(make_shelf_scan(), "shelf"));
  write_file((dir / "environment/desk_planter.stl").string(), checked_stl(make_desk_planter_scan(), "desk_planter"));
  write_file((dir / "environment/wall_hook.stl").string(), checked_stl(make_wall_hook_scan(), "wall_hook"));
  // A scan with a hole where the sensor could not see.
  TriangleMesh open = box({-20, -20, 0}, {20, 20, 30});
  open.triangles.pop_back();
  write_file((dir / "environment/open_scan.stl").string(), write_stl(open));
}

}  // namespace remixd
