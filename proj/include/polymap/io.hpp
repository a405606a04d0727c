// Copyright 2026 The Polymap Authors.
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

#ifndef POLYMAP_IO_HPP_
#define POLYMAP_IO_HPP_

// File formats: polygon / basis / map / report JSON, correspondence configs,
// and PNG rasters.  All writes are atomic (temp file + rename) so a crashed
// run never leaves a truncated artifact behind.

#include <png.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "polymap/errors.hpp"
#include "polymap/gbc.hpp"
#include "polymap/geometry.hpp"
#include "polymap/mapping.hpp"
#include "polymap/trimesh.hpp"
#include "polymap/verifier.hpp"
#include "polymap/warp.hpp"

namespace polymap {

// Insertion-ordered JSON keeps report key order fixed, which makes repeated
// runs byte-identical.
using Json = nlohmann::ordered_json;

// --- plain files ------------------------------------------------------------

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorCode::io_failure, "cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) raise(ErrorCode::io_failure, "read failed for " + path);
  return buf.str();
}

namespace detail {

inline std::string temp_path_for(const std::string& path) {
  return path + ".tmp";
}

}  // namespace detail

inline void atomic_write_text(const std::string& path,
                              const std::string& content) {
  std::string tmp = detail::temp_path_for(path);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(ErrorCode::io_failure, "cannot create " + tmp);
    out << content;
    out.flush();
    if (!out) raise(ErrorCode::io_failure, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise(ErrorCode::io_failure, "cannot move " + tmp + " into place");
  }
}

inline Json parse_json(const std::string& text, const std::string& origin) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    raise(ErrorCode::io_failure, "invalid JSON in " + origin);
  }
  return j;
}

inline Json load_json(const std::string& path) {
  return parse_json(read_text_file(path), path);
}

// --- polygons ---------------------------------------------------------------

namespace detail {

inline std::vector<Vec2> loop_from_json(const Json& j,
                                        const std::string& what) {
  if (!j.is_array()) {
    raise(ErrorCode::io_failure, what + " must be an array of [x, y] pairs");
  }
  std::vector<Vec2> loop;
  loop.reserve(j.size());
  for (const Json& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() ||
        !p[1].is_number()) {
      raise(ErrorCode::io_failure, what + " entries must be [x, y] numbers");
    }
    loop.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return loop;
}

inline Json loop_to_json(const std::vector<Vec2>& loop) {
  Json j = Json::array();
  for (Vec2 p : loop) j.push_back(Json::array({p.x, p.y}));
  return j;
}

}  // namespace detail

// Format: {"outer": [[x,y],...], "holes": [[[x,y],...],...]}.  Loops need
// not be pre-oriented; validation normalizes them.
inline Polygon polygon_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("outer")) {
    raise(ErrorCode::io_failure, "polygon JSON needs an \"outer\" loop");
  }
  Polygon p;
  p.outer = detail::loop_from_json(j["outer"], "\"outer\"");
  if (j.contains("holes")) {
    if (!j["holes"].is_array()) {
      raise(ErrorCode::io_failure, "\"holes\" must be an array of loops");
    }
    for (const Json& h : j["holes"]) {
      p.holes.push_back(detail::loop_from_json(h, "hole"));
    }
  }
  return validate_polygon(p);
}

inline Json polygon_to_json(const Polygon& p) {
  Json j;
  j["outer"] = detail::loop_to_json(p.outer);
  Json holes = Json::array();
  for (const auto& h : p.holes) holes.push_back(detail::loop_to_json(h));
  j["holes"] = holes;
  return j;
}

inline Polygon load_polygon(const std::string& path) {
  return polygon_from_json(load_json(path));
}

// --- correspondence configs ---------------------------------------------------

// Optional adjustments applied before vertex lists pair up in index order:
//   {"rotation": k,                      // target outer vertex paired with
//                                        // source outer vertex 0
//    "source_insertions": [[edge, t]..], // inactive vertices, source outer
//    "target_insertions": [[edge, t]..]} // inactive vertices, target outer
// Edge indices refer to the counterclockwise-normalized loops, insertions
// are applied first, and the rotation indexes the post-insertion target loop.
struct CorrespondenceConfig {
  int rotation = 0;
  std::vector<EdgePoint> source_insertions;
  std::vector<EdgePoint> target_insertions;
};

namespace detail {

inline std::vector<EdgePoint> insertions_from_json(const Json& j,
                                                   const std::string& what) {
  if (!j.is_array()) {
    raise(ErrorCode::io_failure, what + " must be an array of [edge, t]");
  }
  std::vector<EdgePoint> out;
  for (const Json& e : j) {
    if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() ||
        !e[1].is_number()) {
      raise(ErrorCode::io_failure, what + " entries must be [edge, t]");
    }
    out.push_back({e[0].get<int>(), e[1].get<double>()});
  }
  return out;
}

}  // namespace detail

inline CorrespondenceConfig correspondence_from_json(const Json& j) {
  if (!j.is_object()) {
    raise(ErrorCode::io_failure, "correspondence JSON must be an object");
  }
  CorrespondenceConfig c;
  if (j.contains("rotation")) {
    if (!j["rotation"].is_number_integer()) {
      raise(ErrorCode::io_failure, "\"rotation\" must be an integer");
    }
    c.rotation = j["rotation"].get<int>();
  }
  if (j.contains("source_insertions")) {
    c.source_insertions =
        detail::insertions_from_json(j["source_insertions"],
                                     "\"source_insertions\"");
  }
  if (j.contains("target_insertions")) {
    c.target_insertions =
        detail::insertions_from_json(j["target_insertions"],
                                     "\"target_insertions\"");
  }
  return c;
}

inline Polygon rotate_outer_loop(const Polygon& p, int rotation) {
  int n = static_cast<int>(p.outer.size());
  int r = ((rotation % n) + n) % n;
  Polygon out;
  out.holes = p.holes;
  out.outer.reserve(p.outer.size());
  for (int i = 0; i < n; ++i) out.outer.push_back(p.outer[(i + r) % n]);
  return out;
}

// Applies insertions and the target rotation, returning the polygon pair
// whose vertex lists correspond in index order.
inline std::pair<Polygon, Polygon> apply_correspondence(
    Polygon source, Polygon target, const CorrespondenceConfig& c) {
  if (!c.source_insertions.empty()) {
    source = insert_inactive_vertices(source, c.source_insertions);
  }
  if (!c.target_insertions.empty()) {
    target = insert_inactive_vertices(target, c.target_insertions);
  }
  if (c.rotation != 0) target = rotate_outer_loop(target, c.rotation);
  return {std::move(source), std::move(target)};
}

// --- basis and map dumps --------------------------------------------------------

namespace detail {

inline Json nodes_to_json(const std::vector<Vec2>& nodes) {
  Json j = Json::array();
  for (Vec2 p : nodes) j.push_back(Json::array({p.x, p.y}));
  return j;
}

inline Json triangles_to_json(const std::vector<std::array<int, 3>>& tris) {
  Json j = Json::array();
  for (const auto& t : tris) j.push_back(Json::array({t[0], t[1], t[2]}));
  return j;
}

// Rebuilds an indexed mesh from the "nodes"/"triangles" members of a dump.
// Boundary tags and loops are not stored in dumps, so the result carries
// default tags; callers that need boundary structure must derive it from the
// triangle topology.
inline std::shared_ptr<TriMesh> mesh_from_json(const Json& j) {
  auto mesh = std::make_shared<TriMesh>();
  for (Vec2 p : loop_from_json(j["nodes"], "\"nodes\"")) {
    mesh->nodes.push_back(p);
  }
  for (const Json& t : j["triangles"]) {
    if (!t.is_array() || t.size() != 3) {
      raise(ErrorCode::io_failure, "triangles must be [a, b, c] index rows");
    }
    std::array<int, 3> tri{t[0].get<int>(), t[1].get<int>(), t[2].get<int>()};
    for (int v : tri) {
      if (v < 0 || v >= static_cast<int>(mesh->nodes.size())) {
        raise(ErrorCode::io_failure, "triangle index out of range");
      }
    }
    mesh->triangles.push_back(tri);
  }
  mesh->tags.assign(mesh->nodes.size(), BoundaryTag{});
  BBox box;
  for (Vec2 p : mesh->nodes) box.expand(p);
  mesh->scale = box.max_extent();
  mesh->build_index();
  return mesh;
}

}  // namespace detail

// Format: {"nodes": [[x,y],...], "triangles": [[a,b,c],...],
//          "phi": [[per-node values], ... one row per basis function]}.
inline Json basis_to_json(const GbcBasis& basis) {
  Json j;
  j["nodes"] = detail::nodes_to_json(basis.mesh->nodes);
  j["triangles"] = detail::triangles_to_json(basis.mesh->triangles);
  Json phi = Json::array();
  for (const auto& f : basis.functions) phi.push_back(f);
  j["phi"] = phi;
  return j;
}

// A reloaded basis dump: enough mesh to contour the functions again.
struct BasisDump {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<std::vector<double>> phi;
};

inline BasisDump basis_dump_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("triangles") ||
      !j.contains("phi")) {
    raise(ErrorCode::io_failure,
          "basis JSON needs \"nodes\", \"triangles\", and \"phi\"");
  }
  auto mesh = detail::mesh_from_json(j);
  BasisDump dump;
  dump.phi.reserve(j["phi"].size());
  for (const Json& f : j["phi"]) {
    std::vector<double> values = f.get<std::vector<double>>();
    if (values.size() != mesh->nodes.size()) {
      raise(ErrorCode::io_failure, "phi row length does not match node count");
    }
    dump.phi.push_back(std::move(values));
  }
  dump.mesh = std::move(mesh);
  return dump;
}

// Format: {"nodes": source mesh, "triangles": shared topology,
//          "image": mapped node positions}.
inline Json map_to_json(const HarmonicMap& map) {
  Json j;
  j["nodes"] = detail::nodes_to_json(map.mesh().nodes);
  j["triangles"] = detail::triangles_to_json(map.mesh().triangles);
  j["image"] = detail::nodes_to_json(map.image);
  return j;
}

// A reloaded map dump: the source mesh plus the mapped node positions.
struct MapDump {
  std::shared_ptr<const TriMesh> mesh;
  std::vector<Vec2> image;
};

inline MapDump map_dump_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nodes") || !j.contains("triangles") ||
      !j.contains("image")) {
    raise(ErrorCode::io_failure,
          "map JSON needs \"nodes\", \"triangles\", and \"image\"");
  }
  MapDump dump;
  dump.mesh = detail::mesh_from_json(j);
  dump.image = detail::loop_from_json(j["image"], "\"image\"");
  if (dump.image.size() != dump.mesh->nodes.size()) {
    raise(ErrorCode::io_failure, "image length does not match node count");
  }
  return dump;
}

inline Json composed_map_to_json(const ComposedMap& map) {
  const TriMesh& mesh = map.first->mesh();
  Json j;
  j["nodes"] = detail::nodes_to_json(mesh.nodes);
  j["triangles"] = detail::triangles_to_json(mesh.triangles);
  std::vector<Vec2> image(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    image[i] = eval_composed(map, mesh.nodes[i]).point;
  }
  j["image"] = detail::nodes_to_json(image);
  return j;
}

// --- certification reports -------------------------------------------------------

inline Json report_to_json(const BijectivityReport& r) {
  Json j;
  j["min_det"] = r.min_det;
  Json below = Json::array();
  for (const DetSample& s : r.below_threshold) {
    Json e;
    e["x"] = s.point.x;
    e["y"] = s.point.y;
    e["det"] = s.det;
    below.push_back(e);
  }
  j["below_threshold"] = below;
  j["orientation_ok"] = r.orientation_ok;
  j["coverage"] = r.coverage;
  j["area_ratio"] = r.area_ratio;
  Json extrema = Json::array();
  for (const ExtremaProfile& e : r.extrema) {
    Json p;
    p["alpha"] = e.alpha;
    p["n_max"] = e.n_max;
    p["n_min"] = e.n_min;
    p["min_grad"] = e.min_grad;
    extrema.push_back(p);
  }
  j["extrema"] = extrema;
  j["verdict"] = verdict_name(r.verdict);
  return j;
}

// --- PNG rasters ----------------------------------------------------------------

// Reads any PNG as 8-bit RGBA.  The placement is left at the default
// (origin corner, unit pixels); callers position the raster themselves.
inline RasterImage read_png(const std::string& path) {
  std::FILE* fp = std::fopen(path.c_str(), "rb");
  if (!fp) raise(ErrorCode::io_failure, "cannot open " + path);
  png_structp png =
      png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
    std::fclose(fp);
    raise(ErrorCode::io_failure, "libpng initialization failed");
  }
  RasterImage img;
  std::vector<png_bytep> rows;
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);
    raise(ErrorCode::io_failure, "failed to decode PNG " + path);
  }
  png_init_io(png, fp);
  png_read_info(png, info);
  png_uint_32 width = png_get_image_width(png, info);
  png_uint_32 height = png_get_image_height(png, info);
  int color = png_get_color_type(png, info);
  int depth = png_get_bit_depth(png, info);
  if (depth == 16) png_set_strip_16(png);
  if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
  if (color == PNG_COLOR_TYPE_GRAY && depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
  if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA) {
    png_set_gray_to_rgb(png);
  }
  if (color == PNG_COLOR_TYPE_RGB || color == PNG_COLOR_TYPE_GRAY ||
      color == PNG_COLOR_TYPE_PALETTE) {
    png_set_filler(png, 0xFF, PNG_FILLER_AFTER);
  }
  png_read_update_info(png, info);

  img.width = static_cast<int>(width);
  img.height = static_cast<int>(height);
  img.rgba.resize(static_cast<size_t>(width) * height * 4);
  rows.resize(height);
  for (png_uint_32 r = 0; r < height; ++r) {
    rows[r] = img.rgba.data() + static_cast<size_t>(r) * width * 4;
  }
  png_read_image(png, rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  std::fclose(fp);
  return img;
}

// Writes 8-bit RGBA atomically (temp file + rename).
inline void write_png(const std::string& path, const RasterImage& img) {
  validate_raster(img);
  std::string tmp = detail::temp_path_for(path);
  std::FILE* fp = std::fopen(tmp.c_str(), "wb");
  if (!fp) raise(ErrorCode::io_failure, "cannot create " + tmp);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr,
                                            nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info) {
    if (png) png_destroy_write_struct(&png, info ? &info : nullptr);
    std::fclose(fp);
    std::remove(tmp.c_str());
    raise(ErrorCode::io_failure, "libpng initialization failed");
  }
  std::vector<png_bytep> rows(img.height);
  for (int r = 0; r < img.height; ++r) {
    rows[r] = const_cast<png_bytep>(img.rgba.data() +
                                    static_cast<size_t>(r) * img.width * 4);
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    std::fclose(fp);
    std::remove(tmp.c_str());
    raise(ErrorCode::io_failure, "failed to encode PNG " + path);
  }
  png_init_io(png, fp);
  png_set_IHDR(png, info, img.width, img.height, 8, PNG_COLOR_TYPE_RGBA,
               PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
               PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
  if (std::fclose(fp) != 0) {
    std::remove(tmp.c_str());
    raise(ErrorCode::io_failure, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    raise(ErrorCode::io_failure, "cannot move " + tmp + " into place");
  }
}

}  // namespace polymap

#endif  // POLYMAP_IO_HPP_
