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

// polymap: command-line front end.
//
//   gbc      harmonic coordinate basis for a polygon (JSON dump + contour SVGs)
//   map      harmonic map between two polygons (mesh-image JSON + grid SVG)
//   compose  map through a shared convex intermediate polygon
//   verify   numeric bijectivity certificate for a map (report JSON)
//   warp     pull a raster image from a source polygon onto a target polygon
//   plot     re-render a saved basis or map dump as an SVG
//
// Exit codes: 0 success, 2 validation/input error, 3 non-injective abort,
// 4 solver/meshing failure.  Every failure prints a single JSON object
// {"error": code, "detail": text} to standard error.

#include <array>
#include <cstdint>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "polymap/polymap.hpp"

namespace {

using polymap::Vec2;

int exit_code_for(polymap::ErrorCode code) {
  switch (code) {
    case polymap::ErrorCode::ambiguous_preimage:
      return 3;
    case polymap::ErrorCode::solver_divergence:
    case polymap::ErrorCode::meshing_failure:
    case polymap::ErrorCode::degenerate_triangle:
      return 4;
    default:
      return 2;
  }
}

void emit_error(const std::string& code, const std::string& detail) {
  polymap::Json j;
  j["error"] = code;
  j["detail"] = detail;
  std::cerr << j.dump() << "\n";
}

// Error::what() is "Name: detail"; the JSON carries the two halves separately.
std::string detail_of(const polymap::Error& e) {
  std::string what = e.what();
  std::string prefix = std::string(polymap::error_code_name(e.code())) + ": ";
  if (what.rfind(prefix, 0) == 0) return what.substr(prefix.size());
  return what;
}

void check_cell_size(double h) {
  if (!(h > 0.0 && h <= 0.5)) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "--h must lie in (0, 0.5]");
  }
}

polymap::GbcBasis basis_for(const polymap::Polygon& polygon, double h) {
  polymap::GbcOptions opt;
  opt.cell_size = h;
  return polygon.holes.empty() ? polymap::compute_gbc(polygon, opt)
                               : polymap::compute_gbc_with_holes(polygon, opt);
}

polymap::CorrespondenceConfig load_correspondence(const std::string& path) {
  if (path.empty()) return {};
  return polymap::correspondence_from_json(polymap::load_json(path));
}

// Direct map: apply the correspondence (inactive vertices, rotation), compute
// the basis on the adjusted source, and pin its boundary onto the adjusted
// target.  The declared target keeps the adjusted vertex list.
polymap::HarmonicMap make_map(const polymap::Polygon& source,
                              const polymap::Polygon& target,
                              const polymap::CorrespondenceConfig& cfg,
                              double h) {
  auto [src, tgt] = polymap::apply_correspondence(source, target, cfg);
  auto basis = std::make_shared<const polymap::GbcBasis>(basis_for(src, h));
  return polymap::build_map(basis,
                            polymap::build_boundary_correspondence(src, tgt));
}

// Composition leg: same construction, but the declared target is the plain
// intermediate polygon so both legs agree on it even when their inactive
// vertices cut its boundary differently.
polymap::HarmonicMap make_leg(const polymap::Polygon& source,
                              const polymap::Polygon& via,
                              const polymap::CorrespondenceConfig& cfg,
                              double h) {
  auto [src, mid] = polymap::apply_correspondence(source, via, cfg);
  auto basis = std::make_shared<const polymap::GbcBasis>(basis_for(src, h));
  return polymap::build_map(
      basis, polymap::build_boundary_correspondence(src, mid), via);
}

void write_json(const std::string& path, const polymap::Json& j) {
  polymap::atomic_write_text(path, j.dump(2) + "\n");
}

// Closed outlines for a mesh reloaded from a dump, which stores no boundary
// loops: recover them from the triangle topology and draw them at the given
// node positions (mesh nodes for a basis plot, image positions for a map).
void add_topology_outline(polymap::VectorDrawing& d,
                          const polymap::TriMesh& mesh,
                          const std::vector<Vec2>& positions) {
  for (const auto& loop : polymap::boundary_loops_from_topology(mesh)) {
    std::vector<Vec2> pts;
    pts.reserve(loop.size());
    for (int node : loop) pts.push_back(positions[node]);
    d.add(std::move(pts), true, "outline");
  }
}

std::array<std::uint8_t, 4> parse_background(const std::string& text) {
  std::array<std::uint8_t, 4> rgba{};
  std::stringstream ss(text);
  for (int k = 0; k < 4; ++k) {
    int value = -1;
    char comma = ',';
    if (!(ss >> value) || value < 0 || value > 255 ||
        (k < 3 && (!(ss >> comma) || comma != ','))) {
      polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                     "--background must be R,G,B,A with channels in 0..255");
    }
    rgba[static_cast<size_t>(k)] = static_cast<std::uint8_t>(value);
  }
  std::string rest;
  if (ss >> rest) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "--background must be exactly four channels");
  }
  return rgba;
}

// --- subcommand argument bundles -------------------------------------------------

struct GbcArgs {
  std::string source;
  std::string out;
  std::string svg;  // per-function files <svg><k>.svg when set
  double h = 1.0 / 64;
  int levels = 10;
};

struct MapArgs {
  std::string source;
  std::string target;
  std::string correspondence;
  std::string out;
  std::string svg;
  double h = 1.0 / 64;
  int grid = 20;
};

struct ComposeArgs {
  std::string source;
  std::string target;
  std::string via;
  std::string source_correspondence;
  std::string target_correspondence;
  std::string out;
  std::string svg;
  double h = 1.0 / 64;
  int grid = 20;
};

struct VerifyArgs {
  std::string source;
  std::string target;
  std::string correspondence;
  std::string out;
  double h = 1.0 / 64;
  int samples = 25000;
  double threshold = 1e-5;
  int alphas = 16;
};

struct WarpArgs {
  std::string source_image;
  std::string source_poly;
  std::string target_poly;
  std::string via;
  std::string out;
  std::string background = "0,0,0,0";
  double h = 1.0 / 64;
};

struct PlotArgs {
  std::string basis;
  std::string map;
  std::string out;
  int function = 0;
  int levels = 10;
  int grid = 20;
};

// --- subcommand handlers -----------------------------------------------------------

int run_gbc(const GbcArgs& a) {
  check_cell_size(a.h);
  polymap::Polygon polygon = polymap::load_polygon(a.source);
  polymap::GbcBasis basis = basis_for(polygon, a.h);
  write_json(a.out, polymap::basis_to_json(basis));
  size_t svg_count = 0;
  if (!a.svg.empty()) {
    for (size_t k = 0; k < basis.size(); ++k) {
      polymap::NodalField field{basis.mesh, basis.functions[k]};
      polymap::VectorDrawing d =
          polymap::plot_contours(field, a.levels, basis.polygon);
      polymap::atomic_write_text(a.svg + std::to_string(k) + ".svg",
                                 polymap::to_svg(d));
      ++svg_count;
    }
  }
  std::cout << "gbc: " << basis.size() << " coordinate functions on "
            << basis.mesh->nodes.size() << " nodes -> " << a.out;
  if (svg_count > 0) std::cout << " (+" << svg_count << " contour SVGs)";
  std::cout << "\n";
  return 0;
}

int run_map(const MapArgs& a) {
  check_cell_size(a.h);
  polymap::Polygon source = polymap::load_polygon(a.source);
  polymap::Polygon target = polymap::load_polygon(a.target);
  polymap::HarmonicMap map =
      make_map(source, target, load_correspondence(a.correspondence), a.h);
  write_json(a.out, polymap::map_to_json(map));
  if (!a.svg.empty()) {
    polymap::atomic_write_text(a.svg,
                               polymap::to_svg(polymap::plot_grid(map, a.grid)));
  }
  std::cout << "map: " << map.mesh().nodes.size() << " nodes onto "
            << map.target.outer.size() << "-gon -> " << a.out;
  if (!a.svg.empty()) std::cout << " (+ grid SVG " << a.svg << ")";
  std::cout << "\n";
  return 0;
}

int run_compose(const ComposeArgs& a) {
  check_cell_size(a.h);
  polymap::Polygon source = polymap::load_polygon(a.source);
  polymap::Polygon target = polymap::load_polygon(a.target);
  polymap::Polygon via = polymap::load_polygon(a.via);
  polymap::HarmonicMap first =
      make_leg(source, via, load_correspondence(a.source_correspondence), a.h);
  polymap::HarmonicMap second =
      make_leg(target, via, load_correspondence(a.target_correspondence), a.h);
  polymap::ComposedMap composed =
      polymap::compose_maps(std::move(first), std::move(second));
  write_json(a.out, polymap::composed_map_to_json(composed));
  if (!a.svg.empty()) {
    polymap::atomic_write_text(
        a.svg, polymap::to_svg(polymap::plot_grid(composed, a.grid)));
  }
  std::cout << "compose: " << composed.first->mesh().nodes.size()
            << " nodes through " << via.outer.size() << "-gon -> " << a.out
            << "\n";
  return 0;
}

int run_verify(const VerifyArgs& a) {
  check_cell_size(a.h);
  if (a.samples < 1) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "--samples must be at least 1");
  }
  if (a.alphas < 1) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "--alphas must be at least 1");
  }
  if (!(a.threshold >= 0.0)) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "--threshold must be nonnegative");
  }
  polymap::Polygon source = polymap::load_polygon(a.source);
  polymap::Polygon target = polymap::load_polygon(a.target);
  polymap::HarmonicMap map =
      make_map(source, target, load_correspondence(a.correspondence), a.h);
  polymap::VerifyConfig cfg;
  cfg.sample_count = a.samples;
  cfg.det_threshold = a.threshold;
  cfg.alpha_count = a.alphas;
  polymap::BijectivityReport report = polymap::certify(map, cfg);
  if (!a.out.empty()) write_json(a.out, polymap::report_to_json(report));
  std::cout << "verify: verdict " << polymap::verdict_name(report.verdict)
            << " (min_det " << report.min_det << ", below threshold "
            << report.below_threshold.size() << "/" << a.samples
            << ", coverage " << report.coverage << ")";
  if (!a.out.empty()) std::cout << " -> " << a.out;
  std::cout << "\n";
  return 0;  // Any verdict is a successful verification run.
}

int run_warp(const WarpArgs& a) {
  check_cell_size(a.h);
  polymap::WarpJob job;
  job.source_image = polymap::read_png(a.source_image);
  job.source_polygon = polymap::load_polygon(a.source_poly);
  job.target_polygon = polymap::load_polygon(a.target_poly);
  if (!a.via.empty()) job.intermediate = polymap::load_polygon(a.via);
  job.cell_size = a.h;
  job.background = parse_background(a.background);

  // The raster is stretched over the source polygon's bounding box; the
  // common pixel size guarantees the image covers the polygon.
  polymap::BBox box = polymap::bounding_box(job.source_polygon);
  Vec2 ext = box.extent();
  job.source_image.min_corner = box.min;
  job.source_image.pixel_size = std::max(ext.x / job.source_image.width,
                                         ext.y / job.source_image.height);

  polymap::RasterImage out = polymap::warp_image(job);
  polymap::write_png(a.out, out);
  std::cout << "warp: " << job.source_image.width << "x"
            << job.source_image.height << " -> " << out.width << "x"
            << out.height << " " << a.out << "\n";
  return 0;
}

int run_plot(const PlotArgs& a) {
  if (a.basis.empty() == a.map.empty()) {
    polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                   "pass exactly one of --basis or --map");
  }
  polymap::VectorDrawing d;
  std::string what;
  if (!a.basis.empty()) {
    polymap::BasisDump dump =
        polymap::basis_dump_from_json(polymap::load_json(a.basis));
    if (a.function < 0 || a.function >= static_cast<int>(dump.phi.size())) {
      polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                     "--function must index one of the " +
                         std::to_string(dump.phi.size()) + " functions");
    }
    add_topology_outline(d, *dump.mesh, dump.mesh->nodes);
    polymap::NodalField field{dump.mesh,
                              dump.phi[static_cast<size_t>(a.function)]};
    for (const polymap::LevelSet& ls :
         polymap::contour_level_sets(field, a.levels)) {
      for (const polymap::ContourLine& line : ls.lines) {
        d.add(line.points, line.closed, "contour");
      }
    }
    what = "basis function " + std::to_string(a.function);
  } else {
    if (a.grid < 1) {
      polymap::raise(polymap::ErrorCode::parameter_out_of_range,
                     "grid count must be positive");
    }
    polymap::MapDump dump =
        polymap::map_dump_from_json(polymap::load_json(a.map));
    add_topology_outline(d, *dump.mesh, dump.image);
    const polymap::TriMesh& mesh = *dump.mesh;
    auto eval = [&](Vec2 p) -> std::optional<Vec2> {
      auto loc = mesh.locate(p);
      if (!loc) return std::nullopt;
      const auto& tri = mesh.triangles[loc->triangle];
      return loc->bary[0] * dump.image[tri[0]] +
             loc->bary[1] * dump.image[tri[1]] +
             loc->bary[2] * dump.image[tri[2]];
    };
    polymap::BBox box;
    for (Vec2 p : mesh.nodes) box.expand(p);
    Vec2 ext = box.extent();
    int samples = std::max(a.grid * 16, 256);
    for (int k = 0; k < a.grid; ++k) {
      double fx = box.min.x + (k + 0.5) / a.grid * ext.x;
      double fy = box.min.y + (k + 0.5) / a.grid * ext.y;
      polymap::detail::add_mapped_line(d, Vec2{fx, box.min.y},
                                       Vec2{fx, box.max.y}, samples, eval);
      polymap::detail::add_mapped_line(d, Vec2{box.min.x, fy},
                                       Vec2{box.max.x, fy}, samples, eval);
    }
    what = "map grid";
  }
  polymap::atomic_write_text(a.out, polymap::to_svg(d));
  std::cout << "plot: " << what << ", " << d.lines.size() << " polylines -> "
            << a.out << "\n";
  return 0;
}

int dispatch(int argc, char** argv) {
  CLI::App app{
      "polymap: harmonic generalized barycentric coordinates, "
      "polygon-to-polygon maps, bijectivity certification, image warps"};
  app.require_subcommand(1);
  // The mesh-size flag is spelled --h, so help keeps only its long form.
  const char* help_text = "Print this help message and exit";
  app.set_help_flag("--help", help_text);
  auto add_subcommand = [&](const char* name, const char* desc) {
    CLI::App* cmd = app.add_subcommand(name, desc);
    cmd->set_help_flag("--help", help_text);
    return cmd;
  };

  GbcArgs gbc;
  CLI::App* gbc_cmd =
      add_subcommand("gbc", "Compute a harmonic coordinate basis");
  gbc_cmd->add_option("--source", gbc.source, "Polygon JSON")->required();
  gbc_cmd->add_option("--h", gbc.h, "Mesh cell size, relative (default 1/64)");
  gbc_cmd->add_option("--out", gbc.out, "Basis dump JSON path")->required();
  gbc_cmd->add_option("--svg", gbc.svg,
                      "Prefix for per-function contour SVGs (<prefix><k>.svg)");
  gbc_cmd->add_option("--levels", gbc.levels,
                      "Contour levels per function (default 10)");

  MapArgs map;
  CLI::App* map_cmd =
      add_subcommand("map", "Build a harmonic map between two polygons");
  map_cmd->add_option("--source", map.source, "Source polygon JSON")
      ->required();
  map_cmd->add_option("--target", map.target, "Target polygon JSON")
      ->required();
  map_cmd->add_option("--correspondence", map.correspondence,
                      "Vertex pairing config JSON (rotation, insertions)");
  map_cmd->add_option("--h", map.h, "Mesh cell size, relative (default 1/64)");
  map_cmd->add_option("--out", map.out, "Mesh-image dump JSON path")
      ->required();
  map_cmd->add_option("--svg", map.svg, "Optional warped-grid SVG path");
  map_cmd->add_option("--grid", map.grid,
                      "Grid lines per direction (default 20)");

  ComposeArgs compose;
  CLI::App* compose_cmd = add_subcommand(
      "compose", "Compose source->via with the inverse of target->via");
  compose_cmd->add_option("--source", compose.source, "Source polygon JSON")
      ->required();
  compose_cmd->add_option("--target", compose.target, "Target polygon JSON")
      ->required();
  compose_cmd->add_option("--via", compose.via, "Convex intermediate JSON")
      ->required();
  compose_cmd->add_option("--source-correspondence",
                          compose.source_correspondence,
                          "Pairing config for the source->via leg");
  compose_cmd->add_option("--target-correspondence",
                          compose.target_correspondence,
                          "Pairing config for the target->via leg");
  compose_cmd->add_option("--h", compose.h,
                          "Mesh cell size, relative (default 1/64)");
  compose_cmd->add_option("--out", compose.out, "Mesh-image dump JSON path")
      ->required();
  compose_cmd->add_option("--svg", compose.svg,
                          "Optional warped-grid SVG path");
  compose_cmd->add_option("--grid", compose.grid,
                          "Grid lines per direction (default 20)");

  VerifyArgs verify;
  CLI::App* verify_cmd = add_subcommand(
      "verify", "Certify bijectivity of a map numerically");
  verify_cmd->add_option("--source", verify.source, "Source polygon JSON")
      ->required();
  verify_cmd->add_option("--target", verify.target, "Target polygon JSON")
      ->required();
  verify_cmd->add_option("--correspondence", verify.correspondence,
                         "Vertex pairing config JSON");
  verify_cmd->add_option("--h", verify.h,
                         "Mesh cell size, relative (default 1/64)");
  verify_cmd->add_option("--samples", verify.samples,
                         "Interior Jacobian samples (default 25000)");
  verify_cmd->add_option("--threshold", verify.threshold,
                         "Determinant threshold (default 1e-5)");
  verify_cmd->add_option("--alphas", verify.alphas,
                         "Directions for the extrema profile (default 16)");
  verify_cmd->add_option("--out", verify.out, "Report JSON path");

  WarpArgs warp;
  CLI::App* warp_cmd =
      add_subcommand("warp", "Warp a raster image between polygons");
  warp_cmd->add_option("--source-image", warp.source_image, "Source PNG")
      ->required();
  warp_cmd->add_option("--source-poly", warp.source_poly,
                       "Source polygon JSON")
      ->required();
  warp_cmd->add_option("--target-poly", warp.target_poly,
                       "Target polygon JSON")
      ->required();
  warp_cmd->add_option("--via", warp.via,
                       "Optional convex intermediate polygon JSON");
  warp_cmd->add_option("--h", warp.h,
                       "Mesh cell size, relative (default 1/64)");
  warp_cmd->add_option("--background", warp.background,
                       "Fill R,G,B,A outside the target (default 0,0,0,0)");
  warp_cmd->add_option("--out", warp.out, "Output PNG path")->required();

  PlotArgs plot;
  CLI::App* plot_cmd =
      add_subcommand("plot", "Render a saved basis or map dump to SVG");
  plot_cmd->add_option("--basis", plot.basis, "Basis dump JSON (from gbc)");
  plot_cmd->add_option("--map", plot.map, "Map dump JSON (from map/compose)");
  plot_cmd->add_option("--function", plot.function,
                       "Basis function index to contour (default 0)");
  plot_cmd->add_option("--levels", plot.levels,
                       "Contour levels (default 10)");
  plot_cmd->add_option("--grid", plot.grid,
                       "Grid lines per direction (default 20)");
  plot_cmd->add_option("--out", plot.out, "Output SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // prints the requested help text, exits 0
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error("UsageError", e.what());
    return 2;
  }

  if (gbc_cmd->parsed()) return run_gbc(gbc);
  if (map_cmd->parsed()) return run_map(map);
  if (compose_cmd->parsed()) return run_compose(compose);
  if (verify_cmd->parsed()) return run_verify(verify);
  if (warp_cmd->parsed()) return run_warp(warp);
  return run_plot(plot);
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return dispatch(argc, argv);
  } catch (const polymap::Error& e) {
    emit_error(polymap::error_code_name(e.code()), detail_of(e));
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    emit_error("Internal", e.what());
    return 2;
  }
}
