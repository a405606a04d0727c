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

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "polymap/polymap.hpp"
#include "support.hpp"

namespace polymap {
namespace {

using namespace polymap::testing;

namespace fs = std::filesystem;

// A fresh scratch file path inside the test's temp directory.
std::string scratch_path(const std::string& name) {
  return (fs::temp_directory_path() / ("polymap_io_" + name)).string();
}

// --- text files and JSON parsing -------------------------------------------------

TEST(TextIoTest, AtomicWriteThenReadRoundTrips) {
  std::string path = scratch_path("roundtrip.txt");
  std::string content = "line one\nline two\n\ttabbed \xc3\xa9\n";
  atomic_write_text(path, content);
  EXPECT_EQ(read_text_file(path), content);
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  fs::remove(path);
}

TEST(TextIoTest, AtomicWriteReplacesExistingContent) {
  std::string path = scratch_path("replace.txt");
  atomic_write_text(path, "old");
  atomic_write_text(path, "new");
  EXPECT_EQ(read_text_file(path), "new");
  fs::remove(path);
}

TEST(TextIoTest, ReadMissingFileRaises) {
  EXPECT_RAISES(ErrorCode::io_failure,
                read_text_file(scratch_path("does_not_exist.txt")));
}

TEST(TextIoTest, ParseJsonRejectsGarbage) {
  EXPECT_RAISES(ErrorCode::io_failure, parse_json("{\"broken\":", "test"));
  EXPECT_RAISES(ErrorCode::io_failure, parse_json("not json at all", "test"));
}

// --- polygon JSON ------------------------------------------------------------------

TEST(PolygonJsonTest, RoundTripsASimplePolygon) {
  Polygon original = l_shape();
  Polygon loaded = polygon_from_json(polygon_to_json(original));
  ASSERT_EQ(loaded.outer.size(), original.outer.size());
  for (size_t i = 0; i < original.outer.size(); ++i) {
    EXPECT_EQ(loaded.outer[i].x, original.outer[i].x);
    EXPECT_EQ(loaded.outer[i].y, original.outer[i].y);
  }
  EXPECT_TRUE(loaded.holes.empty());
}

TEST(PolygonJsonTest, RoundTripsHoles) {
  Polygon original = square_with_hole();
  Polygon loaded = polygon_from_json(polygon_to_json(original));
  ASSERT_EQ(loaded.holes.size(), 1u);
  ASSERT_EQ(loaded.holes[0].size(), original.holes[0].size());
  for (size_t i = 0; i < original.holes[0].size(); ++i) {
    EXPECT_EQ(loaded.holes[0][i].x, original.holes[0][i].x);
    EXPECT_EQ(loaded.holes[0][i].y, original.holes[0][i].y);
  }
}

TEST(PolygonJsonTest, NeedsAnOuterLoop) {
  EXPECT_RAISES(ErrorCode::io_failure,
                polygon_from_json(parse_json("{\"holes\": []}", "test")));
  EXPECT_RAISES(ErrorCode::io_failure,
                polygon_from_json(parse_json("[1, 2, 3]", "test")));
}

TEST(PolygonJsonTest, RejectsMalformedPoints) {
  EXPECT_RAISES(
      ErrorCode::io_failure,
      polygon_from_json(parse_json("{\"outer\": [[0,0],[1]]}", "test")));
  EXPECT_RAISES(
      ErrorCode::io_failure,
      polygon_from_json(
          parse_json("{\"outer\": [[0,0],[1,\"x\"],[0,1]]}", "test")));
}

TEST(PolygonJsonTest, ValidatesTheLoadedPolygon) {
  // A bowtie self-intersects, so loading must reject it.
  EXPECT_RAISES(ErrorCode::self_intersection,
                polygon_from_json(parse_json(
                    "{\"outer\": [[0,0],[1,1],[1,0],[0,1]]}", "test")));
}

TEST(PolygonJsonTest, NormalizesClockwiseInput) {
  Polygon loaded = polygon_from_json(
      parse_json("{\"outer\": [[0,0],[0,1],[1,1],[1,0]]}", "test"));
  EXPECT_GT(signed_area(loaded.outer), 0.0);
}

TEST(PolygonJsonTest, LoadPolygonReportsMissingFiles) {
  EXPECT_RAISES(ErrorCode::io_failure,
                load_polygon(scratch_path("missing_polygon.json")));
}

// --- correspondence configs -------------------------------------------------------

TEST(CorrespondenceJsonTest, ParsesAllFields) {
  CorrespondenceConfig c = correspondence_from_json(parse_json(
      "{\"rotation\": 2, \"source_insertions\": [[1, 0.5]],"
      " \"target_insertions\": [[0, 0.25], [3, 0.75]]}",
      "test"));
  EXPECT_EQ(c.rotation, 2);
  ASSERT_EQ(c.source_insertions.size(), 1u);
  EXPECT_EQ(c.source_insertions[0].edge, 1);
  EXPECT_EQ(c.source_insertions[0].t, 0.5);
  ASSERT_EQ(c.target_insertions.size(), 2u);
  EXPECT_EQ(c.target_insertions[1].edge, 3);
  EXPECT_EQ(c.target_insertions[1].t, 0.75);
}

TEST(CorrespondenceJsonTest, DefaultsWhenFieldsAreAbsent) {
  CorrespondenceConfig c = correspondence_from_json(parse_json("{}", "test"));
  EXPECT_EQ(c.rotation, 0);
  EXPECT_TRUE(c.source_insertions.empty());
  EXPECT_TRUE(c.target_insertions.empty());
}

TEST(CorrespondenceJsonTest, RejectsNonIntegerRotation) {
  EXPECT_RAISES(
      ErrorCode::io_failure,
      correspondence_from_json(parse_json("{\"rotation\": 1.5}", "test")));
}

TEST(CorrespondenceJsonTest, RejectsMalformedInsertions) {
  EXPECT_RAISES(ErrorCode::io_failure,
                correspondence_from_json(
                    parse_json("{\"source_insertions\": [[0]]}", "test")));
  EXPECT_RAISES(ErrorCode::io_failure,
                correspondence_from_json(
                    parse_json("{\"target_insertions\": 7}", "test")));
}

TEST(CorrespondenceJsonTest, AppliesInsertionsBeforeRotation) {
  CorrespondenceConfig c;
  c.target_insertions = {{0, 0.5}};
  c.rotation = 1;
  auto [src, tgt] = apply_correspondence(unit_square(), square2(), c);
  EXPECT_EQ(src.outer.size(), 4u);
  // square2's edge 0 gains (1,0); rotating by 1 then starts the loop there.
  ASSERT_EQ(tgt.outer.size(), 5u);
  EXPECT_EQ(tgt.outer[0].x, 1.0);
  EXPECT_EQ(tgt.outer[0].y, 0.0);
  EXPECT_EQ(tgt.outer[1].x, 2.0);
  EXPECT_EQ(tgt.outer[1].y, 0.0);
}

TEST(CorrespondenceJsonTest, RotationWrapsModulo) {
  Polygon p = square2();
  Polygon plus = rotate_outer_loop(p, 5);   // == rotation by 1
  Polygon minus = rotate_outer_loop(p, -3);  // == rotation by 1
  ASSERT_EQ(plus.outer.size(), 4u);
  for (size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(plus.outer[i].x, minus.outer[i].x);
    EXPECT_EQ(plus.outer[i].y, minus.outer[i].y);
  }
  EXPECT_EQ(plus.outer[0].x, p.outer[1].x);
  EXPECT_EQ(plus.outer[0].y, p.outer[1].y);
}

// --- basis dumps -------------------------------------------------------------------

TEST(BasisDumpTest, RoundTripsThroughJson) {
  GbcBasis basis = compute_gbc(unit_square(), 1.0 / 8);
  BasisDump dump = basis_dump_from_json(basis_to_json(basis));
  ASSERT_EQ(dump.mesh->nodes.size(), basis.mesh->nodes.size());
  ASSERT_EQ(dump.mesh->triangles.size(), basis.mesh->triangles.size());
  ASSERT_EQ(dump.phi.size(), basis.functions.size());
  for (size_t i = 0; i < basis.mesh->nodes.size(); ++i) {
    EXPECT_EQ(dump.mesh->nodes[i].x, basis.mesh->nodes[i].x);
    EXPECT_EQ(dump.mesh->nodes[i].y, basis.mesh->nodes[i].y);
  }
  for (size_t k = 0; k < basis.functions.size(); ++k) {
    ASSERT_EQ(dump.phi[k].size(), basis.functions[k].size());
    for (size_t i = 0; i < basis.functions[k].size(); ++i) {
      EXPECT_EQ(dump.phi[k][i], basis.functions[k][i]);
    }
  }
}

TEST(BasisDumpTest, ReloadedMeshStillLocatesAndInterpolates) {
  GbcBasis basis = compute_gbc(unit_square(), 1.0 / 8);
  BasisDump dump = basis_dump_from_json(basis_to_json(basis));
  auto loc = dump.mesh->locate({0.3, 0.4});
  ASSERT_TRUE(loc.has_value());
  double sum = 0.0;
  for (const auto& phi : dump.phi) sum += dump.mesh->interpolate(phi, *loc);
  EXPECT_NEAR(sum, 1.0, 1e-9);
}

TEST(BasisDumpTest, RejectsMissingMembers) {
  EXPECT_RAISES(ErrorCode::io_failure,
                basis_dump_from_json(parse_json("{}", "test")));
  EXPECT_RAISES(ErrorCode::io_failure,
                basis_dump_from_json(parse_json(
                    "{\"nodes\": [], \"triangles\": []}", "test")));
}

TEST(BasisDumpTest, RejectsBadTriangleIndices) {
  Json j = parse_json(
      "{\"nodes\": [[0,0],[1,0],[0,1]],"
      " \"triangles\": [[0,1,9]], \"phi\": []}",
      "test");
  EXPECT_RAISES(ErrorCode::io_failure, basis_dump_from_json(j));
}

TEST(BasisDumpTest, RejectsShortPhiRows) {
  Json j = parse_json(
      "{\"nodes\": [[0,0],[1,0],[0,1]],"
      " \"triangles\": [[0,1,2]], \"phi\": [[1.0, 0.0]]}",
      "test");
  EXPECT_RAISES(ErrorCode::io_failure, basis_dump_from_json(j));
}

// --- map dumps ---------------------------------------------------------------------

TEST(MapDumpTest, RoundTripsThroughJson) {
  auto basis =
      std::make_shared<const GbcBasis>(compute_gbc(l_shape(), 1.0 / 8));
  HarmonicMap map =
      build_map_from_targets(basis, l_to_square_targets(), square2());
  MapDump dump = map_dump_from_json(map_to_json(map));
  ASSERT_EQ(dump.mesh->nodes.size(), map.mesh().nodes.size());
  ASSERT_EQ(dump.image.size(), map.image.size());
  for (size_t i = 0; i < map.image.size(); ++i) {
    EXPECT_EQ(dump.image[i].x, map.image[i].x);
    EXPECT_EQ(dump.image[i].y, map.image[i].y);
  }
}

TEST(MapDumpTest, RejectsImageLengthMismatch) {
  auto basis =
      std::make_shared<const GbcBasis>(compute_gbc(unit_square(), 1.0 / 4));
  HarmonicMap map = build_map_from_targets(
      basis, std::vector<Vec2>(unit_square().outer), unit_square());
  Json j = map_to_json(map);
  j["image"].erase(0);
  EXPECT_RAISES(ErrorCode::io_failure, map_dump_from_json(j));
}

TEST(MapDumpTest, ComposedIdentityDumpKeepsNodes) {
  auto basis =
      std::make_shared<const GbcBasis>(compute_gbc(unit_square(), 1.0 / 8));
  std::vector<Vec2> corners = unit_square().outer;
  ComposedMap composed =
      compose_maps(build_map_from_targets(basis, corners, unit_square()),
                   build_map_from_targets(basis, corners, unit_square()));
  Json j = composed_map_to_json(composed);
  MapDump dump = map_dump_from_json(j);
  ASSERT_EQ(dump.image.size(), dump.mesh->nodes.size());
  for (size_t i = 0; i < dump.image.size(); ++i) {
    EXPECT_NEAR(dump.image[i].x, dump.mesh->nodes[i].x, 1e-6);
    EXPECT_NEAR(dump.image[i].y, dump.mesh->nodes[i].y, 1e-6);
  }
}

// --- certification reports ---------------------------------------------------------

TEST(ReportJsonTest, SchemaKeysComeInStableOrder) {
  auto basis =
      std::make_shared<const GbcBasis>(compute_gbc(unit_square(), 1.0 / 8));
  HarmonicMap map = build_map_from_targets(
      basis, std::vector<Vec2>(unit_square().outer), unit_square());
  VerifyConfig cfg;
  cfg.sample_count = 500;
  cfg.alpha_count = 4;
  Json j = report_to_json(certify(map, cfg));
  std::vector<std::string> keys;
  for (const auto& item : j.items()) keys.push_back(item.key());
  EXPECT_EQ(keys,
            (std::vector<std::string>{"min_det", "below_threshold",
                                      "orientation_ok", "coverage",
                                      "area_ratio", "extrema", "verdict"}));
  EXPECT_EQ(j["verdict"].get<std::string>(), "certified");
  ASSERT_EQ(j["extrema"].size(), 4u);
  std::vector<std::string> ekeys;
  for (const auto& item : j["extrema"][0].items()) ekeys.push_back(item.key());
  EXPECT_EQ(ekeys, (std::vector<std::string>{"alpha", "n_max", "n_min",
                                             "min_grad"}));
}

TEST(ReportJsonTest, BelowThresholdEntriesCarryPointAndDet) {
  auto basis =
      std::make_shared<const GbcBasis>(compute_gbc(unit_square(), 1.0 / 8));
  HarmonicMap map = build_map_from_targets(
      basis, std::vector<Vec2>(unit_square().outer), unit_square());
  VerifyConfig cfg;
  cfg.sample_count = 200;
  cfg.alpha_count = 4;
  cfg.det_threshold = 2.0;  // the identity's unit determinant sits below this
  Json j = report_to_json(certify(map, cfg));
  ASSERT_EQ(j["below_threshold"].size(), 200u);
  const Json& e = j["below_threshold"][0];
  ASSERT_TRUE(e.contains("x"));
  ASSERT_TRUE(e.contains("y"));
  ASSERT_TRUE(e.contains("det"));
  EXPECT_NEAR(e["det"].get<double>(), 1.0, 1e-6);
}

// --- PNG rasters -------------------------------------------------------------------

TEST(PngIoTest, WriteThenReadRoundTripsExactBytes) {
  RasterImage img;
  img.width = 5;
  img.height = 3;
  img.rgba.resize(5u * 3u * 4u);
  for (size_t i = 0; i < img.rgba.size(); ++i) {
    img.rgba[i] = static_cast<std::uint8_t>((i * 37 + 11) % 256);
  }
  std::string path = scratch_path("roundtrip.png");
  write_png(path, img);
  EXPECT_FALSE(fs::exists(path + ".tmp"));
  RasterImage back = read_png(path);
  EXPECT_EQ(back.width, img.width);
  EXPECT_EQ(back.height, img.height);
  EXPECT_EQ(back.rgba, img.rgba);
  EXPECT_EQ(back.min_corner.x, 0.0);
  EXPECT_EQ(back.min_corner.y, 0.0);
  EXPECT_EQ(back.pixel_size, 1.0);
  fs::remove(path);
}

TEST(PngIoTest, ReadMissingFileRaises) {
  EXPECT_RAISES(ErrorCode::io_failure,
                read_png(scratch_path("missing_image.png")));
}

TEST(PngIoTest, ReadRejectsNonPngBytes) {
  std::string path = scratch_path("not_a_png.png");
  atomic_write_text(path, "plain text pretending to be an image");
  EXPECT_RAISES(ErrorCode::io_failure, read_png(path));
  fs::remove(path);
}

// --- boundary loops from topology --------------------------------------------------

TEST(TopologyLoopsTest, SquareMeshYieldsOneCounterclockwiseLoop) {
  TriMesh mesh = triangulate(unit_square(), 1.0 / 4);
  auto loops = boundary_loops_from_topology(mesh);
  ASSERT_EQ(loops.size(), 1u);
  std::vector<Vec2> pts;
  for (int node : loops[0]) pts.push_back(mesh.nodes[node]);
  EXPECT_NEAR(signed_area(pts), 1.0, 1e-12);
  for (int node : loops[0]) {
    EXPECT_TRUE(mesh.tags[node].on_boundary());
  }
}

TEST(TopologyLoopsTest, HoleMeshYieldsOuterAndHoleLoops) {
  TriMesh mesh = triangulate(square_with_hole(), 1.0 / 8);
  auto loops = boundary_loops_from_topology(mesh);
  ASSERT_EQ(loops.size(), 2u);
  double a0, a1;
  {
    std::vector<Vec2> p0, p1;
    for (int node : loops[0]) p0.push_back(mesh.nodes[node]);
    for (int node : loops[1]) p1.push_back(mesh.nodes[node]);
    a0 = signed_area(p0);
    a1 = signed_area(p1);
  }
  // One counterclockwise outer loop, one clockwise hole loop; together they
  // enclose the polygon's area.
  EXPECT_GT(std::max(a0, a1), 0.0);
  EXPECT_LT(std::min(a0, a1), 0.0);
  EXPECT_NEAR(a0 + a1, polygon_area(square_with_hole()), 1e-12);
}

TEST(TopologyLoopsTest, ReloadedDumpRecoversTheOutline) {
  GbcBasis basis = compute_gbc(l_shape(), 1.0 / 4);
  BasisDump dump = basis_dump_from_json(basis_to_json(basis));
  auto loops = boundary_loops_from_topology(*dump.mesh);
  ASSERT_EQ(loops.size(), 1u);
  std::vector<Vec2> pts;
  for (int node : loops[0]) pts.push_back(dump.mesh->nodes[node]);
  EXPECT_NEAR(signed_area(pts), polygon_area(l_shape()), 1e-12);
}

}  // namespace
}  // namespace polymap
