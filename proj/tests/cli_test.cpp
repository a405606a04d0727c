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

// End-to-end tests of the polymap binary: flags, exit codes, the JSON error
// channel on stderr, and the files each subcommand leaves behind.

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "polymap/polymap.hpp"
#include "support.hpp"

#ifndef POLYMAP_CLI_PATH
#error "POLYMAP_CLI_PATH must point at the built polymap binary"
#endif

namespace polymap {
namespace {

using namespace polymap::testing;

namespace fs = std::filesystem;

struct CliResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

class CliTest : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    dir_ = (fs::temp_directory_path() / "polymap_cli_test").string();
    fs::create_directories(dir_);
  }

  // A path inside the suite's scratch directory.
  static std::string path(const std::string& name) {
    return dir_ + "/" + name;
  }

  static std::string write_polygon(const std::string& name, const Polygon& p) {
    std::string file = path(name);
    atomic_write_text(file, polygon_to_json(p).dump());
    return file;
  }

  static std::string write_json_file(const std::string& name, const Json& j) {
    std::string file = path(name);
    atomic_write_text(file, j.dump());
    return file;
  }

  static CliResult run(const std::string& args) {
    std::string out_file = path("last_stdout.txt");
    std::string err_file = path("last_stderr.txt");
    std::string cmd = std::string(POLYMAP_CLI_PATH) + " " + args + " > " +
                      out_file + " 2> " + err_file;
    int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WEXITSTATUS(raw);
    r.out = read_text_file(out_file);
    r.err = read_text_file(err_file);
    return r;
  }

  // The stderr contract: one machine-parseable JSON object per failure.
  static Json error_json(const CliResult& r) {
    Json j = parse_json(r.err, "stderr");
    EXPECT_TRUE(j.is_object());
    EXPECT_TRUE(j.contains("error"));
    EXPECT_TRUE(j.contains("detail"));
    return j;
  }

  static std::string dir_;
};

std::string CliTest::dir_;

TEST_F(CliTest, HelpExitsCleanly) {
  CliResult r = run("--help");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("Usage"), std::string::npos);
  EXPECT_NE(r.out.find("verify"), std::string::npos);
}

TEST_F(CliTest, VerifySquareToSquareIsCertified) {
  std::string square = write_polygon("square.json", unit_square());
  CliResult r = run("verify --source " + square + " --target " + square +
                    " --h 0.125 --samples 2000 --alphas 8 --out " +
                    path("report.json"));
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("certified"), std::string::npos);
  Json report = load_json(path("report.json"));
  EXPECT_EQ(report["verdict"].get<std::string>(), "certified");
  EXPECT_NEAR(report["min_det"].get<double>(), 1.0, 1e-6);
  EXPECT_EQ(report["coverage"].get<double>(), 1.0);
}

TEST_F(CliTest, MissingInputExitsTwo) {
  CliResult r = run("verify --source " + path("no_such_file.json") +
                    " --target " + path("also_missing.json"));
  EXPECT_EQ(r.exit_code, 2);
  Json j = error_json(r);
  EXPECT_EQ(j["error"].get<std::string>(), "IoFailure");
  EXPECT_FALSE(j["detail"].get<std::string>().empty());
}

TEST_F(CliTest, UnknownFlagExitsTwoWithUsageError) {
  std::string square = write_polygon("square_uf.json", unit_square());
  CliResult r = run("gbc --source " + square + " --out " + path("x.json") +
                    " --definitely-not-a-flag 3");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_json(r)["error"].get<std::string>(), "UsageError");
}

TEST_F(CliTest, MissingSubcommandExitsTwo) {
  CliResult r = run("");
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_json(r)["error"].get<std::string>(), "UsageError");
}

TEST_F(CliTest, NonInjectiveWarpExitsThree) {
  // Rotating the L-shape's vertex list ruins the pairing: the image folds,
  // and the warp must refuse rather than resolve pixels ambiguously.
  Polygon source = square2_six_points();
  Polygon rotated;
  const auto& outer = l_shape().outer;
  for (size_t i = 0; i < outer.size(); ++i) {
    rotated.outer.push_back(outer[(i + 2) % outer.size()]);
  }
  std::string src = write_polygon("warp_src.json", source);
  std::string tgt = write_polygon("warp_tgt.json", rotated);
  RasterImage img = make_checkerboard(16, 16, 4);
  write_png(path("warp_in.png"), img);
  CliResult r = run("warp --source-image " + path("warp_in.png") +
                    " --source-poly " + src + " --target-poly " + tgt +
                    " --h 0.0625 --out " + path("warp_out.png"));
  EXPECT_EQ(r.exit_code, 3);
  EXPECT_EQ(error_json(r)["error"].get<std::string>(), "Ambiguous");
  EXPECT_FALSE(fs::exists(path("warp_out.png")));
}

TEST_F(CliTest, ReportsAreByteIdentical) {
  std::string lshape = write_polygon("lshape.json", l_shape());
  std::string square2p = write_polygon("square2.json", square2());
  Json corr;
  corr["rotation"] = 0;
  corr["source_insertions"] = Json::array();
  Json ti = Json::array();
  ti.push_back(Json::array({1, 0.5}));
  ti.push_back(Json::array({2, 0.5}));
  corr["target_insertions"] = ti;
  std::string corr_file = write_json_file("corr.json", corr);

  std::string invocation = "verify --source " + lshape + " --target " +
                           square2p + " --correspondence " + corr_file +
                           " --h 0.125 --samples 3000 --alphas 8 --out ";
  CliResult r1 = run(invocation + path("rep_a.json"));
  CliResult r2 = run(invocation + path("rep_b.json"));
  EXPECT_EQ(r1.exit_code, 0);
  EXPECT_EQ(r2.exit_code, 0);
  EXPECT_EQ(read_text_file(path("rep_a.json")),
            read_text_file(path("rep_b.json")));
  EXPECT_NE(r1.out.find("certified"), std::string::npos);
}

TEST_F(CliTest, FailedVerdictStillExitsZero) {
  Polygon rotated;
  const auto& outer = l_shape().outer;
  for (size_t i = 0; i < outer.size(); ++i) {
    rotated.outer.push_back(outer[(i + 2) % outer.size()]);
  }
  std::string src = write_polygon("fv_src.json", square2_six_points());
  std::string tgt = write_polygon("fv_tgt.json", rotated);
  CliResult r = run("verify --source " + src + " --target " + tgt +
                    " --h 0.0625 --samples 1500 --alphas 4");
  EXPECT_EQ(r.exit_code, 0);
  EXPECT_NE(r.out.find("failed"), std::string::npos);
}

TEST_F(CliTest, GbcWritesBasisDumpAndContourSvgs) {
  std::string square = write_polygon("gbc_square.json", unit_square());
  CliResult r = run("gbc --source " + square + " --h 0.125 --out " +
                    path("basis.json") + " --svg " + path("phi") +
                    " --levels 6");
  EXPECT_EQ(r.exit_code, 0);
  Json basis = load_json(path("basis.json"));
  ASSERT_EQ(basis["phi"].size(), 4u);
  EXPECT_EQ(basis["nodes"].size(), basis["phi"][0].size());
  for (int k = 0; k < 4; ++k) {
    std::string svg = read_text_file(path("phi") + std::to_string(k) + ".svg");
    EXPECT_EQ(svg.rfind("<svg", 0), 0u) << "phi" << k;
    EXPECT_EQ(svg.find("nan"), std::string::npos);
  }
}

TEST_F(CliTest, MapWritesDumpAndGridSvg) {
  std::string lshape = write_polygon("map_l.json", l_shape());
  std::string square2p = write_polygon("map_sq2.json", square2());
  Json corr;
  Json ti = Json::array();
  ti.push_back(Json::array({1, 0.5}));
  ti.push_back(Json::array({2, 0.5}));
  corr["target_insertions"] = ti;
  std::string corr_file = write_json_file("map_corr.json", corr);
  CliResult r = run("map --source " + lshape + " --target " + square2p +
                    " --correspondence " + corr_file + " --h 0.125 --out " +
                    path("map.json") + " --svg " + path("map_grid.svg") +
                    " --grid 6");
  EXPECT_EQ(r.exit_code, 0);
  MapDump dump = map_dump_from_json(load_json(path("map.json")));
  EXPECT_EQ(dump.image.size(), dump.mesh->nodes.size());
  std::string svg = read_text_file(path("map_grid.svg"));
  EXPECT_EQ(svg.rfind("<svg", 0), 0u);
  EXPECT_NE(svg.find("class=\"grid\""), std::string::npos);
}

TEST_F(CliTest, ComposeRoundTripIsNearIdentity) {
  std::string lshape = write_polygon("comp_l.json", l_shape());
  std::string square2p = write_polygon("comp_sq2.json", square2());
  Json corr;
  Json ti = Json::array();
  ti.push_back(Json::array({1, 0.5}));
  ti.push_back(Json::array({2, 0.5}));
  corr["target_insertions"] = ti;
  std::string corr_file = write_json_file("comp_corr.json", corr);
  CliResult r = run("compose --source " + lshape + " --target " + lshape +
                    " --via " + square2p + " --source-correspondence " +
                    corr_file + " --target-correspondence " + corr_file +
                    " --h 0.125 --out " + path("comp.json"));
  EXPECT_EQ(r.exit_code, 0);
  MapDump dump = map_dump_from_json(load_json(path("comp.json")));
  ASSERT_EQ(dump.image.size(), dump.mesh->nodes.size());
  for (size_t i = 0; i < dump.image.size(); ++i) {
    EXPECT_NEAR(dump.image[i].x, dump.mesh->nodes[i].x, 1e-6);
    EXPECT_NEAR(dump.image[i].y, dump.mesh->nodes[i].y, 1e-6);
  }
}

TEST_F(CliTest, PlotRendersBasisAndMapDumps) {
  std::string square = write_polygon("plot_square.json", unit_square());
  ASSERT_EQ(run("gbc --source " + square + " --h 0.125 --out " +
                path("plot_basis.json"))
                .exit_code,
            0);
  ASSERT_EQ(run("map --source " + square + " --target " + square +
                " --h 0.125 --out " + path("plot_map.json"))
                .exit_code,
            0);
  CliResult rb = run("plot --basis " + path("plot_basis.json") +
                     " --function 1 --levels 6 --out " + path("plot_b.svg"));
  EXPECT_EQ(rb.exit_code, 0);
  CliResult rm = run("plot --map " + path("plot_map.json") +
                     " --grid 5 --out " + path("plot_m.svg"));
  EXPECT_EQ(rm.exit_code, 0);
  for (const char* name : {"plot_b.svg", "plot_m.svg"}) {
    std::string svg = read_text_file(path(name));
    EXPECT_EQ(svg.rfind("<svg", 0), 0u) << name;
    EXPECT_NE(svg.find("class=\"outline\""), std::string::npos) << name;
    EXPECT_EQ(svg.find("nan"), std::string::npos) << name;
  }
  CliResult both = run("plot --basis " + path("plot_basis.json") + " --map " +
                       path("plot_map.json") + " --out " + path("x.svg"));
  EXPECT_EQ(both.exit_code, 2);
}

TEST_F(CliTest, WarpIdentityKeepsTheCheckerboard) {
  std::string square = write_polygon("warp_id_square.json", unit_square());
  RasterImage input = make_checkerboard(32, 32, 8);
  input.pixel_size = 1.0 / 32;  // unit square at 32x32 pixels
  write_png(path("warp_id_in.png"), input);
  CliResult r = run("warp --source-image " + path("warp_id_in.png") +
                    " --source-poly " + square + " --target-poly " + square +
                    " --h 0.0625 --out " + path("warp_id_out.png"));
  EXPECT_EQ(r.exit_code, 0);
  RasterImage output = read_png(path("warp_id_out.png"));
  ASSERT_EQ(output.width, input.width);
  ASSERT_EQ(output.height, input.height);
  int worst = 0;
  for (size_t i = 0; i < input.rgba.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<int>(input.rgba[i]) -
                                     static_cast<int>(output.rgba[i])));
  }
  EXPECT_LE(worst, 1);
}

TEST_F(CliTest, WarpRejectsMalformedBackground) {
  std::string square = write_polygon("warp_bg_square.json", unit_square());
  write_png(path("warp_bg_in.png"), make_checkerboard(8, 8, 4));
  CliResult r = run("warp --source-image " + path("warp_bg_in.png") +
                    " --source-poly " + square + " --target-poly " + square +
                    " --background 1,2 --out " + path("warp_bg_out.png"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_json(r)["error"].get<std::string>(), "ParameterOutOfRange");
}

TEST_F(CliTest, OutOfRangeCellSizeExitsTwo) {
  std::string square = write_polygon("h_square.json", unit_square());
  CliResult r = run("gbc --source " + square + " --h 0.75 --out " +
                    path("h_basis.json"));
  EXPECT_EQ(r.exit_code, 2);
  EXPECT_EQ(error_json(r)["error"].get<std::string>(), "ParameterOutOfRange");
}

}  // namespace
}  // namespace polymap
