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

#include "polymap/triangulate.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <utility>
#include <vector>

#include <gtest/gtest.h>

#include "polymap/geometry.hpp"
#include "polymap/trimesh.hpp"
#include "support.hpp"

namespace polymap {
namespace {

using testing::convex_7gon;
using testing::h_shape;
using testing::j_shape;
using testing::l_shape;
using testing::square_with_hole;
using testing::unit_square;
using testing::unit_triangle;

double mesh_area(const TriMesh& m) {
  double total = 0.0;
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    total += m.triangle_area(static_cast<int>(t));
  }
  return total;
}

// Every interior edge must be shared by exactly two triangles with opposite
// orientation; every once-used edge must lie on the polygon boundary.
void expect_conforming(const TriMesh& m, const Polygon& p) {
  std::map<std::pair<int, int>, int> edge_count;
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      edge_count[{std::min(a, b), std::max(a, b)}] += 1;
    }
  }
  double scale = bounding_box(p).max_extent();
  int boundary_edges = 0;
  for (const auto& [edge, count] : edge_count) {
    ASSERT_LE(count, 2) << "edge used by more than two triangles";
    if (count == 1) {
      ++boundary_edges;
      EXPECT_LE(distance_to_boundary(p, m.nodes[edge.first]), 1e-9 * scale);
      EXPECT_LE(distance_to_boundary(p, m.nodes[edge.second]), 1e-9 * scale);
    }
  }
  size_t boundary_nodes = 0;
  for (const auto& loop : m.boundary_loops) boundary_nodes += loop.size();
  EXPECT_EQ(static_cast<size_t>(boundary_edges), boundary_nodes);
}

void expect_positive_areas(const TriMesh& m) {
  for (size_t t = 0; t < m.triangles.size(); ++t) {
    ASSERT_GT(m.triangle_area(static_cast<int>(t)), 0.0) << "triangle " << t;
  }
}

void expect_tags_consistent(const TriMesh& m, const Polygon& p) {
  double scale = bounding_box(p).max_extent();
  for (size_t l = 0; l < m.boundary_loops.size(); ++l) {
    for (int n : m.boundary_loops[l]) {
      const BoundaryTag& tag = m.tags[n];
      ASSERT_TRUE(tag.on_boundary());
      ASSERT_EQ(static_cast<size_t>(tag.loop), l);
      const auto& loop = p.loop(l);
      ASSERT_GE(tag.edge, 0);
      ASSERT_LT(static_cast<size_t>(tag.edge), loop.size());
      ASSERT_GE(tag.t, 0.0);
      ASSERT_LT(tag.t, 1.0);
      Vec2 expect = lerp(loop[tag.edge], loop[(tag.edge + 1) % loop.size()],
                         tag.t);
      EXPECT_LE(norm(expect - m.nodes[n]), 1e-9 * scale);
    }
  }
  // Every polygon vertex appears as a node, tagged as that vertex.
  for (size_t l = 0; l < p.loop_count(); ++l) {
    ASSERT_EQ(m.vertex_nodes[l].size(), p.loop(l).size());
    for (size_t v = 0; v < p.loop(l).size(); ++v) {
      int n = m.vertex_nodes[l][v];
      EXPECT_LE(norm(m.nodes[n] - p.loop(l)[v]), 1e-12 * scale);
      EXPECT_TRUE(m.tags[n].at_vertex());
    }
  }
}

TEST(Triangulate, SquareCoarseExactCover) {
  TriMesh m = triangulate(unit_square(), 0.5);
  EXPECT_NEAR(mesh_area(m), 1.0, 1e-12);
  expect_positive_areas(m);
  expect_conforming(m, unit_square());
  expect_tags_consistent(m, unit_square());
}

TEST(Triangulate, SquareFineNodeCountBaseline) {
  TriMesh m = triangulate(unit_square(), 1.0 / 64.0);
  EXPECT_GE(m.nodes.size(), 2000u);
  EXPECT_LE(m.nodes.size(), 10000u);
  EXPECT_NEAR(mesh_area(m), 1.0, 1e-10);
  expect_positive_areas(m);
}

TEST(Triangulate, LShapeCornersAreNodes) {
  Polygon l = l_shape();
  TriMesh m = triangulate(l, 0.1);
  ASSERT_EQ(m.vertex_nodes.size(), 1u);
  ASSERT_EQ(m.vertex_nodes[0].size(), 6u);
  for (size_t v = 0; v < 6; ++v) {
    Vec2 node = m.nodes[m.vertex_nodes[0][v]];
    EXPECT_LE(norm(node - l.outer[v]), 1e-12 * 2.0);
  }
}

TEST(Triangulate, AllFixturesMeshCleanly) {
  struct Case {
    Polygon polygon;
    double area;
  };
  const Case cases[] = {
      {unit_square(), 1.0},        {unit_triangle(), 0.5},
      {l_shape(), 3.0},            {j_shape(), 7.0},
      {convex_7gon(), 1.4375},     {h_shape(), 7.0},
      {square_with_hole(), 8.0},   {testing::l_shape_2x(), 12.0},
  };
  for (const Case& c : cases) {
    TriMesh m = triangulate(c.polygon, 1.0 / 16.0);
    EXPECT_NEAR(mesh_area(m), c.area, 1e-10 * c.area);
    expect_positive_areas(m);
    expect_conforming(m, c.polygon);
    expect_tags_consistent(m, c.polygon);
  }
}

TEST(Triangulate, HoleBoundaryTaggedOnSecondLoop) {
  Polygon p = square_with_hole();
  TriMesh m = triangulate(p, 1.0 / 8.0);
  ASSERT_EQ(m.boundary_loops.size(), 2u);
  EXPECT_GE(m.boundary_loops[1].size(), 4u);
  for (int n : m.boundary_loops[1]) {
    EXPECT_EQ(m.tags[n].loop, 1);
  }
}

TEST(Triangulate, MinimumAngleRespected) {
  for (const Polygon& p : {unit_square(), l_shape(), convex_7gon()}) {
    TriMesh m = triangulate(p, 1.0 / 16.0);
    double worst = 180.0;
    for (const auto& tri : m.triangles) {
      Vec2 a = m.nodes[tri[0]], b = m.nodes[tri[1]], c = m.nodes[tri[2]];
      double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
      double lo = std::min({la, lb, lc});
      double area = triangle_area(a, b, c);
      double circum = la * lb * lc / (4.0 * area);
      double min_angle = std::asin(std::clamp(lo / (2.0 * circum), 0.0, 1.0)) *
                         180.0 / 3.14159265358979323846;
      worst = std::min(worst, min_angle);
    }
    EXPECT_GE(worst, 24.9) << "worst triangle angle too small";
  }
}

TEST(Triangulate, SizeBoundHolds) {
  const double h = 1.0 / 16.0;
  TriMesh m = triangulate(unit_square(), h);
  for (const auto& tri : m.triangles) {
    Vec2 a = m.nodes[tri[0]], b = m.nodes[tri[1]], c = m.nodes[tri[2]];
    double la = norm(c - b), lb = norm(a - c), lc = norm(b - a);
    double area = triangle_area(a, b, c);
    double circum = la * lb * lc / (4.0 * area);
    EXPECT_LE(circum, 0.62 * h * 1.0001);
  }
}

TEST(Triangulate, DeterministicAcrossRuns) {
  TriMesh a = triangulate(l_shape(), 1.0 / 16.0);
  TriMesh b = triangulate(l_shape(), 1.0 / 16.0);
  ASSERT_EQ(a.nodes.size(), b.nodes.size());
  ASSERT_EQ(a.triangles.size(), b.triangles.size());
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    EXPECT_EQ(a.nodes[i].x, b.nodes[i].x);
    EXPECT_EQ(a.nodes[i].y, b.nodes[i].y);
  }
  for (size_t t = 0; t < a.triangles.size(); ++t) {
    EXPECT_EQ(a.triangles[t], b.triangles[t]);
  }
}

TEST(Triangulate, RejectsBadCellSize) {
  EXPECT_RAISES(ErrorCode::parameter_out_of_range,
                triangulate(unit_square(), 0.0));
  EXPECT_RAISES(ErrorCode::parameter_out_of_range,
                triangulate(unit_square(), -0.1));
  EXPECT_RAISES(ErrorCode::parameter_out_of_range,
                triangulate(unit_square(), 0.75));
}

TEST(Locate, CenterInsideOutsideAndNodes) {
  TriMesh m = triangulate(unit_square(), 0.25);
  auto center = m.locate({0.5, 0.5});
  ASSERT_TRUE(center.has_value());
  double sum = center->bary[0] + center->bary[1] + center->bary[2];
  EXPECT_NEAR(sum, 1.0, 1e-12);
  // Barycentric reconstruction returns the query point.
  const auto& tri = m.triangles[center->triangle];
  Vec2 back = center->bary[0] * m.nodes[tri[0]] +
              center->bary[1] * m.nodes[tri[1]] +
              center->bary[2] * m.nodes[tri[2]];
  EXPECT_LE(norm(back - Vec2{0.5, 0.5}), 1e-12);

  EXPECT_FALSE(m.locate({2.0, 2.0}).has_value());
  EXPECT_FALSE(m.locate({-0.01, 0.5}).has_value());

  // A mesh node locates with a standard-basis weight vector.
  Vec2 q = m.nodes[7];
  auto at_node = m.locate(q);
  ASSERT_TRUE(at_node.has_value());
  const auto& tri2 = m.triangles[at_node->triangle];
  for (int k = 0; k < 3; ++k) {
    if (tri2[k] == 7) {
      EXPECT_NEAR(at_node->bary[k], 1.0, 1e-12);
    } else {
      EXPECT_NEAR(at_node->bary[k], 0.0, 1e-12);
    }
  }
}

TEST(Locate, SharedEdgeTieBreaksToLowestIndex) {
  TriMesh m = triangulate(unit_square(), 0.5);
  // Probe points on interior shared edges: the reported triangle must be the
  // lowest-index triangle containing the point.
  for (const auto& tri : m.triangles) {
    for (int e = 0; e < 3; ++e) {
      Vec2 mid = 0.5 * (m.nodes[tri[e]] + m.nodes[tri[(e + 1) % 3]]);
      auto loc = m.locate(mid);
      ASSERT_TRUE(loc.has_value());
      // Every triangle with a smaller index must NOT contain the point.
      for (int t = 0; t < loc->triangle; ++t) {
        const auto& other = m.triangles[t];
        Vec2 a = m.nodes[other[0]], b = m.nodes[other[1]],
             c = m.nodes[other[2]];
        double area2 = cross(b - a, c - a);
        double w0 = cross(c - b, mid - b) / area2;
        double w1 = cross(a - c, mid - c) / area2;
        double w2 = cross(b - a, mid - a) / area2;
        EXPECT_LT(std::min({w0, w1, w2}), -1e-9)
            << "triangle " << t << " also contains the probe";
      }
    }
  }
}

TEST(Interpolate, ReproducesAffineFunctions) {
  TriMesh m = triangulate(convex_7gon(), 1.0 / 8.0);
  std::vector<double> f(m.nodes.size());
  for (size_t i = 0; i < m.nodes.size(); ++i) {
    f[i] = 2.0 * m.nodes[i].x + 3.0 * m.nodes[i].y - 1.0;
  }
  const Vec2 probes[] = {{0.5, 0.25}, {0.125, 0.0625}, {0.75, 0.5},
                         {1.0, 0.5},  {0.25, 0.75}};
  for (Vec2 q : probes) {
    auto loc = m.locate(q);
    ASSERT_TRUE(loc.has_value());
    EXPECT_NEAR(m.interpolate(f, *loc), 2.0 * q.x + 3.0 * q.y - 1.0, 1e-12);
  }
}

}  // namespace
}  // namespace polymap
