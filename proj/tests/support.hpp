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

#ifndef POLYMAP_TESTS_SUPPORT_HPP_
#define POLYMAP_TESTS_SUPPORT_HPP_

// Shared fixtures: the polygons and correspondences the suite is built on.
// Coordinates are dyadic so fixture geometry is exact in floating point.

#include <array>
#include <cstdint>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/geometry.hpp"
#include "polymap/warp.hpp"

// Asserts that a statement raises a polymap::Error with the given code.
#define EXPECT_RAISES(code_, statement_)                                   \
  do {                                                                     \
    try {                                                                  \
      statement_;                                                          \
      ADD_FAILURE() << "expected " << polymap::error_code_name(code_)      \
                    << ", nothing was raised";                             \
    } catch (const polymap::Error& e_) {                                   \
      EXPECT_STREQ(polymap::error_code_name(e_.code()),                    \
                   polymap::error_code_name(code_))                        \
          << e_.what();                                                    \
    }                                                                      \
  } while (false)

namespace polymap::testing {

// Unit square, CCW from the origin.
inline Polygon unit_square() {
  return validate_polygon(
      Polygon{{{0.0, 0.0}, {1.0, 0.0}, {1.0, 1.0}, {0.0, 1.0}}, {}});
}

// Square [0,2]^2, CCW from the origin.
inline Polygon square2() {
  return validate_polygon(
      Polygon{{{0.0, 0.0}, {2.0, 0.0}, {2.0, 2.0}, {0.0, 2.0}}, {}});
}

// Unit right triangle.
inline Polygon unit_triangle() {
  return validate_polygon(Polygon{{{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {}});
}

// L-shape: a 2x2 square missing its upper-right 1x1 quadrant.  One reflex
// vertex at (1,1).
inline Polygon l_shape() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {2.0, 0.0},
                                   {2.0, 1.0},
                                   {1.0, 1.0},
                                   {1.0, 2.0},
                                   {0.0, 2.0}},
                                  {}});
}

// The L-shape scaled by 2.
inline Polygon l_shape_2x() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {4.0, 0.0},
                                   {4.0, 2.0},
                                   {2.0, 2.0},
                                   {2.0, 4.0},
                                   {0.0, 4.0}},
                                  {}});
}

// J-shape (a hook), perimeter 16, reflex at (2,1) and (1,1).
inline Polygon j_shape() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {3.0, 0.0},
                                   {3.0, 4.0},
                                   {2.0, 4.0},
                                   {2.0, 1.0},
                                   {1.0, 1.0},
                                   {1.0, 2.0},
                                   {0.0, 2.0}},
                                  {}});
}

// Irregular convex 7-gon with dyadic coordinates.
inline Polygon convex_7gon() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {0.5, -0.25},
                                   {1.0, 0.0},
                                   {1.25, 0.5},
                                   {1.0, 1.0},
                                   {0.375, 1.25},
                                   {-0.25, 0.5}},
                                  {}});
}

// H-shape, 12 vertices, 4 reflex.
inline Polygon h_shape() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {1.0, 0.0},
                                   {1.0, 1.0},
                                   {2.0, 1.0},
                                   {2.0, 0.0},
                                   {3.0, 0.0},
                                   {3.0, 3.0},
                                   {2.0, 3.0},
                                   {2.0, 2.0},
                                   {1.0, 2.0},
                                   {1.0, 3.0},
                                   {0.0, 3.0}},
                                  {}});
}

// Square [0,3]^2 with a centered square hole [1,2]^2.
inline Polygon square_with_hole() {
  Polygon p;
  p.outer = {{0.0, 0.0}, {3.0, 0.0}, {3.0, 3.0}, {0.0, 3.0}};
  p.holes = {{{1.0, 1.0}, {2.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}}};
  return validate_polygon(p);
}

// Targets on [0,2]^2 for the 6 L-shape vertices: every vertex keeps its
// position except the reflex corner (1,1), which opens out to (2,2).
inline std::vector<Vec2> l_to_square_targets() {
  return {{0.0, 0.0}, {2.0, 0.0}, {2.0, 1.0}, {2.0, 2.0}, {1.0, 2.0},
          {0.0, 2.0}};
}

// The square2 polygon subdivided so its boundary lists the six L-target
// points in order (inactive vertices at (2,1) and (1,2)).
inline Polygon square2_six_points() {
  return insert_inactive_vertices(square2(), {{1, 0.5}, {2, 0.5}});
}

// The J-shape straightened: an L with the tall arm on the right, covering the
// J-shape, with one reflex vertex at (2,2).  Target of the J-shape map.
inline Polygon l_shape_tall() {
  return validate_polygon(Polygon{{{0.0, 0.0},
                                   {3.0, 0.0},
                                   {3.0, 4.0},
                                   {2.0, 4.0},
                                   {2.0, 2.0},
                                   {0.0, 2.0}},
                                  {}});
}

// The tall L subdivided with inactive vertices at (1.25,2) and (0.625,2) so
// its boundary lists eight points matching the J-shape's eight vertices.
// Five J vertices map to themselves; the notch chain (2,1)->(1,1)->(1,2)
// is pushed out onto the top edge y=2, with the J reflex corner (2,1)
// pairing to the L reflex corner (2,2).
inline Polygon l_shape_tall_eight_points() {
  return insert_inactive_vertices(l_shape_tall(), {{4, 0.375}, {4, 0.6875}});
}

// Checkerboard test raster: `tile` pixels per cell, light/dark gray cells,
// opaque alpha, unit-square placement unless repositioned by the caller.
inline RasterImage make_checkerboard(int width, int height, int tile) {
  RasterImage img;
  img.width = width;
  img.height = height;
  img.rgba.resize(static_cast<size_t>(width) * height * 4);
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      bool dark = ((r / tile) + (c / tile)) % 2 == 0;
      std::uint8_t* px = img.pixel(c, r);
      px[0] = dark ? 40 : 220;
      px[1] = dark ? 44 : 216;
      px[2] = dark ? 52 : 208;
      px[3] = 255;
    }
  }
  return img;
}

}  // namespace polymap::testing

#endif  // POLYMAP_TESTS_SUPPORT_HPP_
