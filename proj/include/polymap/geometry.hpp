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

#ifndef POLYMAP_GEOMETRY_HPP_
#define POLYMAP_GEOMETRY_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"

namespace polymap {

// Geometric predicates use an absolute tolerance that assumes coordinates of
// order one.  Routines that accept arbitrary input rescale to the unit
// bounding box before applying it.
inline constexpr double kGeomTol = 1e-12;

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2() = default;
  Vec2(double x_, double y_) : x(x_), y(y_) {}

  Vec2 operator+(Vec2 b) const { return {x + b.x, y + b.y}; }
  Vec2 operator-(Vec2 b) const { return {x - b.x, y - b.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2 operator/(double s) const { return {x / s, y / s}; }
  Vec2& operator+=(Vec2 b) {
    x += b.x;
    y += b.y;
    return *this;
  }
  Vec2& operator-=(Vec2 b) {
    x -= b.x;
    y -= b.y;
    return *this;
  }
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return v * s; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm2(Vec2 a) { return dot(a, a); }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline Vec2 lerp(Vec2 a, Vec2 b, double t) { return a + (b - a) * t; }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }

// Column-major 2x2 matrix: columns are the images of the basis vectors.
struct Mat2 {
  double a = 1.0, b = 0.0;  // first column  (a, b)
  double c = 0.0, d = 1.0;  // second column (c, d)

  Vec2 apply(Vec2 v) const { return {a * v.x + c * v.y, b * v.x + d * v.y}; }
  double det() const { return a * d - b * c; }
  Mat2 transpose() const { return {a, c, b, d}; }
  Mat2 inverse() const {
    double dd = det();
    return {d / dd, -b / dd, -c / dd, a / dd};
  }
  Mat2 operator*(const Mat2& o) const {
    return {a * o.a + c * o.b, b * o.a + d * o.b,
            a * o.c + c * o.d, b * o.c + d * o.d};
  }
};

struct BBox {
  Vec2 min{std::numeric_limits<double>::infinity(),
           std::numeric_limits<double>::infinity()};
  Vec2 max{-std::numeric_limits<double>::infinity(),
           -std::numeric_limits<double>::infinity()};

  void expand(Vec2 p) {
    min.x = std::min(min.x, p.x);
    min.y = std::min(min.y, p.y);
    max.x = std::max(max.x, p.x);
    max.y = std::max(max.y, p.y);
  }
  Vec2 extent() const { return max - min; }
  Vec2 center() const { return (min + max) * 0.5; }
  double max_extent() const {
    Vec2 e = extent();
    return std::max(e.x, e.y);
  }
  bool contains(Vec2 p) const {
    return p.x >= min.x && p.x <= max.x && p.y >= min.y && p.y <= max.y;
  }
};

inline BBox bounding_box(const std::vector<Vec2>& pts) {
  BBox b;
  for (Vec2 p : pts) b.expand(p);
  return b;
}

inline double signed_area(const std::vector<Vec2>& loop) {
  double twice = 0.0;
  size_t n = loop.size();
  for (size_t i = 0; i < n; ++i) twice += cross(loop[i], loop[(i + 1) % n]);
  return 0.5 * twice;
}

inline double perimeter(const std::vector<Vec2>& loop) {
  double len = 0.0;
  size_t n = loop.size();
  for (size_t i = 0; i < n; ++i) len += norm(loop[(i + 1) % n] - loop[i]);
  return len;
}

inline double triangle_area(Vec2 a, Vec2 b, Vec2 c) {
  return 0.5 * cross(b - a, c - a);
}

inline double dist_point_segment(Vec2 p, Vec2 a, Vec2 b) {
  Vec2 ab = b - a;
  double l2 = norm2(ab);
  if (l2 == 0.0) return norm(p - a);
  double t = std::clamp(dot(p - a, ab) / l2, 0.0, 1.0);
  return norm(p - (a + ab * t));
}

// Proper or improper intersection of closed segments [a,b] and [c,d] within
// an absolute distance tolerance.  Endpoint coincidence counts.
inline bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
  double d1 = cross(b - a, c - a);
  double d2 = cross(b - a, d - a);
  double d3 = cross(d - c, a - c);
  double d4 = cross(d - c, b - c);
  if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
      ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
    return true;
  }
  return dist_point_segment(c, a, b) <= tol || dist_point_segment(d, a, b) <= tol ||
         dist_point_segment(a, c, d) <= tol || dist_point_segment(b, c, d) <= tol;
}

// A polygonal domain with an outer loop (counterclockwise) and optional hole
// loops (clockwise).  Construct through validate_polygon so the invariants
// hold; orientation is normalized there, not by the caller.
struct Polygon {
  std::vector<Vec2> outer;
  std::vector<std::vector<Vec2>> holes;

  size_t vertex_count() const {
    size_t n = outer.size();
    for (const auto& h : holes) n += h.size();
    return n;
  }
  size_t loop_count() const { return 1 + holes.size(); }
  const std::vector<Vec2>& loop(size_t i) const {
    return i == 0 ? outer : holes[i - 1];
  }
  std::vector<Vec2>& loop(size_t i) { return i == 0 ? outer : holes[i - 1]; }
};

inline double polygon_area(const Polygon& p) {
  double a = signed_area(p.outer);
  for (const auto& h : p.holes) a += signed_area(h);  // holes are CW: negative
  return a;
}

inline BBox bounding_box(const Polygon& p) { return bounding_box(p.outer); }

inline double polygon_diameter(const Polygon& p) {
  BBox b = bounding_box(p);
  return norm(b.extent());
}

// Winding-number point-in-polygon against a single loop; points within tol of
// an edge count as on the loop.  Returns +1 strictly inside (nonzero
// winding), 0 on boundary, -1 outside.
inline int side_of_loop(const std::vector<Vec2>& loop, Vec2 q, double tol) {
  size_t n = loop.size();
  int winding = 0;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = loop[i];
    Vec2 b = loop[(i + 1) % n];
    if (dist_point_segment(q, a, b) <= tol) return 0;
    if (a.y <= q.y) {
      if (b.y > q.y && cross(b - a, q - a) > 0) ++winding;
    } else {
      if (b.y <= q.y && cross(b - a, q - a) < 0) --winding;
    }
  }
  return winding != 0 ? 1 : -1;
}

// +1 inside the domain, 0 on the boundary (within tol), -1 outside.
inline int side_of_polygon(const Polygon& p, Vec2 q, double tol) {
  int s = side_of_loop(p.outer, q, tol);
  if (s <= 0) return s;
  for (const auto& h : p.holes) {
    int hs = side_of_loop(h, q, tol);
    if (hs == 0) return 0;
    if (hs > 0) return -1;  // inside a hole
  }
  return 1;
}

inline bool point_in_polygon(const Polygon& p, Vec2 q, double tol = kGeomTol) {
  return side_of_polygon(p, q, tol) >= 0;
}

inline double distance_to_boundary(const Polygon& p, Vec2 q) {
  double d = std::numeric_limits<double>::infinity();
  for (size_t l = 0; l < p.loop_count(); ++l) {
    const auto& loop = p.loop(l);
    size_t n = loop.size();
    for (size_t i = 0; i < n; ++i) {
      d = std::min(d, dist_point_segment(q, loop[i], loop[(i + 1) % n]));
    }
  }
  return d;
}

namespace detail {

inline void check_loop_simple(const std::vector<Vec2>& loop, double tol,
                              const std::string& label) {
  size_t n = loop.size();
  if (n < 3) raise(ErrorCode::zero_area, label + " has fewer than 3 vertices");
  for (size_t i = 0; i < n; ++i) {
    if (norm(loop[(i + 1) % n] - loop[i]) <= tol) {
      raise(ErrorCode::duplicate_vertex,
            label + " repeats vertex " + std::to_string(i));
    }
  }
  // Intersections before area: a bowtie can net out to zero area, and the
  // crossing is the better diagnostic.
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      // Skip edge pairs sharing an endpoint.
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j],
                             loop[(j + 1) % n], tol)) {
        raise(ErrorCode::self_intersection,
              label + " edges " + std::to_string(i) + " and " +
                  std::to_string(j) + " intersect");
      }
    }
  }
  if (std::abs(signed_area(loop)) <= tol) {
    raise(ErrorCode::zero_area, label + " encloses no area");
  }
}

inline bool loops_touch(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                        double tol) {
  size_t na = a.size(), nb = b.size();
  for (size_t i = 0; i < na; ++i) {
    for (size_t j = 0; j < nb; ++j) {
      if (segments_intersect(a[i], a[(i + 1) % na], b[j], b[(j + 1) % nb], tol))
        return true;
    }
  }
  return false;
}

}  // namespace detail

// Validates simplicity, nondegeneracy, and hole containment, then normalizes
// orientation (outer counterclockwise, holes clockwise).  Throws Error on any
// violation.  Predicates run on a copy rescaled to the unit bounding box.
inline Polygon validate_polygon(std::vector<Vec2> outer,
                                std::vector<std::vector<Vec2>> holes = {}) {
  BBox box = bounding_box(outer);
  for (const auto& h : holes)
    for (Vec2 p : h) box.expand(p);
  double s = box.max_extent();
  if (!(s > 0.0) || !std::isfinite(s)) {
    raise(ErrorCode::zero_area, "polygon has no extent");
  }
  auto scaled = [&](const std::vector<Vec2>& loop) {
    std::vector<Vec2> out(loop.size());
    for (size_t i = 0; i < loop.size(); ++i) out[i] = (loop[i] - box.min) / s;
    return out;
  };

  std::vector<Vec2> souter = scaled(outer);
  detail::check_loop_simple(souter, kGeomTol, "outer loop");
  if (signed_area(souter) < 0) {
    std::reverse(outer.begin(), outer.end());
    std::reverse(souter.begin(), souter.end());
  }

  std::vector<std::vector<Vec2>> sholes;
  sholes.reserve(holes.size());
  for (size_t k = 0; k < holes.size(); ++k) {
    std::string label = "hole " + std::to_string(k);
    std::vector<Vec2> sh = scaled(holes[k]);
    detail::check_loop_simple(sh, kGeomTol, label);
    if (signed_area(sh) > 0) {
      std::reverse(holes[k].begin(), holes[k].end());
      std::reverse(sh.begin(), sh.end());
    }
    if (detail::loops_touch(souter, sh, kGeomTol)) {
      raise(ErrorCode::hole_outside_outer, label + " touches the outer loop");
    }
    Polygon shell{souter, {}};
    for (Vec2 p : sh) {
      if (side_of_polygon(shell, p, kGeomTol) <= 0) {
        raise(ErrorCode::hole_outside_outer,
              label + " is not strictly inside the outer loop");
      }
    }
    for (size_t j = 0; j < sholes.size(); ++j) {
      if (detail::loops_touch(sholes[j], sh, kGeomTol)) {
        raise(ErrorCode::hole_outside_outer,
              label + " touches hole " + std::to_string(j));
      }
      // CW loop: winding test still classifies interior as nonzero.
      if (side_of_loop(sholes[j], sh[0], kGeomTol) > 0 ||
          side_of_loop(sh, sholes[j][0], kGeomTol) > 0) {
        raise(ErrorCode::hole_outside_outer,
              label + " overlaps hole " + std::to_string(j));
      }
    }
    sholes.push_back(std::move(sh));
  }
  return Polygon{std::move(outer), std::move(holes)};
}

inline Polygon validate_polygon(const Polygon& p) {
  return validate_polygon(p.outer, p.holes);
}

// True when every vertex of the outer loop turns the same way (no holes and
// no reflex corners).  Collinear vertices are allowed.
inline bool is_convex(const Polygon& p) {
  if (!p.holes.empty()) return false;
  const auto& v = p.outer;
  size_t n = v.size();
  double scale = bounding_box(p).max_extent();
  double tol = kGeomTol * scale * scale;
  for (size_t i = 0; i < n; ++i) {
    Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
    if (cross(b - a, c - b) < -tol) return false;
  }
  return true;
}

// Outer-loop vertices with an interior angle above pi, plus every hole
// vertex that is reflex with respect to the domain (for convex hole shapes
// that is all of them; the test below handles either case).
inline std::vector<Vec2> reflex_vertices(const Polygon& p) {
  std::vector<Vec2> out;
  double scale = bounding_box(p).max_extent();
  double tol = kGeomTol * scale * scale;
  for (size_t l = 0; l < p.loop_count(); ++l) {
    const auto& v = p.loop(l);
    size_t n = v.size();
    for (size_t i = 0; i < n; ++i) {
      Vec2 a = v[(i + n - 1) % n], b = v[i], c = v[(i + 1) % n];
      // Loops are oriented with the domain on the left; a right turn is a
      // reflex corner of the domain.
      if (cross(b - a, c - b) < -tol) out.push_back(b);
    }
  }
  return out;
}

// Position for an inactive vertex: a point on edge `edge` of the outer loop
// (from vertex edge to edge+1) at fractional arclength t in (0,1).
struct EdgePoint {
  int edge = 0;
  double t = 0.0;
};

// Inserts extra collinear vertices on the outer loop.  The polygon's shape is
// unchanged; only the vertex list grows.  Parameters must be strictly inside
// their edge and distinct per edge.
inline Polygon insert_inactive_vertices(const Polygon& p,
                                        std::vector<EdgePoint> where) {
  int n = static_cast<int>(p.outer.size());
  for (const EdgePoint& ep : where) {
    if (ep.edge < 0 || ep.edge >= n) {
      raise(ErrorCode::parameter_out_of_range,
            "edge index " + std::to_string(ep.edge) + " out of range");
    }
    if (!(ep.t > 0.0 && ep.t < 1.0)) {
      raise(ErrorCode::parameter_out_of_range,
            "edge parameter " + std::to_string(ep.t) +
                " must lie strictly inside (0,1)");
    }
  }
  std::sort(where.begin(), where.end(), [](EdgePoint a, EdgePoint b) {
    return a.edge != b.edge ? a.edge < b.edge : a.t < b.t;
  });
  for (size_t i = 1; i < where.size(); ++i) {
    if (where[i].edge == where[i - 1].edge && where[i].t == where[i - 1].t) {
      raise(ErrorCode::parameter_out_of_range,
            "repeated parameter on edge " + std::to_string(where[i].edge));
    }
  }
  Polygon out;
  out.holes = p.holes;
  size_t k = 0;
  for (int e = 0; e < n; ++e) {
    out.outer.push_back(p.outer[e]);
    Vec2 a = p.outer[e];
    Vec2 b = p.outer[(e + 1) % n];
    while (k < where.size() && where[k].edge == e) {
      out.outer.push_back(lerp(a, b, where[k].t));
      ++k;
    }
  }
  return out;
}

// Pairs the boundaries of two polygons loop by loop and vertex by vertex:
// vertex i of loop l corresponds to vertex i of loop l, and each source edge
// maps onto its target edge affinely in arclength fraction.
struct BoundaryCorrespondence {
  Polygon source;
  Polygon target;

  // Image of the point at fraction t along edge `edge` of target loop `loop`.
  Vec2 target_point(size_t loop, size_t edge, double t) const {
    const auto& v = target.loop(loop);
    return lerp(v[edge], v[(edge + 1) % v.size()], t);
  }
};

inline BoundaryCorrespondence build_boundary_correspondence(Polygon source,
                                                            Polygon target) {
  if (source.loop_count() != target.loop_count()) {
    raise(ErrorCode::count_mismatch,
          "source has " + std::to_string(source.loop_count()) +
              " loops, target has " + std::to_string(target.loop_count()));
  }
  for (size_t l = 0; l < source.loop_count(); ++l) {
    if (source.loop(l).size() != target.loop(l).size()) {
      raise(ErrorCode::count_mismatch,
            "loop " + std::to_string(l) + ": source has " +
                std::to_string(source.loop(l).size()) + " vertices, target " +
                std::to_string(target.loop(l).size()));
    }
  }
  return BoundaryCorrespondence{std::move(source), std::move(target)};
}

}  // namespace polymap

#endif  // POLYMAP_GEOMETRY_HPP_
