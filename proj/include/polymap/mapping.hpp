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

#ifndef POLYMAP_MAPPING_HPP_
#define POLYMAP_MAPPING_HPP_

// Polygon-to-polygon maps built from harmonic coordinates: F(x) is the
// coordinate-weighted combination of target vertices, realized discretely as
// the piecewise-affine map that carries each mesh node to the weighted target
// combination.  Evaluation, differentiation, and inversion therefore reduce
// to per-triangle affine algebra.  Two maps sharing a convex intermediate
// polygon compose into a map between their sources.

#include <cmath>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/gbc.hpp"
#include "polymap/geometry.hpp"
#include "polymap/trimesh.hpp"

namespace polymap {

struct HarmonicMap {
  std::shared_ptr<const GbcBasis> basis;
  Polygon target;
  std::vector<Vec2> targets;  // one per basis function, basis order
  std::vector<Vec2> image;    // image of every source mesh node
  TriangleGrid image_grid;    // index over the image triangle soup
  double image_scale = 1.0;   // max extent of the image bounding box

  const TriMesh& mesh() const { return *basis->mesh; }
};

// Builds the map onto an explicit list of target vertices (one per basis
// function).  Boundary nodes are pinned exactly onto the target boundary
// polyline — on the boundary every coordinate but the two incident hats
// vanishes, so the weighted combination collapses to the edge interpolant and
// pinning just evaluates it without roundoff.  Interior nodes take the full
// coordinate-weighted combination.  The declared target polygon is what
// verification measures areas and coverage against; it need not equal the
// hull of the targets (that mismatch is exactly what the checks flag).
inline HarmonicMap build_map_from_targets(std::shared_ptr<const GbcBasis> basis,
                                          std::vector<Vec2> targets,
                                          Polygon declared_target) {
  if (targets.size() != basis->size()) {
    raise(ErrorCode::count_mismatch,
          "map needs " + std::to_string(basis->size()) + " targets, got " +
              std::to_string(targets.size()));
  }
  HarmonicMap map;
  map.basis = std::move(basis);
  map.target = std::move(declared_target);
  map.targets = std::move(targets);

  // Basis functions are ordered loop by loop; offsets[l] is loop l's first.
  const Polygon& bp = map.basis->polygon;
  std::vector<size_t> offsets(bp.loop_count() + 1, 0);
  for (size_t l = 0; l < bp.loop_count(); ++l) {
    offsets[l + 1] = offsets[l] + bp.loop(l).size();
  }

  const TriMesh& mesh = map.mesh();
  map.image.assign(mesh.nodes.size(), Vec2{});
  for (size_t n = 0; n < mesh.nodes.size(); ++n) {
    const BoundaryTag& tag = mesh.tags[n];
    if (tag.on_boundary()) {
      size_t loop_size = bp.loop(tag.loop).size();
      Vec2 wa = map.targets[offsets[tag.loop] + tag.edge];
      Vec2 wb = map.targets[offsets[tag.loop] + (tag.edge + 1) % loop_size];
      map.image[n] = lerp(wa, wb, tag.t);
    } else {
      Vec2 acc{0.0, 0.0};
      for (size_t k = 0; k < map.basis->size(); ++k) {
        acc += map.basis->functions[k][n] * map.targets[k];
      }
      map.image[n] = acc;
    }
  }
  map.image_grid.build(map.image, mesh.triangles);
  map.image_scale = map.image_grid.box().max_extent();
  return map;
}

// Builds the map induced by a boundary correspondence.  The correspondence
// source must be the basis polygon.  `declared_target` is what verification
// measures against; it defaults to the correspondence target but may name a
// coarser vertex list for the same region — e.g. a convex intermediate whose
// inactive subdivision vertices differ per composed leg.
inline HarmonicMap build_map(std::shared_ptr<const GbcBasis> basis,
                             const BoundaryCorrespondence& correspondence,
                             std::optional<Polygon> declared_target = {}) {
  const Polygon& src = correspondence.source;
  const Polygon& bp = basis->polygon;
  if (src.loop_count() != bp.loop_count()) {
    raise(ErrorCode::count_mismatch,
          "correspondence source does not match the basis polygon");
  }
  for (size_t l = 0; l < bp.loop_count(); ++l) {
    if (src.loop(l).size() != bp.loop(l).size()) {
      raise(ErrorCode::count_mismatch,
            "correspondence loop " + std::to_string(l) +
                " does not match the basis polygon");
    }
    for (size_t v = 0; v < bp.loop(l).size(); ++v) {
      if (norm(src.loop(l)[v] - bp.loop(l)[v]) >
          kGeomTol * polygon_diameter(bp)) {
        raise(ErrorCode::count_mismatch,
              "correspondence source vertex differs from the basis polygon");
      }
    }
  }
  std::vector<Vec2> targets;
  targets.reserve(basis->size());
  for (size_t k = 0; k < basis->size(); ++k) {
    auto [l, v] = basis->vertex_of[k];
    targets.push_back(correspondence.target.loop(l)[v]);
  }
  return build_map_from_targets(
      std::move(basis), std::move(targets),
      declared_target ? std::move(*declared_target) : correspondence.target);
}

inline Vec2 eval_map(const HarmonicMap& map, Vec2 q) {
  auto loc = map.mesh().locate(q);
  if (!loc) {
    raise(ErrorCode::outside_domain, "point (" + std::to_string(q.x) + ", " +
                                         std::to_string(q.y) +
                                         ") is outside the source polygon");
  }
  const auto& tri = map.mesh().triangles[loc->triangle];
  return loc->bary[0] * map.image[tri[0]] + loc->bary[1] * map.image[tri[1]] +
         loc->bary[2] * map.image[tri[2]];
}

// Jacobian of the affine map on one triangle: carries source edge vectors to
// image edge vectors.
inline Mat2 map_jacobian(const HarmonicMap& map, int triangle) {
  const auto& tri = map.mesh().triangles[triangle];
  Vec2 a = map.mesh().nodes[tri[0]];
  Vec2 e1 = map.mesh().nodes[tri[1]] - a;
  Vec2 e2 = map.mesh().nodes[tri[2]] - a;
  Vec2 f1 = map.image[tri[1]] - map.image[tri[0]];
  Vec2 f2 = map.image[tri[2]] - map.image[tri[0]];
  Mat2 src{e1.x, e1.y, e2.x, e2.y};
  Mat2 img{f1.x, f1.y, f2.x, f2.y};
  return img * src.inverse();
}

inline double jacobian_det(const HarmonicMap& map, int triangle) {
  const auto& tri = map.mesh().triangles[triangle];
  double src = cross(map.mesh().nodes[tri[1]] - map.mesh().nodes[tri[0]],
                     map.mesh().nodes[tri[2]] - map.mesh().nodes[tri[0]]);
  double img = cross(map.image[tri[1]] - map.image[tri[0]],
                     map.image[tri[2]] - map.image[tri[0]]);
  return img / src;
}

struct Preimage {
  Vec2 point;
  int triangle = -1;
  int multiplicity = 0;
};

// Finds a preimage of w by scanning image triangles that contain it.  The
// multiplicity counts triangles containing w strictly (all barycentric
// coordinates at least 1e-9); the returned preimage comes from the
// lowest-index triangle containing w within the same barycentric slack, so
// points on shared edges resolve deterministically.
inline std::optional<Preimage> try_invert(const HarmonicMap& map, Vec2 w) {
  constexpr double kBaryTol = 1e-9;
  const auto& tris = map.mesh().triangles;
  const BBox& box = map.image_grid.box();
  double pad = kBaryTol * map.image_scale;
  if (w.x < box.min.x - pad || w.x > box.max.x + pad || w.y < box.min.y - pad ||
      w.y > box.max.y + pad) {
    return std::nullopt;
  }
  int found = -1;
  std::array<double, 3> found_bary{};
  int multiplicity = 0;
  for (int t : map.image_grid.candidates(
           Vec2{std::clamp(w.x, box.min.x, box.max.x),
                std::clamp(w.y, box.min.y, box.max.y)})) {
    Vec2 a = map.image[tris[t][0]];
    Vec2 b = map.image[tris[t][1]];
    Vec2 c = map.image[tris[t][2]];
    double area2 = cross(b - a, c - a);
    if (area2 == 0.0) continue;
    // Normalizing by the signed area makes the containment test valid for
    // folded (negative) triangles as well.
    std::array<double, 3> bary{cross(c - b, w - b) / area2,
                               cross(a - c, w - c) / area2,
                               cross(b - a, w - a) / area2};
    double lo = std::min({bary[0], bary[1], bary[2]});
    if (lo >= kBaryTol) ++multiplicity;
    if (lo >= -kBaryTol && found < 0) {
      found = t;
      found_bary = bary;
    }
  }
  if (found < 0) return std::nullopt;
  const auto& tri = tris[found];
  Vec2 pre = found_bary[0] * map.mesh().nodes[tri[0]] +
             found_bary[1] * map.mesh().nodes[tri[1]] +
             found_bary[2] * map.mesh().nodes[tri[2]];
  return Preimage{pre, found, multiplicity};
}

inline Preimage invert_map(const HarmonicMap& map, Vec2 w) {
  auto pre = try_invert(map, w);
  if (!pre) {
    raise(ErrorCode::outside_image, "point (" + std::to_string(w.x) + ", " +
                                        std::to_string(w.y) +
                                        ") is outside the map image");
  }
  if (pre->multiplicity > 1) {
    raise(ErrorCode::ambiguous_preimage,
          "point (" + std::to_string(w.x) + ", " + std::to_string(w.y) +
              ") has " + std::to_string(pre->multiplicity) +
              " preimages; the map is not injective there");
  }
  return *pre;
}

struct ComposedPoint {
  Vec2 point;
  int multiplicity = 1;
};

// Composition through a shared convex intermediate: the first map carries its
// source onto the intermediate polygon, the second is inverted there.
struct ComposedMap {
  std::shared_ptr<const HarmonicMap> first;   // source0 -> intermediate
  std::shared_ptr<const HarmonicMap> second;  // source1 -> intermediate

  const Polygon& source() const { return first->basis->polygon; }
  const Polygon& destination() const { return second->basis->polygon; }
};

namespace detail {

inline bool loops_match(const std::vector<Vec2>& a, const std::vector<Vec2>& b,
                        double tol) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::abs(a[i].x - b[i].x) > tol || std::abs(a[i].y - b[i].y) > tol) {
      return false;
    }
  }
  return true;
}

inline bool polygons_match(const Polygon& a, const Polygon& b, double tol) {
  if (a.holes.size() != b.holes.size()) return false;
  if (!loops_match(a.outer, b.outer, tol)) return false;
  for (size_t h = 0; h < a.holes.size(); ++h) {
    if (!loops_match(a.holes[h], b.holes[h], tol)) return false;
  }
  return true;
}

}  // namespace detail

// Both maps must declare the same intermediate polygon.  Their pinned target
// lists may differ in length (each source polygon may cut the intermediate
// boundary at its own inactive vertices); what must agree is the polygon the
// lists trace out.
inline ComposedMap compose_maps(HarmonicMap first, HarmonicMap second) {
  if (!detail::polygons_match(first.target, second.target, 1e-12)) {
    raise(ErrorCode::intermediate_mismatch,
          "the maps declare different intermediate polygons");
  }
  ComposedMap out;
  out.first = std::make_shared<const HarmonicMap>(std::move(first));
  out.second = std::make_shared<const HarmonicMap>(std::move(second));
  return out;
}

inline ComposedPoint eval_composed(const ComposedMap& map, Vec2 q) {
  Vec2 inter = eval_map(*map.first, q);
  auto pre = try_invert(*map.second, inter);
  if (!pre) {
    raise(ErrorCode::outside_image,
          "intermediate point left the second map's image");
  }
  if (pre->multiplicity > 1) {
    raise(ErrorCode::ambiguous_preimage,
          "intermediate point has multiple preimages under the second map");
  }
  return {pre->point, pre->multiplicity};
}

// Inverse evaluation of the composition (destination back to source).
inline ComposedPoint eval_composed_inverse(const ComposedMap& map, Vec2 y) {
  Vec2 inter = eval_map(*map.second, y);
  auto pre = try_invert(*map.first, inter);
  if (!pre) {
    raise(ErrorCode::outside_image,
          "intermediate point left the first map's image");
  }
  if (pre->multiplicity > 1) {
    raise(ErrorCode::ambiguous_preimage,
          "intermediate point has multiple preimages under the first map");
  }
  return {pre->point, pre->multiplicity};
}

// A closed-form map with a closed-form Jacobian, for validating the numeric
// certification machinery against known ground truth.
struct AnalyticMap {
  Polygon domain;
  std::function<Vec2(Vec2)> value;
  std::function<Mat2(Vec2)> jacobian;
};

// Wraps the rectangle [0,1] x [0,4pi] twice around the origin:
//   u = exp(x/2) cos(y exp(-x)),  v = exp(x/2) sin(y exp(-x)).
// The Jacobian determinant is exactly 1/2 everywhere, yet the map is 2-to-1
// on a large part of its image (y and y + 2pi exp(x) collide), so it
// separates "locally injective" from "injective".
inline AnalyticMap analytic_wrap_map() {
  AnalyticMap m;
  m.domain = validate_polygon({{0.0, 0.0},
                               {1.0, 0.0},
                               {1.0, 4.0 * 3.14159265358979323846},
                               {0.0, 4.0 * 3.14159265358979323846}});
  m.value = [](Vec2 p) {
    double e = std::exp(0.5 * p.x);
    double g = p.y * std::exp(-p.x);
    return Vec2{e * std::cos(g), e * std::sin(g)};
  };
  m.jacobian = [](Vec2 p) {
    double e = std::exp(0.5 * p.x);
    double g = p.y * std::exp(-p.x);
    double cg = std::cos(g), sg = std::sin(g);
    double ux = e * (0.5 * cg + g * sg);
    double uy = -e * std::exp(-p.x) * sg;
    double vx = e * (0.5 * sg - g * cg);
    double vy = e * std::exp(-p.x) * cg;
    return Mat2{ux, vx, uy, vy};
  };
  return m;
}

inline Mat2 finite_difference_jacobian(const std::function<Vec2(Vec2)>& f,
                                       Vec2 p, double step = 1e-6) {
  Vec2 dx = (f({p.x + step, p.y}) - f({p.x - step, p.y})) / (2.0 * step);
  Vec2 dy = (f({p.x, p.y + step}) - f({p.x, p.y - step})) / (2.0 * step);
  return Mat2{dx.x, dx.y, dy.x, dy.y};
}

}  // namespace polymap

#endif  // POLYMAP_MAPPING_HPP_
