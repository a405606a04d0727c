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

#ifndef POLYMAP_VERIFIER_HPP_
#define POLYMAP_VERIFIER_HPP_

// Numerical bijectivity certification for piecewise-affine polygon maps.
// The certificate bundles five independent checks:
//   - Jacobian determinant sampling at low-discrepancy interior points,
//   - boundary orientation (simple, counterclockwise, arclength-monotone),
//   - injectivity via image-triangle overlap detection,
//   - surjectivity via inverse evaluation on a target probe grid,
//   - directional extrema counts of f_alpha = cos(a) u + sin(a) v along the
//     boundary, whose (1,1) profile characterizes maps onto convex targets.
// A map passes ("certified") only when every check passes.  Failures limited
// to tiny determinants hugging the source boundary, or to extrema counts,
// downgrade to "suspect"; anything else is "failed".

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/geometry.hpp"
#include "polymap/mapping.hpp"
#include "polymap/triangulate.hpp"
#include "polymap/trimesh.hpp"

namespace polymap {

struct VerifyConfig {
  int sample_count = 25000;
  double det_threshold = 1e-5;
  int alpha_count = 16;
  int coverage_grid = 100;
  double coverage_eps_convex = 0.0;     // convex targets must cover exactly
  double coverage_eps_nonconvex = 1e-3;
};

struct DetSample {
  Vec2 point;
  double det = 0.0;
};

struct DetSummary {
  double min_det = std::numeric_limits<double>::infinity();
  std::vector<DetSample> below_threshold;
};

struct InjectivityReport {
  bool orientation_ok = false;
  double area_ratio = 0.0;
  std::vector<std::pair<int, int>> overlaps;
};

struct ExtremaProfile {
  double alpha = 0.0;
  int n_max = 0;
  int n_min = 0;
  double min_grad = 0.0;
};

enum class Verdict { certified, suspect, failed };

inline const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::certified: return "certified";
    case Verdict::suspect: return "suspect";
    case Verdict::failed: return "failed";
  }
  return "failed";
}

struct BijectivityReport {
  int sample_count = 0;
  double threshold = 0.0;
  double min_det = 0.0;
  std::vector<DetSample> below_threshold;
  bool orientation_ok = false;
  double coverage = 0.0;
  double area_ratio = 0.0;
  std::vector<std::pair<int, int>> overlaps;
  std::vector<ExtremaProfile> extrema;
  Verdict verdict = Verdict::failed;
};

// --- deterministic low-discrepancy sampling ---------------------------------

inline double radical_inverse(uint64_t base, uint64_t i) {
  double inv_base = 1.0 / static_cast<double>(base);
  double f = inv_base, value = 0.0;
  while (i > 0) {
    value += f * static_cast<double>(i % base);
    i /= base;
    f *= inv_base;
  }
  return value;
}

// Interior Halton samples (bases 2 and 3 over the bounding box, clipped to
// the polygon) in a fixed order: the same polygon and count always produce
// the same points.
inline std::vector<Vec2> interior_samples(const Polygon& domain, int count) {
  BBox box = bounding_box(domain);
  Vec2 ext = box.extent();
  double tol = kGeomTol * box.max_extent();
  std::vector<Vec2> out;
  out.reserve(count);
  for (uint64_t i = 1; static_cast<int>(out.size()) < count; ++i) {
    if (i > static_cast<uint64_t>(count) * 1000) {
      raise(ErrorCode::parameter_out_of_range,
            "domain interior too small to sample");
    }
    Vec2 p{box.min.x + radical_inverse(2, i) * ext.x,
           box.min.y + radical_inverse(3, i) * ext.y};
    if (side_of_polygon(domain, p, tol) > 0) out.push_back(p);
  }
  return out;
}

inline DetSummary sample_jacobian_determinants(const HarmonicMap& map, int n,
                                               double threshold) {
  DetSummary s;
  for (Vec2 p : interior_samples(map.basis->polygon, n)) {
    auto loc = map.mesh().locate(p);
    if (!loc) continue;  // grazing the boundary within tolerance
    double det = jacobian_det(map, loc->triangle);
    s.min_det = std::min(s.min_det, det);
    if (det < threshold) s.below_threshold.push_back({p, det});
  }
  return s;
}

inline DetSummary sample_jacobian_determinants(const AnalyticMap& map, int n,
                                               double threshold) {
  DetSummary s;
  for (Vec2 p : interior_samples(map.domain, n)) {
    double det = map.jacobian(p).det();
    s.min_det = std::min(s.min_det, det);
    if (det < threshold) s.below_threshold.push_back({p, det});
  }
  return s;
}

// --- boundary orientation ----------------------------------------------------

namespace detail {

inline bool loop_is_simple(const std::vector<Vec2>& loop, double tol) {
  size_t n = loop.size();
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      if ((j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_intersect(loop[i], loop[(i + 1) % n], loop[j],
                             loop[(j + 1) % n], tol)) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace detail

// True iff the image of the source outer loop is a simple, counterclockwise
// polyline that advances monotonically in the target boundary's arclength.
// Every boundary image point must lie on the declared target's outer
// boundary; its arclength position is found by projection.
inline bool check_boundary_orientation(const HarmonicMap& map) {
  const TriMesh& mesh = map.mesh();
  const auto& loop_nodes = mesh.boundary_loops[0];
  std::vector<Vec2> image;
  image.reserve(loop_nodes.size());
  for (int n : loop_nodes) image.push_back(map.image[n]);
  if (signed_area(image) <= 0) return false;
  if (!detail::loop_is_simple(image, kGeomTol * map.image_scale)) return false;

  const auto& target = map.target.outer;
  size_t tn = target.size();
  std::vector<double> prefix(tn + 1, 0.0);
  for (size_t e = 0; e < tn; ++e) {
    prefix[e + 1] = prefix[e] + norm(target[(e + 1) % tn] - target[e]);
  }
  double total = prefix[tn];
  double on_tol = 1e-7 * std::max(total, map.image_scale);
  double tie = kGeomTol * total;

  std::vector<double> arc(image.size());
  for (size_t k = 0; k < image.size(); ++k) {
    double best_d = std::numeric_limits<double>::infinity();
    double best_s = 0.0;
    for (size_t e = 0; e < tn; ++e) {
      Vec2 a = target[e], b = target[(e + 1) % tn];
      Vec2 ab = b - a;
      double len2 = dot(ab, ab);
      double t = len2 > 0 ? std::clamp(dot(image[k] - a, ab) / len2, 0.0, 1.0)
                          : 0.0;
      double d = norm(image[k] - (a + t * ab));
      double s = prefix[e] + t * (prefix[e + 1] - prefix[e]);
      // Ties (projections onto a shared vertex) resolve to the smaller
      // arclength so the wrap point stays unique.
      if (d < best_d - tie || (d < best_d + tie && s < best_s)) {
        best_d = std::min(d, best_d);
        best_s = s;
      }
    }
    if (best_d > on_tol) return false;  // boundary left the target boundary
    arc[k] = best_s >= total - tie ? 0.0 : best_s;
  }
  int descents = 0;
  for (size_t k = 0; k < arc.size(); ++k) {
    if (arc[(k + 1) % arc.size()] < arc[k] - tie) ++descents;
  }
  return descents <= 1;
}

// --- injectivity ---------------------------------------------------------------

namespace detail {

// Positive-area intersection test for two triangles via separating axes.  The
// inputs are shrunk slightly toward their centroids first so that triangles
// merely sharing an edge or vertex do not count as overlapping.
inline bool triangles_overlap(std::array<Vec2, 3> a, std::array<Vec2, 3> b) {
  constexpr double kShrink = 1e-7;
  Vec2 ca = (a[0] + a[1] + a[2]) / 3.0;
  Vec2 cb = (b[0] + b[1] + b[2]) / 3.0;
  for (auto& p : a) p = ca + (p - ca) * (1.0 - kShrink);
  for (auto& p : b) p = cb + (p - cb) * (1.0 - kShrink);
  auto separated_by = [](const std::array<Vec2, 3>& edges,
                         const std::array<Vec2, 3>& other) {
    for (int e = 0; e < 3; ++e) {
      Vec2 axis = perp(edges[(e + 1) % 3] - edges[e]);
      double min_a = std::numeric_limits<double>::infinity(), max_a = -min_a;
      double min_b = min_a, max_b = -min_a;
      for (int i = 0; i < 3; ++i) {
        double pa = dot(axis, edges[i]);
        double pb = dot(axis, other[i]);
        min_a = std::min(min_a, pa);
        max_a = std::max(max_a, pa);
        min_b = std::min(min_b, pb);
        max_b = std::max(max_b, pb);
      }
      if (max_a <= min_b || max_b <= min_a) return true;
    }
    return false;
  };
  return !separated_by(a, b) && !separated_by(b, a);
}

// All pairs of triangles in the soup with positive-area intersection,
// grid-accelerated, reported as (i, j) with i < j in ascending order.
inline std::vector<std::pair<int, int>> find_soup_overlaps(
    const std::vector<Vec2>& pts,
    const std::vector<std::array<int, 3>>& tris) {
  BBox box;
  for (Vec2 p : pts) box.expand(p);
  int n = static_cast<int>(tris.size());
  int res = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(n))) + 1,
                       1, 512);
  Vec2 ext = box.extent();
  auto cell_of = [&](Vec2 p) {
    double fx = ext.x > 0 ? (p.x - box.min.x) / ext.x : 0.0;
    double fy = ext.y > 0 ? (p.y - box.min.y) / ext.y : 0.0;
    return std::pair<int, int>{
        std::clamp(static_cast<int>(fx * res), 0, res - 1),
        std::clamp(static_cast<int>(fy * res), 0, res - 1)};
  };
  std::vector<std::vector<int>> cells(static_cast<size_t>(res) * res);
  for (int t = 0; t < n; ++t) {
    BBox tb;
    for (int v : tris[t]) tb.expand(pts[v]);
    auto [i0, j0] = cell_of(tb.min);
    auto [i1, j1] = cell_of(tb.max);
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i)
        cells[static_cast<size_t>(j) * res + i].push_back(t);
  }
  std::unordered_set<uint64_t> tested;
  std::vector<std::pair<int, int>> overlaps;
  for (const auto& cell : cells) {
    for (size_t x = 0; x < cell.size(); ++x) {
      for (size_t y = x + 1; y < cell.size(); ++y) {
        int i = cell[x], j = cell[y];
        uint64_t key = (static_cast<uint64_t>(i) << 32) |
                       static_cast<uint64_t>(j);
        if (!tested.insert(key).second) continue;
        std::array<Vec2, 3> ta{pts[tris[i][0]], pts[tris[i][1]],
                               pts[tris[i][2]]};
        std::array<Vec2, 3> tb{pts[tris[j][0]], pts[tris[j][1]],
                               pts[tris[j][2]]};
        if (std::abs(triangle_area(ta[0], ta[1], ta[2])) == 0.0 ||
            std::abs(triangle_area(tb[0], tb[1], tb[2])) == 0.0) {
          continue;
        }
        if (triangles_overlap(ta, tb)) overlaps.push_back({i, j});
      }
    }
  }
  std::sort(overlaps.begin(), overlaps.end());
  return overlaps;
}

}  // namespace detail

inline InjectivityReport check_injectivity(const HarmonicMap& map) {
  InjectivityReport r;
  const auto& tris = map.mesh().triangles;
  r.orientation_ok = true;
  double total = 0.0;
  for (size_t t = 0; t < tris.size(); ++t) {
    double a = triangle_area(map.image[tris[t][0]], map.image[tris[t][1]],
                             map.image[tris[t][2]]);
    if (a <= 0) r.orientation_ok = false;
    total += std::abs(a);
  }
  r.area_ratio = total / polygon_area(map.target);
  r.overlaps = detail::find_soup_overlaps(map.image, tris);
  return r;
}

// Overlap detection for a closed-form map: the domain is meshed, nodes are
// pushed through the map, and the image soup is tested pairwise.
inline std::vector<std::pair<int, int>> find_image_overlaps(
    const AnalyticMap& map, double cell_size) {
  TriMesh mesh = triangulate(map.domain, cell_size);
  std::vector<Vec2> image(mesh.nodes.size());
  for (size_t i = 0; i < mesh.nodes.size(); ++i) {
    image[i] = map.value(mesh.nodes[i]);
  }
  return detail::find_soup_overlaps(image, mesh.triangles);
}

// --- surjectivity -----------------------------------------------------------------

// Fraction of r x r probe points in the target interior (points within 1e-9
// of the target boundary are excluded) that invert successfully.
inline double check_surjectivity(const HarmonicMap& map, int grid_r) {
  if (grid_r < 8) {
    raise(ErrorCode::parameter_out_of_range, "probe grid must be at least 8");
  }
  BBox box = bounding_box(map.target);
  Vec2 ext = box.extent();
  double tol = kGeomTol * box.max_extent();
  int probed = 0, hit = 0;
  for (int j = 0; j < grid_r; ++j) {
    for (int i = 0; i < grid_r; ++i) {
      Vec2 p{box.min.x + (i + 0.5) / grid_r * ext.x,
             box.min.y + (j + 0.5) / grid_r * ext.y};
      if (side_of_polygon(map.target, p, tol) <= 0) continue;
      if (distance_to_boundary(map.target, p) <= 1e-9) continue;
      ++probed;
      if (try_invert(map, p)) ++hit;
    }
  }
  return probed == 0 ? 0.0 : static_cast<double>(hit) / probed;
}

// --- directional extrema ---------------------------------------------------------

namespace detail {

// Counts local maxima and minima runs of a cyclic sequence.  Values within
// tol of each other merge into one plateau run; a run is an extremum when
// both neighboring runs lie on the same side.
inline std::pair<int, int> count_cyclic_extrema(const std::vector<double>& v,
                                                double tol) {
  std::vector<double> runs;
  for (double x : v) {
    if (runs.empty() || std::abs(x - runs.back()) > tol) {
      runs.push_back(x);
    }
  }
  while (runs.size() > 1 && std::abs(runs.front() - runs.back()) <= tol) {
    runs.pop_back();
  }
  size_t m = runs.size();
  if (m < 2) return {0, 0};
  int n_max = 0, n_min = 0;
  for (size_t j = 0; j < m; ++j) {
    double prev = runs[(j + m - 1) % m];
    double next = runs[(j + 1) % m];
    if (runs[j] > prev && runs[j] > next) ++n_max;
    if (runs[j] < prev && runs[j] < next) ++n_min;
  }
  return {n_max, n_min};
}

inline std::pair<int, int> boundary_extrema(const std::vector<double>& values) {
  auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  double range = *hi - *lo;
  if (range == 0.0) return {0, 0};
  return count_cyclic_extrema(values, 1e-9 * range);
}

}  // namespace detail

inline std::vector<double> default_alphas(int count) {
  std::vector<double> alphas(count);
  for (int k = 0; k < count; ++k) {
    alphas[k] = k * 3.14159265358979323846 / count;
  }
  return alphas;
}

// Per-direction boundary extrema counts of f_alpha, plus the smallest
// gradient magnitude of f_alpha over all triangles (the empirical distance
// from a critical point).
inline std::vector<ExtremaProfile> directional_extrema_profile(
    const HarmonicMap& map, const std::vector<double>& alphas) {
  const TriMesh& mesh = map.mesh();
  const auto& loop_nodes = mesh.boundary_loops[0];
  std::vector<ExtremaProfile> out;
  out.reserve(alphas.size());
  for (double alpha : alphas) {
    Vec2 dir{std::cos(alpha), std::sin(alpha)};
    std::vector<double> values;
    values.reserve(loop_nodes.size());
    for (int n : loop_nodes) values.push_back(dot(dir, map.image[n]));
    auto [n_max, n_min] = detail::boundary_extrema(values);
    double min_grad = std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      Vec2 grad = map_jacobian(map, static_cast<int>(t)).transpose().apply(dir);
      min_grad = std::min(min_grad, norm(grad));
    }
    out.push_back({alpha, n_max, n_min, min_grad});
  }
  return out;
}

// The analytic counterpart traces the domain boundary at a fixed sampling
// density and evaluates gradients on an interior grid.
inline std::vector<ExtremaProfile> directional_extrema_profile(
    const AnalyticMap& map, const std::vector<double>& alphas,
    int boundary_samples = 4096, int grid = 64) {
  const auto& loop = map.domain.outer;
  size_t n = loop.size();
  double per = perimeter(loop);
  std::vector<Vec2> points;
  for (size_t e = 0; e < n; ++e) {
    Vec2 a = loop[e], b = loop[(e + 1) % n];
    int steps = std::max(
        2, static_cast<int>(std::ceil(norm(b - a) / per * boundary_samples)));
    for (int s = 0; s < steps; ++s) {
      points.push_back(lerp(a, b, static_cast<double>(s) / steps));
    }
  }
  std::vector<Vec2> images(points.size());
  for (size_t i = 0; i < points.size(); ++i) images[i] = map.value(points[i]);

  BBox box = bounding_box(map.domain);
  Vec2 ext = box.extent();
  double tol = kGeomTol * box.max_extent();
  std::vector<ExtremaProfile> out;
  for (double alpha : alphas) {
    Vec2 dir{std::cos(alpha), std::sin(alpha)};
    std::vector<double> values(images.size());
    for (size_t i = 0; i < images.size(); ++i) values[i] = dot(dir, images[i]);
    auto [n_max, n_min] = detail::boundary_extrema(values);
    double min_grad = std::numeric_limits<double>::infinity();
    for (int j = 0; j < grid; ++j) {
      for (int i = 0; i < grid; ++i) {
        Vec2 p{box.min.x + (i + 0.5) / grid * ext.x,
               box.min.y + (j + 0.5) / grid * ext.y};
        if (side_of_polygon(map.domain, p, tol) <= 0) continue;
        Vec2 grad = map.jacobian(p).transpose().apply(dir);
        min_grad = std::min(min_grad, norm(grad));
      }
    }
    out.push_back({alpha, n_max, n_min, min_grad});
  }
  return out;
}

// --- the certificate -----------------------------------------------------------

inline BijectivityReport certify(const HarmonicMap& map,
                                 const VerifyConfig& cfg = {}) {
  BijectivityReport r;
  r.sample_count = cfg.sample_count;
  r.threshold = cfg.det_threshold;

  DetSummary det =
      sample_jacobian_determinants(map, cfg.sample_count, cfg.det_threshold);
  r.min_det = det.min_det;
  r.below_threshold = std::move(det.below_threshold);

  InjectivityReport inj = check_injectivity(map);
  r.orientation_ok = inj.orientation_ok && check_boundary_orientation(map);
  r.area_ratio = inj.area_ratio;
  r.overlaps = std::move(inj.overlaps);

  r.coverage = check_surjectivity(map, cfg.coverage_grid);
  r.extrema = directional_extrema_profile(map, default_alphas(cfg.alpha_count));

  double eps_cov = is_convex(map.target) ? cfg.coverage_eps_convex
                                         : cfg.coverage_eps_nonconvex;
  bool core_ok =
      r.orientation_ok && r.overlaps.empty() && r.coverage >= 1.0 - eps_cov;
  bool det_ok = r.min_det > cfg.det_threshold;
  bool extrema_ok = true;
  for (const ExtremaProfile& e : r.extrema) {
    if (e.n_max != 1 || e.n_min != 1) extrema_ok = false;
  }
  // Sub-threshold determinants are tolerable when they hug the source
  // boundary (the known corner degeneracy); anywhere else they fail the map.
  double band = 2.0 * map.mesh().cell_size * map.mesh().scale;
  bool below_near_boundary = true;
  for (const DetSample& s : r.below_threshold) {
    if (distance_to_boundary(map.basis->polygon, s.point) > band) {
      below_near_boundary = false;
    }
  }

  if (core_ok && det_ok && extrema_ok) {
    r.verdict = Verdict::certified;
  } else if (core_ok && (det_ok || below_near_boundary)) {
    r.verdict = Verdict::suspect;
  } else {
    r.verdict = Verdict::failed;
  }
  return r;
}

}  // namespace polymap

#endif  // POLYMAP_VERIFIER_HPP_
