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

#ifndef POLYMAP_PLOT_HPP_
#define POLYMAP_PLOT_HPP_

// Vector plots: marching-triangles iso-lines of nodal fields, and images of
// parameter grid lines under a map, both emitted as SVG strings.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/geometry.hpp"
#include "polymap/mapping.hpp"
#include "polymap/solver.hpp"
#include "polymap/trimesh.hpp"

namespace polymap {

struct ContourLine {
  std::vector<Vec2> points;
  bool closed = false;  // true when the chain returns to its starting edge
};

namespace detail {

struct ContourSegment {
  uint64_t key[2];  // mesh-edge keys of the two crossing points
  Vec2 point[2];
};

inline uint64_t mesh_edge_key(int a, int b) {
  uint64_t lo = static_cast<uint64_t>(std::min(a, b));
  uint64_t hi = static_cast<uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

}  // namespace detail

// Iso-lines of a P1 nodal field at one level, chained into polylines.
// Crossing points on a shared mesh edge are computed from the same nodal
// values, so chaining by edge identity is exact.  A chain that fails to
// return to its start ends on the mesh boundary and is reported open; by the
// discrete maximum principle a harmonic field never produces a closed
// interior chain at a non-extremal level.
inline std::vector<ContourLine> contour_lines(const NodalField& field,
                                              double level) {
  const TriMesh& mesh = *field.mesh;
  const std::vector<double>& f = field.values;
  std::vector<detail::ContourSegment> segments;
  for (const auto& tri : mesh.triangles) {
    uint64_t keys[3];
    Vec2 pts[3];
    int crossings = 0;
    for (int e = 0; e < 3 && crossings < 3; ++e) {
      int a = tri[e], b = tri[(e + 1) % 3];
      bool above_a = f[a] >= level, above_b = f[b] >= level;
      if (above_a == above_b) continue;
      double t = (level - f[a]) / (f[b] - f[a]);
      keys[crossings] = detail::mesh_edge_key(a, b);
      pts[crossings] = lerp(mesh.nodes[a], mesh.nodes[b], t);
      ++crossings;
    }
    if (crossings == 2) {
      segments.push_back({{keys[0], keys[1]}, {pts[0], pts[1]}});
    }
  }

  // Chain segments through shared edge keys.  Interior mesh edges join at
  // most two segments, so each key maps to at most two segment ends.
  std::multimap<uint64_t, std::pair<int, int>> ends;  // key -> (segment, end)
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    ends.insert({segments[s].key[0], {s, 0}});
    ends.insert({segments[s].key[1], {s, 1}});
  }
  std::vector<char> used(segments.size(), 0);
  std::vector<ContourLine> lines;

  auto next_segment = [&](uint64_t key, int not_segment) {
    auto [lo, hi] = ends.equal_range(key);
    for (auto it = lo; it != hi; ++it) {
      if (it->second.first != not_segment && !used[it->second.first]) {
        return it->second;
      }
    }
    return std::pair<int, int>{-1, -1};
  };

  for (int start = 0; start < static_cast<int>(segments.size()); ++start) {
    if (used[start]) continue;
    // Walk backward from the start to find an open end (or detect a loop).
    // Stepping onto the previous segment enters it at the shared key, so the
    // walk continues from that segment's other end.
    int seg = start, in_end = 0;
    for (;;) {
      auto prev = next_segment(segments[seg].key[in_end], seg);
      if (prev.first < 0 || prev.first == start) break;
      seg = prev.first;
      in_end = 1 - prev.second;
    }
    ContourLine line;
    uint64_t start_key = segments[seg].key[in_end];
    line.points.push_back(segments[seg].point[in_end]);
    int cur = seg, entry = in_end;
    for (;;) {
      used[cur] = 1;
      int exit = 1 - entry;
      line.points.push_back(segments[cur].point[exit]);
      uint64_t exit_key = segments[cur].key[exit];
      if (exit_key == start_key) {
        line.closed = true;
        break;
      }
      auto nxt = next_segment(exit_key, cur);
      if (nxt.first < 0) break;
      cur = nxt.first;
      entry = nxt.second;
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

struct LevelSet {
  double level = 0.0;
  std::vector<ContourLine> lines;
};

// Evenly spaced interior levels between the field's extremes.  A constant
// field has no interior levels and yields nothing.
inline std::vector<LevelSet> contour_level_sets(const NodalField& field,
                                                int levels) {
  if (levels < 2) {
    raise(ErrorCode::parameter_out_of_range, "need at least 2 contour levels");
  }
  auto [lo_it, hi_it] =
      std::minmax_element(field.values.begin(), field.values.end());
  double lo = *lo_it, hi = *hi_it;
  std::vector<LevelSet> out;
  if (hi - lo <= 0.0) return out;
  for (int k = 1; k <= levels; ++k) {
    double c = lo + (hi - lo) * k / (levels + 1);
    out.push_back({c, contour_lines(field, c)});
  }
  return out;
}

// --- drawing assembly -------------------------------------------------------

struct Polyline {
  std::vector<Vec2> points;
  bool closed = false;
  std::string cls;  // "outline", "contour", or "grid"
};

struct VectorDrawing {
  BBox view;
  std::vector<Polyline> lines;

  void add(std::vector<Vec2> pts, bool closed, std::string cls) {
    if (pts.size() < 2) return;
    for (Vec2 p : pts) view.expand(p);
    lines.push_back({std::move(pts), closed, std::move(cls)});
  }
};

inline void add_polygon_outline(VectorDrawing& d, const Polygon& p) {
  d.add(p.outer, true, "outline");
  for (const auto& h : p.holes) d.add(h, true, "outline");
}

// Contour plot of one nodal field over its mesh domain.
inline VectorDrawing plot_contours(const NodalField& field, int levels,
                                   const Polygon& domain) {
  VectorDrawing d;
  add_polygon_outline(d, domain);
  for (const LevelSet& ls : contour_level_sets(field, levels)) {
    for (const ContourLine& line : ls.lines) {
      d.add(line.points, line.closed, "contour");
    }
  }
  return d;
}

namespace detail {

// Samples one straight parameter line through the source domain, mapping
// each in-domain sample; gaps (outside the domain) split the polyline.
template <typename EvalFn>
void add_mapped_line(VectorDrawing& d, Vec2 a, Vec2 b, int samples,
                     EvalFn&& eval) {
  std::vector<Vec2> run;
  for (int s = 0; s <= samples; ++s) {
    auto img = eval(lerp(a, b, static_cast<double>(s) / samples));
    if (img) {
      run.push_back(*img);
    } else if (run.size() >= 2) {
      d.add(std::move(run), false, "grid");
      run.clear();
    } else {
      run.clear();
    }
  }
  if (run.size() >= 2) d.add(std::move(run), false, "grid");
}

template <typename EvalFn>
VectorDrawing plot_grid_impl(const Polygon& source, const Polygon& destination,
                             int grid, EvalFn&& eval) {
  if (grid < 1) {
    raise(ErrorCode::parameter_out_of_range, "grid count must be positive");
  }
  VectorDrawing d;
  add_polygon_outline(d, destination);
  BBox box = bounding_box(source);
  Vec2 ext = box.extent();
  int samples = std::max(grid * 16, 256);
  for (int k = 0; k < grid; ++k) {
    double fx = box.min.x + (k + 0.5) / grid * ext.x;
    double fy = box.min.y + (k + 0.5) / grid * ext.y;
    detail::add_mapped_line(d, Vec2{fx, box.min.y}, Vec2{fx, box.max.y},
                            samples, eval);
    detail::add_mapped_line(d, Vec2{box.min.x, fy}, Vec2{box.max.x, fy},
                            samples, eval);
  }
  return d;
}

}  // namespace detail

// Images of a grid x grid family of parameter lines under the map.
inline VectorDrawing plot_grid(const HarmonicMap& map, int grid) {
  return detail::plot_grid_impl(
      map.basis->polygon, map.target, grid,
      [&](Vec2 p) -> std::optional<Vec2> {
        auto loc = map.mesh().locate(p);
        if (!loc) return std::nullopt;
        const auto& tri = map.mesh().triangles[loc->triangle];
        return loc->bary[0] * map.image[tri[0]] +
               loc->bary[1] * map.image[tri[1]] +
               loc->bary[2] * map.image[tri[2]];
      });
}

inline VectorDrawing plot_grid(const ComposedMap& map, int grid) {
  return detail::plot_grid_impl(
      map.source(), map.destination(), grid,
      [&](Vec2 p) -> std::optional<Vec2> {
        try {
          return eval_composed(map, p).point;
        } catch (const Error& e) {
          if (e.code() == ErrorCode::outside_domain ||
              e.code() == ErrorCode::outside_image) {
            return std::nullopt;
          }
          throw;
        }
      });
}

// --- SVG emission ------------------------------------------------------------

namespace detail {

inline std::string format_coord(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

// Serializes a drawing as a standalone SVG document.  Polygon coordinates
// are y-up while SVG is y-down, so points are reflected inside the view box.
inline std::string to_svg(const VectorDrawing& drawing, double size = 640.0) {
  BBox view = drawing.view;
  if (view.max.x < view.min.x) {  // empty drawing
    view.expand({0.0, 0.0});
    view.expand({1.0, 1.0});
  }
  double pad = 0.05 * view.max_extent();
  view.min = view.min - Vec2{pad, pad};
  view.max = view.max + Vec2{pad, pad};
  Vec2 ext = view.extent();
  double scale = size / std::max(ext.x, ext.y);
  double w = ext.x * scale, h = ext.y * scale;
  double stroke = std::max(ext.x, ext.y) / 480.0;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w
      << "\" height=\"" << h << "\" viewBox=\"" << detail::format_coord(view.min.x)
      << " " << detail::format_coord(view.min.y) << " "
      << detail::format_coord(ext.x) << " " << detail::format_coord(ext.y)
      << "\">\n";
  svg << "<style>polyline,polygon{fill:none;stroke-linejoin:round;"
         "stroke-linecap:round}"
      << ".outline{stroke:#1a1a1a;stroke-width:" << 2.0 * stroke << "}"
      << ".contour{stroke:#2166ac;stroke-width:" << stroke << "}"
      << ".grid{stroke:#b2182b;stroke-width:" << stroke << "}</style>\n";
  double flip = view.min.y + view.max.y;
  for (const Polyline& line : drawing.lines) {
    svg << (line.closed ? "<polygon" : "<polyline") << " class=\"" << line.cls
        << "\" points=\"";
    for (size_t i = 0; i < line.points.size(); ++i) {
      if (line.closed && i + 1 == line.points.size() &&
          line.points.size() > 1 && norm(line.points[i] - line.points[0]) == 0.0) {
        break;  // polygon elements close themselves
      }
      if (i) svg << ' ';
      svg << detail::format_coord(line.points[i].x) << ','
          << detail::format_coord(flip - line.points[i].y);
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace polymap

#endif  // POLYMAP_PLOT_HPP_
