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

#ifndef POLYMAP_TRIMESH_HPP_
#define POLYMAP_TRIMESH_HPP_

#include <array>
#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "polymap/geometry.hpp"

namespace polymap {

// Where a mesh node sits on the domain boundary.  loop < 0 marks an interior
// node.  Nodes at polygon vertex k of a loop carry (edge = k, t = 0); other
// boundary nodes carry the edge they subdivide and the fractional arclength
// along it.
struct BoundaryTag {
  int loop = -1;
  int edge = 0;
  double t = 0.0;

  bool on_boundary() const { return loop >= 0; }
  bool at_vertex() const { return loop >= 0 && t == 0.0; }
};

struct Location {
  int triangle = -1;
  std::array<double, 3> bary{};
};

// Uniform-grid spatial index over a triangle soup.  Cells store, in ascending
// index order, every triangle whose bounding box overlaps the cell, so a
// containment scan over a cell's list visits candidates lowest index first.
class TriangleGrid {
 public:
  TriangleGrid() = default;

  void build(const std::vector<Vec2>& points,
             const std::vector<std::array<int, 3>>& triangles) {
    box_ = BBox{};
    for (Vec2 p : points) box_.expand(p);
    int n = static_cast<int>(triangles.size());
    res_ = std::clamp(static_cast<int>(std::sqrt(static_cast<double>(n))) + 1,
                      1, 512);
    cells_.assign(static_cast<size_t>(res_) * res_, {});
    for (int t = 0; t < n; ++t) {
      BBox tb;
      for (int v : triangles[t]) tb.expand(points[v]);
      auto [i0, j0] = cell_of(tb.min);
      auto [i1, j1] = cell_of(tb.max);
      for (int j = j0; j <= j1; ++j)
        for (int i = i0; i <= i1; ++i)
          cells_[static_cast<size_t>(j) * res_ + i].push_back(t);
    }
  }

  const std::vector<int>& candidates(Vec2 q) const {
    auto [i, j] = cell_of(q);
    return cells_[static_cast<size_t>(j) * res_ + i];
  }

  const BBox& box() const { return box_; }

 private:
  std::pair<int, int> cell_of(Vec2 p) const {
    Vec2 e = box_.extent();
    double fx = e.x > 0 ? (p.x - box_.min.x) / e.x : 0.0;
    double fy = e.y > 0 ? (p.y - box_.min.y) / e.y : 0.0;
    int i = std::clamp(static_cast<int>(fx * res_), 0, res_ - 1);
    int j = std::clamp(static_cast<int>(fy * res_), 0, res_ - 1);
    return {i, j};
  }

  BBox box_;
  int res_ = 1;
  std::vector<std::vector<int>> cells_;
};

// Locates q in the soup: returns the lowest-index triangle containing q
// within an absolute edge-distance tolerance, with clamped barycentric
// coordinates.  Used both for meshes and for mapped image soups.
inline std::optional<Location> locate_in_soup(
    const std::vector<Vec2>& points,
    const std::vector<std::array<int, 3>>& triangles, const TriangleGrid& grid,
    Vec2 q, double tol) {
  if (q.x < grid.box().min.x - tol || q.x > grid.box().max.x + tol ||
      q.y < grid.box().min.y - tol || q.y > grid.box().max.y + tol) {
    return std::nullopt;
  }
  Vec2 qc{std::clamp(q.x, grid.box().min.x, grid.box().max.x),
          std::clamp(q.y, grid.box().min.y, grid.box().max.y)};
  for (int t : grid.candidates(qc)) {
    const auto& tri = triangles[t];
    Vec2 a = points[tri[0]], b = points[tri[1]], c = points[tri[2]];
    double area2 = cross(b - a, c - a);
    if (area2 <= 0) continue;
    // Signed distance of q to each directed edge; all nonnegative within tol
    // means containment.
    double s0 = cross(c - b, q - b);
    double s1 = cross(a - c, q - c);
    double s2 = cross(b - a, q - a);
    if (s0 < -tol * norm(c - b) || s1 < -tol * norm(a - c) ||
        s2 < -tol * norm(b - a)) {
      continue;
    }
    Location loc;
    loc.triangle = t;
    loc.bary = {std::max(0.0, s0 / area2), std::max(0.0, s1 / area2),
                std::max(0.0, s2 / area2)};
    double sum = loc.bary[0] + loc.bary[1] + loc.bary[2];
    for (double& v : loc.bary) v /= sum;
    return loc;
  }
  return std::nullopt;
}

// Conforming triangle mesh of a polygonal domain.  Triangles are
// counterclockwise; every polygon vertex is a node; boundary nodes know their
// loop/edge/parameter provenance.
struct TriMesh {
  std::vector<Vec2> nodes;
  std::vector<std::array<int, 3>> triangles;
  std::vector<BoundaryTag> tags;                // one per node
  std::vector<std::vector<int>> boundary_loops;  // cyclic node order per loop
  std::vector<std::vector<int>> vertex_nodes;    // polygon vertex -> node
  double scale = 1.0;      // max bounding-box extent of the meshed polygon
  double cell_size = 0.0;  // meshing cell size, relative to the unit bbox

  TriangleGrid grid;

  void build_index() { grid.build(nodes, triangles); }

  double triangle_area(int t) const {
    const auto& tri = triangles[t];
    return polymap::triangle_area(nodes[tri[0]], nodes[tri[1]], nodes[tri[2]]);
  }

  double total_area() const {
    double a = 0.0;
    for (size_t t = 0; t < triangles.size(); ++t)
      a += triangle_area(static_cast<int>(t));
    return a;
  }

  std::optional<Location> locate(Vec2 q) const {
    return locate_in_soup(nodes, triangles, grid, q, kGeomTol * scale);
  }

  // Linear interpolation of a nodal vector at a located point.
  double interpolate(const std::vector<double>& values, const Location& loc) const {
    const auto& tri = triangles[loc.triangle];
    return loc.bary[0] * values[tri[0]] + loc.bary[1] * values[tri[1]] +
           loc.bary[2] * values[tri[2]];
  }
};

// Recovers the boundary loops of a triangulation from its topology alone:
// a directed edge whose reverse belongs to no triangle lies on the boundary,
// and chaining those edges head-to-tail closes each loop.  With
// counterclockwise triangles the outer loop comes out counterclockwise and
// hole loops clockwise.  Meshes reloaded from dumps lack stored loops, so
// this is how their outlines are rebuilt.
inline std::vector<std::vector<int>> boundary_loops_from_topology(
    const TriMesh& mesh) {
  std::map<std::pair<int, int>, bool> seen;
  for (const auto& tri : mesh.triangles) {
    for (int k = 0; k < 3; ++k) {
      seen[{tri[k], tri[(k + 1) % 3]}] = true;
    }
  }
  std::map<int, int> succ;
  for (const auto& [edge, _] : seen) {
    if (!seen.count({edge.second, edge.first})) succ[edge.first] = edge.second;
  }
  std::vector<std::vector<int>> loops;
  while (!succ.empty()) {
    std::vector<int> loop;
    int start = succ.begin()->first;
    int at = start;
    do {
      auto it = succ.find(at);
      if (it == succ.end()) break;  // open chain: tolerate, emit what we have
      loop.push_back(at);
      at = it->second;
      succ.erase(it);
    } while (at != start);
    if (loop.size() >= 3) loops.push_back(std::move(loop));
  }
  return loops;
}

}  // namespace polymap

#endif  // POLYMAP_TRIMESH_HPP_
