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

#ifndef POLYMAP_GBC_HPP_
#define POLYMAP_GBC_HPP_

// Harmonic generalized barycentric coordinates.  One basis function per
// polygon vertex: harmonic inside the domain, one at its own vertex, falling
// linearly to zero along the two incident edges, zero on the rest of the
// boundary.  With holes, every vertex of every loop contributes a function
// and the same boundary rules apply per loop.  The discrete functions are
// piecewise-linear on a conforming triangulation; because interior edges are
// Delaunay, the discrete maximum principle holds and the axioms (partition of
// unity, linear precision, nonnegativity, Lagrange property) carry over to
// the nodal values up to solver accuracy.  The builder verifies all four and
// refuses to return a basis that violates them.

#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/geometry.hpp"
#include "polymap/solver.hpp"
#include "polymap/triangulate.hpp"
#include "polymap/trimesh.hpp"

namespace polymap {

struct GbcOptions {
  double cell_size = 1.0 / 64;
  double rtol = 1e-12;        // GBC solves are tightened beyond the public
                              // solver default; vertex evaluations inherit
                              // solver error almost directly.
  int max_iterations = 0;     // 0: derive from system size
  double partition_tol = 1e-8;
  double linear_precision_tol = 1e-6;  // relative to polygon diameter
  double negativity_tol = -1e-8;
};

struct GbcBasis {
  Polygon polygon;
  std::shared_ptr<const TriMesh> mesh;
  // functions[k][node]: nodal values of the k-th coordinate function.  Basis
  // order: outer-loop vertices first, then each hole loop in order.
  std::vector<std::vector<double>> functions;
  std::vector<std::pair<int, int>> vertex_of;  // basis k -> (loop, vertex)
  std::vector<int> vertex_node;                // basis k -> mesh node

  size_t size() const { return functions.size(); }
  bool with_holes() const { return !polygon.holes.empty(); }
};

namespace detail {

// Boundary trace of basis function (loop, vertex) at a boundary node tagged
// (node_loop, edge, t): the hat that is 1 at the vertex and linear along the
// two incident edges.
inline double hat_trace(int loop, int vertex, int loop_size,
                        const BoundaryTag& tag) {
  if (tag.loop != loop) return 0.0;
  if (tag.edge == vertex) return 1.0 - tag.t;
  if ((tag.edge + 1) % loop_size == vertex) return tag.t;
  return 0.0;
}

inline void verify_basis(const GbcBasis& basis, const GbcOptions& opt) {
  const TriMesh& mesh = *basis.mesh;
  size_t nb = basis.size();
  double diam = polygon_diameter(basis.polygon);
  for (size_t node = 0; node < mesh.nodes.size(); ++node) {
    double sum = 0.0;
    Vec2 recon{0.0, 0.0};
    for (size_t k = 0; k < nb; ++k) {
      double v = basis.functions[k][node];
      if (v < opt.negativity_tol) {
        raise(ErrorCode::basis_invariant_violation,
              "coordinate " + std::to_string(k) + " is " + std::to_string(v) +
                  " at node " + std::to_string(node));
      }
      sum += v;
      const auto& vert =
          basis.polygon.loop(basis.vertex_of[k].first)[basis.vertex_of[k].second];
      recon += v * vert;
    }
    if (std::abs(sum - 1.0) > opt.partition_tol) {
      raise(ErrorCode::basis_invariant_violation,
            "partition of unity off by " + std::to_string(sum - 1.0) +
                " at node " + std::to_string(node));
    }
    if (norm(recon - mesh.nodes[node]) > opt.linear_precision_tol * diam) {
      raise(ErrorCode::basis_invariant_violation,
            "linear precision off by " +
                std::to_string(norm(recon - mesh.nodes[node])) + " at node " +
                std::to_string(node));
    }
  }
}

inline GbcBasis compute_basis(const Polygon& polygon, const GbcOptions& opt) {
  MeshOptions mesh_opt;
  mesh_opt.cell_size = opt.cell_size;
  auto mesh = std::make_shared<const TriMesh>(triangulate(polygon, mesh_opt));
  StiffnessSystem sys = assemble_stiffness(mesh);

  GbcBasis basis;
  basis.polygon = polygon;
  basis.mesh = mesh;
  DirichletOptions solve_opt;
  solve_opt.rtol = opt.rtol;
  solve_opt.max_iterations = opt.max_iterations;
  for (size_t l = 0; l < polygon.loop_count(); ++l) {
    int loop_size = static_cast<int>(polygon.loop(l).size());
    for (int v = 0; v < loop_size; ++v) {
      std::map<int, double> bc;
      for (int node : sys.dirichlet_nodes) {
        bc[node] = hat_trace(static_cast<int>(l), v, loop_size,
                             mesh->tags[node]);
      }
      NodalField f = solve_dirichlet(sys, bc, solve_opt);
      basis.functions.push_back(std::move(f.values));
      basis.vertex_of.push_back({static_cast<int>(l), v});
      basis.vertex_node.push_back(mesh->vertex_nodes[l][v]);
    }
  }
  verify_basis(basis, opt);
  return basis;
}

}  // namespace detail

// Basis for a simple polygon without holes.
inline GbcBasis compute_gbc(const Polygon& polygon, const GbcOptions& opt = {}) {
  if (!polygon.holes.empty()) {
    raise(ErrorCode::parameter_out_of_range,
          "polygon has holes; use compute_gbc_with_holes");
  }
  return detail::compute_basis(polygon, opt);
}

inline GbcBasis compute_gbc(const Polygon& polygon, double cell_size) {
  GbcOptions opt;
  opt.cell_size = cell_size;
  return compute_gbc(polygon, opt);
}

// Basis for a polygon with one or more holes: every loop's vertices receive a
// coordinate function; each function vanishes on all loops but its own.
inline GbcBasis compute_gbc_with_holes(const Polygon& polygon,
                                       const GbcOptions& opt = {}) {
  if (polygon.holes.empty()) {
    raise(ErrorCode::parameter_out_of_range,
          "polygon has no holes; use compute_gbc");
  }
  return detail::compute_basis(polygon, opt);
}

inline GbcBasis compute_gbc_with_holes(const Polygon& polygon,
                                       double cell_size) {
  GbcOptions opt;
  opt.cell_size = cell_size;
  return compute_gbc_with_holes(polygon, opt);
}

// All coordinate functions at a point of the domain.
inline std::vector<double> evaluate_gbc(const GbcBasis& basis, Vec2 q) {
  auto loc = basis.mesh->locate(q);
  if (!loc) {
    raise(ErrorCode::outside_domain, "query point (" + std::to_string(q.x) +
                                         ", " + std::to_string(q.y) +
                                         ") is outside the polygon");
  }
  std::vector<double> out(basis.size());
  for (size_t k = 0; k < basis.size(); ++k) {
    out[k] = basis.mesh->interpolate(basis.functions[k], *loc);
  }
  return out;
}

}  // namespace polymap

#endif  // POLYMAP_GBC_HPP_
