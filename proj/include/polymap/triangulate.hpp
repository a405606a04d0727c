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

#ifndef POLYMAP_TRIANGULATE_HPP_
#define POLYMAP_TRIANGULATE_HPP_

// Conforming Delaunay meshing of polygonal domains.
//
// The pipeline is classical: subdivide the boundary loops into chains of
// sub-segments no longer than the cell size, insert the chain points into a
// Bowyer-Watson incremental Delaunay triangulation seeded with an enclosing
// super-triangle, recover any missing chain edges by midpoint splitting,
// classify triangles inside/outside by flood fill across non-constrained
// edges, and refine with circumcenter insertions until every interior
// triangle meets the minimum-angle and size bounds.  Circumcenters that would
// encroach a boundary sub-segment split the segment instead, which keeps the
// boundary chains conforming throughout.  Cavities never expand across
// constrained edges, so interior edges stay locally Delaunay.
//
// All work happens on a copy of the polygon rescaled to the unit bounding
// box; node coordinates are scaled back on output.  The construction is
// entirely deterministic: no randomness, and every queue is processed in
// insertion order.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/geometry.hpp"
#include "polymap/trimesh.hpp"

namespace polymap {

struct MeshOptions {
  double cell_size = 1.0 / 64;  // target edge length, relative to unit bbox
  double min_angle_deg = 25.0;
  double size_factor = 0.62;    // circumradius bound = size_factor * cell
  double reflex_factor = 4.0;   // extra refinement near reflex vertices
  size_t max_points = 2000000;
};

namespace detail {

inline uint64_t edge_key(int a, int b) {
  uint64_t lo = static_cast<uint64_t>(std::min(a, b));
  uint64_t hi = static_cast<uint64_t>(std::max(a, b));
  return (hi << 32) | lo;
}

// > 0 when p lies strictly inside the circumcircle of the ccw triangle abc.
inline double incircle(Vec2 a, Vec2 b, Vec2 c, Vec2 p) {
  double ax = a.x - p.x, ay = a.y - p.y;
  double bx = b.x - p.x, by = b.y - p.y;
  double cx = c.x - p.x, cy = c.y - p.y;
  double a2 = ax * ax + ay * ay;
  double b2 = bx * bx + by * by;
  double c2 = cx * cx + cy * cy;
  return ax * (by * c2 - b2 * cy) - ay * (bx * c2 - b2 * cx) +
         a2 * (bx * cy - by * cx);
}

inline Vec2 circumcenter(Vec2 a, Vec2 b, Vec2 c) {
  Vec2 ab = b - a, ac = c - a;
  double d = 2.0 * cross(ab, ac);
  double ab2 = norm2(ab), ac2 = norm2(ac);
  return a + Vec2{(ac.y * ab2 - ab.y * ac2) / d, (ab.x * ac2 - ac.x * ab2) / d};
}

class Mesher {
 public:
  Mesher(const Polygon& poly, const MeshOptions& opt) : opt_(opt) {
    box_ = bounding_box(poly);
    scale_ = box_.max_extent();
    scaled_.outer = rescale(poly.outer);
    for (const auto& h : poly.holes) scaled_.holes.push_back(rescale(h));
    reflex_ = reflex_vertices(scaled_);
  }

  TriMesh run() {
    init_super_triangle();
    insert_boundary_chains();
    recover_segments();
    classify();
    enforce_boundary_conformity();
    refine();
    return finalize();
  }

 private:
  struct Tri {
    std::array<int, 3> v{-1, -1, -1};
    std::array<int, 3> adj{-1, -1, -1};  // adj[e] shares edge opposite v[e]
    bool alive = true;
    bool inside = false;
  };

  struct CavityEdge {
    int a = -1, b = -1;
    int outer = -1;
    bool inside = false;
  };

  std::vector<Vec2> rescale(const std::vector<Vec2>& loop) const {
    std::vector<Vec2> out(loop.size());
    for (size_t i = 0; i < loop.size(); ++i)
      out[i] = (loop[i] - box_.min) / scale_;
    return out;
  }

  int add_point(Vec2 p, BoundaryTag tag) {
    if (pts_.size() >= opt_.max_points) {
      raise(ErrorCode::meshing_failure, "point budget exhausted");
    }
    pts_.push_back(p);
    tags_.push_back(tag);
    v2t_.push_back(-1);
    return static_cast<int>(pts_.size()) - 1;
  }

  int add_tri(int a, int b, int c, bool inside) {
    tris_.push_back(Tri{{a, b, c}, {-1, -1, -1}, true, inside});
    int id = static_cast<int>(tris_.size()) - 1;
    v2t_[a] = v2t_[b] = v2t_[c] = id;
    return id;
  }

  bool constrained(int a, int b) const {
    return constraints_.count(edge_key(a, b)) > 0;
  }

  void init_super_triangle() {
    add_point({-40.0, -40.0}, {});
    add_point({41.0, -40.0}, {});
    add_point({0.5, 60.0}, {});
    add_tri(0, 1, 2, false);
    last_tri_ = 0;
  }

  // --- boundary subdivision ---------------------------------------------

  double dist_to_reflex(Vec2 a, Vec2 b) const {
    double d = std::numeric_limits<double>::infinity();
    for (Vec2 r : reflex_) d = std::min(d, dist_point_segment(r, a, b));
    return d;
  }

  // Splits edge parameters until every sub-segment respects the cell size,
  // with sub-segments near a reflex vertex held to cell/reflex_factor.
  std::vector<double> subdivide_edge(Vec2 a, Vec2 b) const {
    std::vector<double> params{0.0, 1.0};
    double len = norm(b - a);
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<double> next;
      next.push_back(params[0]);
      for (size_t i = 0; i + 1 < params.size(); ++i) {
        double t0 = params[i], t1 = params[i + 1];
        Vec2 p0 = lerp(a, b, t0), p1 = lerp(a, b, t1);
        double seg = len * (t1 - t0);
        double limit = opt_.cell_size;
        if (dist_to_reflex(p0, p1) < opt_.cell_size) {
          limit = opt_.cell_size / opt_.reflex_factor;
        }
        if (seg > limit * (1.0 + 1e-9)) {
          next.push_back(0.5 * (t0 + t1));
          changed = true;
        }
        next.push_back(t1);
      }
      params = std::move(next);
    }
    params.pop_back();  // drop t = 1; the next edge owns that point
    return params;
  }

  void insert_boundary_chains() {
    for (size_t l = 0; l < scaled_.loop_count(); ++l) {
      const auto& loop = scaled_.loop(l);
      int n = static_cast<int>(loop.size());
      std::vector<int> chain;
      for (int e = 0; e < n; ++e) {
        Vec2 a = loop[e], b = loop[(e + 1) % n];
        for (double t : subdivide_edge(a, b)) {
          BoundaryTag tag{static_cast<int>(l), e, t};
          int id = add_point(t == 0.0 ? a : lerp(a, b, t), tag);
          insert_into_triangulation(id, {});
          chain.push_back(id);
        }
      }
      for (size_t i = 0; i < chain.size(); ++i) {
        required_.push_back({chain[i], chain[(i + 1) % chain.size()]});
      }
    }
  }

  // --- point insertion ----------------------------------------------------

  int locate(Vec2 p, int hint) const {
    int cur = hint;
    if (cur < 0 || cur >= static_cast<int>(tris_.size()) || !tris_[cur].alive) {
      cur = -1;
      for (int t = static_cast<int>(tris_.size()) - 1; t >= 0; --t) {
        if (tris_[t].alive) {
          cur = t;
          break;
        }
      }
    }
    for (size_t step = 0; step <= tris_.size(); ++step) {
      const Tri& t = tris_[cur];
      int worst_edge = -1;
      double worst = 0.0;
      for (int e = 0; e < 3; ++e) {
        Vec2 a = pts_[t.v[(e + 1) % 3]];
        Vec2 b = pts_[t.v[(e + 2) % 3]];
        double s = cross(b - a, p - a);
        if (s < worst) {
          worst = s;
          worst_edge = e;
        }
      }
      if (worst_edge < 0) return cur;
      int next = t.adj[worst_edge];
      if (next < 0) {
        raise(ErrorCode::meshing_failure, "point walk left the triangulation");
      }
      cur = next;
    }
    // Fallback for walk cycles on degenerate configurations: near-collinear
    // chain points sit within an ulp of existing edges, so exact containment
    // can reject every triangle.  Take the least-violating triangle instead,
    // measured by worst signed edge distance, within a small absolute slack.
    int best = -1;
    double best_worst = -std::numeric_limits<double>::infinity();
    for (size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive) continue;
      const Tri& tr = tris_[t];
      double worst = std::numeric_limits<double>::infinity();
      for (int e = 0; e < 3; ++e) {
        Vec2 a = pts_[tr.v[(e + 1) % 3]];
        Vec2 b = pts_[tr.v[(e + 2) % 3]];
        double len = norm(b - a);
        if (len == 0.0) {
          worst = -std::numeric_limits<double>::infinity();
          break;
        }
        worst = std::min(worst, cross(b - a, p - a) / len);
      }
      if (worst > best_worst) {
        best_worst = worst;
        best = static_cast<int>(t);
      }
    }
    if (best >= 0 && best_worst > -1e-9) return best;
    raise(ErrorCode::meshing_failure, "point location failed");
  }

  void collect_cavity(Vec2 p, const std::vector<int>& seeds,
                      std::vector<int>& cavity,
                      std::vector<CavityEdge>& boundary) {
    ++epoch_;
    mark_.resize(tris_.size(), 0);
    cavity.clear();
    boundary.clear();
    std::deque<int> work;
    for (int s : seeds) {
      if (mark_[s] != epoch_) {
        mark_[s] = epoch_;
        work.push_back(s);
      }
    }
    while (!work.empty()) {
      int t = work.front();
      work.pop_front();
      cavity.push_back(t);
      const Tri& tr = tris_[t];
      for (int e = 0; e < 3; ++e) {
        int n = tr.adj[e];
        int a = tr.v[(e + 1) % 3];
        int b = tr.v[(e + 2) % 3];
        if (n >= 0 && mark_[n] == epoch_) continue;
        bool open = n >= 0 && !constrained(a, b);
        if (open) {
          const Tri& nt = tris_[n];
          if (incircle(pts_[nt.v[0]], pts_[nt.v[1]], pts_[nt.v[2]], p) > 0) {
            mark_[n] = epoch_;
            work.push_back(n);
            continue;
          }
        }
        boundary.push_back({a, b, n, tr.inside});
      }
    }
  }

  // Inserts point pid.  Extra seeds force triangles into the cavity (used
  // when splitting a constrained edge the point lies on).  Returns the new
  // triangle ids.
  std::vector<int> insert_into_triangulation(int pid,
                                             std::vector<int> extra_seeds) {
    Vec2 p = pts_[pid];
    std::vector<int> seeds = std::move(extra_seeds);
    if (seeds.empty()) seeds.push_back(locate(p, last_tri_));
    std::vector<int> cavity;
    std::vector<CavityEdge> boundary;
    for (int attempt = 0;; ++attempt) {
      if (attempt > 64) {
        raise(ErrorCode::meshing_failure, "cavity failed to become star-shaped");
      }
      collect_cavity(p, seeds, cavity, boundary);
      // Every boundary edge must see p strictly on its left; expand across
      // edges where the new triangle would be degenerate or inverted.
      bool ok = true;
      for (const CavityEdge& be : boundary) {
        if (cross(pts_[be.b] - pts_[be.a], p - pts_[be.a]) <= 0.0) {
          if (be.outer < 0 || constrained(be.a, be.b)) {
            raise(ErrorCode::meshing_failure,
                  "degenerate cavity boundary at point " + std::to_string(pid));
          }
          seeds.push_back(be.outer);
          ok = false;
        }
      }
      if (ok) break;
    }

    for (int t : cavity) tris_[t].alive = false;
    std::vector<std::pair<int, int>> by_first;  // cavity vertex a -> new tri
    std::vector<int> created;
    by_first.reserve(boundary.size());
    created.reserve(boundary.size());
    for (const CavityEdge& be : boundary) {
      int id = add_tri(pid, be.a, be.b, be.inside);
      tris_[id].adj[0] = be.outer;
      if (be.outer >= 0) {
        Tri& out = tris_[be.outer];
        for (int e = 0; e < 3; ++e) {
          int oa = out.v[(e + 1) % 3], ob = out.v[(e + 2) % 3];
          if ((oa == be.b && ob == be.a) || (oa == be.a && ob == be.b)) {
            out.adj[e] = id;
            break;
          }
        }
      }
      by_first.push_back({be.a, id});
      created.push_back(id);
    }
    auto tri_of = [&](int a) {
      for (auto [va, id] : by_first) {
        if (va == a) return id;
      }
      raise(ErrorCode::meshing_failure, "cavity boundary is not a closed fan");
    };
    for (int id : created) {
      int b = tris_[id].v[2];
      int nb = tri_of(b);  // fan neighbor sharing edge (b, pid)
      tris_[id].adj[1] = nb;
      tris_[nb].adj[2] = id;
    }
    mark_.resize(tris_.size(), 0);
    last_tri_ = created.empty() ? last_tri_ : created.front();
    return created;
  }

  // --- edge queries --------------------------------------------------------

  int local_index(const Tri& t, int v) const {
    for (int i = 0; i < 3; ++i) {
      if (t.v[i] == v) return i;
    }
    return -1;
  }

  // Finds the triangle owning directed edge {a, b}; returns {tri, edge} or
  // {-1, -1}.  Walks the ring of triangles around a.
  std::pair<int, int> find_edge(int a, int b) const {
    int start = v2t_[a];
    if (start < 0 || !tris_[start].alive) return {-1, -1};
    for (int dir = 0; dir < 2; ++dir) {
      int cur = start;
      for (size_t step = 0; step <= tris_.size(); ++step) {
        const Tri& t = tris_[cur];
        int la = local_index(t, a);
        if (la < 0) break;
        int lb = local_index(t, b);
        if (lb >= 0) return {cur, 3 - la - lb};
        int next = t.adj[dir == 0 ? (la + 1) % 3 : (la + 2) % 3];
        if (next < 0 || next == start) break;
        cur = next;
      }
    }
    return {-1, -1};
  }

  BoundaryTag interpolate_tag(const BoundaryTag& ta, const BoundaryTag& tb) const {
    int n = static_cast<int>(scaled_.loop(ta.loop).size());
    int la = ta.loop;
    if (ta.edge == tb.edge) return {la, ta.edge, 0.5 * (ta.t + tb.t)};
    if (tb.edge == (ta.edge + 1) % n && tb.t == 0.0) {
      return {la, ta.edge, 0.5 * (ta.t + 1.0)};
    }
    if (ta.edge == (tb.edge + 1) % n && ta.t == 0.0) {
      return {la, tb.edge, 0.5 * (tb.t + 1.0)};
    }
    raise(ErrorCode::meshing_failure, "segment spans more than one edge");
  }

  // --- constraint recovery -------------------------------------------------

  void recover_segments() {
    std::deque<std::pair<int, int>> work(required_.begin(), required_.end());
    std::vector<std::pair<int, int>> done;
    for (int round = 0; round < 64; ++round) {
      while (!work.empty()) {
        auto [a, b] = work.front();
        work.pop_front();
        if (find_edge(a, b).first >= 0) {
          done.push_back({a, b});
          continue;
        }
        BoundaryTag tag = interpolate_tag(tags_[a], tags_[b]);
        int mid = add_point(lerp(pts_[a], pts_[b], 0.5), tag);
        insert_into_triangulation(mid, {});
        work.push_back({a, mid});
        work.push_back({mid, b});
      }
      // Later insertions can knock out earlier edges; verify the whole set.
      std::vector<std::pair<int, int>> still;
      for (auto [a, b] : done) {
        if (find_edge(a, b).first >= 0) {
          still.push_back({a, b});
        } else {
          work.push_back({a, b});
        }
      }
      done = std::move(still);
      if (work.empty()) {
        std::sort(done.begin(), done.end());
        for (auto [a, b] : done) add_constraint(a, b);
        return;
      }
    }
    raise(ErrorCode::meshing_failure, "boundary recovery did not converge");
  }

  void add_constraint(int a, int b) {
    constraints_.insert(edge_key(a, b));
    constraint_list_.push_back({a, b});
  }

  // --- inside/outside classification ----------------------------------------

  void classify() {
    ++epoch_;
    mark_.resize(tris_.size(), 0);
    std::deque<int> work;
    // Everything reachable from the super-triangle corners without crossing a
    // constrained edge is outside the domain.
    for (size_t t = 0; t < tris_.size(); ++t) {
      Tri& tr = tris_[t];
      if (!tr.alive) continue;
      tr.inside = false;
      if (local_index(tr, 0) >= 0 || local_index(tr, 1) >= 0 ||
          local_index(tr, 2) >= 0) {
        if (mark_[t] != epoch_) {
          mark_[t] = epoch_;
          work.push_back(static_cast<int>(t));
        }
      }
    }
    flood(work, false);
    // Remaining components: classify a representative centroid against the
    // polygon (this separates the true interior from hole interiors).
    for (size_t t = 0; t < tris_.size(); ++t) {
      if (!tris_[t].alive || mark_[t] == epoch_) continue;
      const Tri& tr = tris_[t];
      Vec2 c = (pts_[tr.v[0]] + pts_[tr.v[1]] + pts_[tr.v[2]]) / 3.0;
      bool inside = side_of_polygon(scaled_, c, kGeomTol) > 0;
      std::deque<int> comp{static_cast<int>(t)};
      mark_[t] = epoch_;
      flood(comp, inside);
    }
  }

  void flood(std::deque<int>& work, bool inside) {
    while (!work.empty()) {
      int t = work.front();
      work.pop_front();
      tris_[t].inside = inside;
      const Tri& tr = tris_[t];
      for (int e = 0; e < 3; ++e) {
        int n = tr.adj[e];
        if (n < 0 || mark_[n] == epoch_) continue;
        if (constrained(tr.v[(e + 1) % 3], tr.v[(e + 2) % 3])) continue;
        mark_[n] = epoch_;
        work.push_back(n);
      }
    }
  }

  // --- refinement ------------------------------------------------------------

  bool segment_encroached_by(int a, int b, Vec2 p) const {
    Vec2 m = (pts_[a] + pts_[b]) * 0.5;
    double r2 = 0.25 * norm2(pts_[b] - pts_[a]);
    return norm2(p - m) < r2 * (1.0 - 1e-12);
  }

  bool segment_encroached(int a, int b) const {
    auto [t, e] = find_edge(a, b);
    if (t < 0) return false;
    int apex = tris_[t].v[e];
    if (apex > 2 && segment_encroached_by(a, b, pts_[apex])) return true;
    int n = tris_[t].adj[e];
    if (n >= 0) {
      int la = local_index(tris_[n], a), lb = local_index(tris_[n], b);
      int apex2 = tris_[n].v[3 - la - lb];
      if (apex2 > 2 && segment_encroached_by(a, b, pts_[apex2])) return true;
    }
    return false;
  }

  // Splits constrained segment (a, b) at its midpoint; returns new triangles.
  std::vector<int> split_segment(int a, int b, std::deque<int>* queue) {
    constraints_.erase(edge_key(a, b));
    auto [t1, e1] = find_edge(a, b);
    if (t1 < 0) raise(ErrorCode::meshing_failure, "lost a constrained edge");
    int t2 = tris_[t1].adj[e1];
    BoundaryTag tag = interpolate_tag(tags_[a], tags_[b]);
    int mid = add_point(lerp(pts_[a], pts_[b], 0.5), tag);
    std::vector<int> seeds{t1};
    if (t2 >= 0) seeds.push_back(t2);
    std::vector<int> created = insert_into_triangulation(mid, std::move(seeds));
    add_constraint(a, mid);
    add_constraint(mid, b);
    if (queue) {
      for (int id : created) queue->push_back(id);
    }
    // Conformity: recursively split halves that remain encroached.
    for (int v : {a, b}) {
      if (segment_encroached(v, mid)) split_segment(v, mid, queue);
    }
    return created;
  }

  void enforce_boundary_conformity() {
    // The list grows as segments split; the index loop picks up new halves.
    for (size_t i = 0; i < constraint_list_.size(); ++i) {
      auto [a, b] = constraint_list_[i];
      if (!constraints_.count(edge_key(a, b))) continue;  // already split
      if (segment_encroached(a, b)) split_segment(a, b, nullptr);
    }
  }

  double size_limit(Vec2 c) const {
    double base = opt_.size_factor * opt_.cell_size;
    for (Vec2 r : reflex_) {
      if (norm2(c - r) < opt_.cell_size * opt_.cell_size) {
        return base / opt_.reflex_factor;
      }
    }
    return base;
  }

  bool is_bad(int t) const {
    const Tri& tr = tris_[t];
    if (!tr.alive || !tr.inside) return false;
    Vec2 a = pts_[tr.v[0]], b = pts_[tr.v[1]], c = pts_[tr.v[2]];
    double la = norm(b - c), lb = norm(c - a), lc = norm(a - b);
    double shortest = std::min({la, lb, lc});
    Vec2 cc = circumcenter(a, b, c);
    double rc = norm(cc - a);
    Vec2 centroid = (a + b + c) / 3.0;
    if (rc > size_limit(centroid)) return true;
    if (shortest < opt_.cell_size / 64.0) return false;  // give up; degenerate input
    // min angle via the law of sines: sin(angle at a) = la / (2 rc)
    double min_sin = shortest / (2.0 * rc);
    return min_sin < std::sin(opt_.min_angle_deg * 3.14159265358979323846 / 180.0);
  }

  struct WalkHit {
    int tri = -1;
    bool blocked = false;
    int a = -1, b = -1;
  };

  WalkHit walk_toward(int start, Vec2 target) const {
    int cur = start;
    for (size_t step = 0; step <= tris_.size(); ++step) {
      const Tri& t = tris_[cur];
      int worst_edge = -1;
      double worst = 0.0;
      for (int e = 0; e < 3; ++e) {
        Vec2 a = pts_[t.v[(e + 1) % 3]];
        Vec2 b = pts_[t.v[(e + 2) % 3]];
        double s = cross(b - a, target - a);
        if (s < worst) {
          worst = s;
          worst_edge = e;
        }
      }
      if (worst_edge < 0) return {cur, false, -1, -1};
      int a = t.v[(worst_edge + 1) % 3], b = t.v[(worst_edge + 2) % 3];
      if (constrained(a, b)) return {cur, true, a, b};
      int next = t.adj[worst_edge];
      if (next < 0) raise(ErrorCode::meshing_failure, "walk left the hull");
      cur = next;
    }
    raise(ErrorCode::meshing_failure, "walk toward circumcenter cycled");
  }

  void refine() {
    std::deque<int> queue;
    for (size_t t = 0; t < tris_.size(); ++t) {
      if (tris_[t].alive && tris_[t].inside) queue.push_back(static_cast<int>(t));
    }
    while (!queue.empty()) {
      int t = queue.front();
      queue.pop_front();
      if (t >= static_cast<int>(tris_.size()) || !is_bad(t)) continue;
      const Tri& tr = tris_[t];
      Vec2 cc = circumcenter(pts_[tr.v[0]], pts_[tr.v[1]], pts_[tr.v[2]]);
      WalkHit hit = walk_toward(t, cc);
      if (hit.blocked) {
        split_segment(hit.a, hit.b, &queue);
        if (tris_[t].alive) queue.push_back(t);
        continue;
      }
      // Reject circumcenters that encroach a boundary sub-segment; split the
      // offending segments instead.
      std::vector<std::pair<int, int>> encroached;
      for (auto [a, b] : constraint_list_) {
        if (constraints_.count(edge_key(a, b)) &&
            segment_encroached_by(a, b, cc)) {
          encroached.push_back({a, b});
        }
      }
      if (!encroached.empty()) {
        for (auto [a, b] : encroached) {
          if (constraints_.count(edge_key(a, b))) split_segment(a, b, &queue);
        }
        if (tris_[t].alive) queue.push_back(t);
        continue;
      }
      const Tri& ht = tris_[hit.tri];
      bool too_close = false;
      for (int v : ht.v) {
        if (norm2(pts_[v] - cc) < 1e-24) too_close = true;
      }
      if (too_close) continue;
      int pid = add_point(cc, {});
      for (int id : insert_into_triangulation(pid, {hit.tri})) {
        queue.push_back(id);
      }
    }
  }

  // --- output -----------------------------------------------------------------

  TriMesh finalize() {
    TriMesh mesh;
    mesh.scale = scale_;
    mesh.cell_size = opt_.cell_size;
    std::vector<int> node_of(pts_.size(), -1);
    for (const Tri& t : tris_) {
      if (!t.alive || !t.inside) continue;
      for (int v : t.v) {
        if (node_of[v] < 0) {
          node_of[v] = static_cast<int>(mesh.nodes.size());
          mesh.nodes.push_back(pts_[v] * scale_ + box_.min);
          mesh.tags.push_back(tags_[v]);
        }
      }
      std::array<int, 3> tri{node_of[t.v[0]], node_of[t.v[1]], node_of[t.v[2]]};
      mesh.triangles.push_back(tri);
    }
    if (mesh.triangles.empty()) {
      raise(ErrorCode::meshing_failure, "empty mesh");
    }

    double total = 0.0;
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      double a = mesh.triangle_area(static_cast<int>(t));
      if (a <= 0) raise(ErrorCode::degenerate_triangle, "non-positive triangle");
      total += a;
    }
    for (size_t t = 0; t < mesh.triangles.size(); ++t) {
      if (mesh.triangle_area(static_cast<int>(t)) < 1e-14 * total) {
        raise(ErrorCode::degenerate_triangle,
              "triangle " + std::to_string(t) + " is degenerate");
      }
    }

    mesh.vertex_nodes.resize(scaled_.loop_count());
    mesh.boundary_loops.resize(scaled_.loop_count());
    std::vector<std::vector<std::pair<std::pair<int, double>, int>>> chains(
        scaled_.loop_count());
    for (size_t n = 0; n < mesh.nodes.size(); ++n) {
      const BoundaryTag& tag = mesh.tags[n];
      if (!tag.on_boundary()) continue;
      chains[tag.loop].push_back({{tag.edge, tag.t}, static_cast<int>(n)});
    }
    for (size_t l = 0; l < chains.size(); ++l) {
      auto& chain = chains[l];
      std::sort(chain.begin(), chain.end());
      mesh.vertex_nodes[l].assign(scaled_.loop(l).size(), -1);
      for (auto& [et, node] : chain) {
        mesh.boundary_loops[l].push_back(node);
        if (et.second == 0.0) mesh.vertex_nodes[l][et.first] = node;
      }
      for (size_t k = 0; k < mesh.vertex_nodes[l].size(); ++k) {
        if (mesh.vertex_nodes[l][k] < 0) {
          raise(ErrorCode::meshing_failure,
                "polygon vertex " + std::to_string(k) + " missing from mesh");
        }
      }
    }
    mesh.build_index();
    return mesh;
  }

  MeshOptions opt_;
  BBox box_;
  double scale_ = 1.0;
  Polygon scaled_;
  std::vector<Vec2> reflex_;

  std::vector<Vec2> pts_;
  std::vector<BoundaryTag> tags_;
  std::vector<Tri> tris_;
  std::vector<int> v2t_;
  std::unordered_set<uint64_t> constraints_;
  std::vector<std::pair<int, int>> constraint_list_;  // append-only, may hold
                                                      // entries already split
  std::vector<std::pair<int, int>> required_;
  std::vector<int> mark_;
  int epoch_ = 0;
  int last_tri_ = -1;
};

}  // namespace detail

inline TriMesh triangulate(const Polygon& poly, const MeshOptions& opt) {
  if (!(opt.cell_size > 0) || opt.cell_size > 0.5) {
    raise(ErrorCode::parameter_out_of_range,
          "cell size must lie in (0, 0.5]");
  }
  return detail::Mesher(poly, opt).run();
}

inline TriMesh triangulate(const Polygon& poly, double cell_size) {
  MeshOptions opt;
  opt.cell_size = cell_size;
  return triangulate(poly, opt);
}

}  // namespace polymap

#endif  // POLYMAP_TRIANGULATE_HPP_
