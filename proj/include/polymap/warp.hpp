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

#ifndef POLYMAP_WARP_HPP_
#define POLYMAP_WARP_HPP_

// Raster image deformation through a harmonic (possibly composed) map.
// Warping is pull-back: every output pixel center inside the target polygon
// is inverted through the map and bilinearly sampled from the source image,
// which keeps the output hole-free and leans on the map's certified inverse.
// Forward splatting is deliberately not offered.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polymap/errors.hpp"
#include "polymap/gbc.hpp"
#include "polymap/geometry.hpp"
#include "polymap/mapping.hpp"
#include "polymap/verifier.hpp"

namespace polymap {

// An 8-bit RGBA raster with an affine placement into polygon coordinates:
// the image occupies the axis-aligned rectangle [min_corner, min_corner +
// (width, height) * pixel_size], with row 0 at the top (maximum y).
struct RasterImage {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> rgba;  // row-major from the top row, 4 per pixel
  Vec2 min_corner{0.0, 0.0};
  double pixel_size = 1.0;

  Vec2 pixel_center(int col, int row) const {
    return {min_corner.x + (col + 0.5) * pixel_size,
            min_corner.y + (height - row - 0.5) * pixel_size};
  }
  const std::uint8_t* pixel(int col, int row) const {
    return &rgba[(static_cast<size_t>(row) * width + col) * 4];
  }
  std::uint8_t* pixel(int col, int row) {
    return &rgba[(static_cast<size_t>(row) * width + col) * 4];
  }
};

inline void validate_raster(const RasterImage& img) {
  if (img.width < 1 || img.height < 1) {
    raise(ErrorCode::parameter_out_of_range, "raster must be at least 1x1");
  }
  if (!(img.pixel_size > 0.0) || !std::isfinite(img.pixel_size)) {
    raise(ErrorCode::parameter_out_of_range,
          "pixel size must be positive and finite");
  }
  if (img.rgba.size() !=
      static_cast<size_t>(img.width) * img.height * 4) {
    raise(ErrorCode::parameter_out_of_range,
          "pixel buffer size does not match width*height*4");
  }
}

// Bilinear sample at a polygon-coordinate point, clamping to the image edge.
inline std::array<double, 4> sample_bilinear(const RasterImage& img, Vec2 p) {
  double u = (p.x - img.min_corner.x) / img.pixel_size - 0.5;
  double v = (img.min_corner.y + img.height * img.pixel_size - p.y) /
                 img.pixel_size -
             0.5;
  u = std::clamp(u, 0.0, static_cast<double>(img.width - 1));
  v = std::clamp(v, 0.0, static_cast<double>(img.height - 1));
  int i0 = std::min(static_cast<int>(u), img.width - 2 >= 0 ? img.width - 2 : 0);
  int j0 = std::min(static_cast<int>(v),
                    img.height - 2 >= 0 ? img.height - 2 : 0);
  i0 = std::max(i0, 0);
  j0 = std::max(j0, 0);
  int i1 = std::min(i0 + 1, img.width - 1);
  int j1 = std::min(j0 + 1, img.height - 1);
  double fx = u - i0, fy = v - j0;
  const std::uint8_t* p00 = img.pixel(i0, j0);
  const std::uint8_t* p10 = img.pixel(i1, j0);
  const std::uint8_t* p01 = img.pixel(i0, j1);
  const std::uint8_t* p11 = img.pixel(i1, j1);
  std::array<double, 4> out{};
  for (int c = 0; c < 4; ++c) {
    double top = p00[c] * (1.0 - fx) + p10[c] * fx;
    double bot = p01[c] * (1.0 - fx) + p11[c] * fx;
    out[c] = top * (1.0 - fy) + bot * fy;
  }
  return out;
}

struct WarpJob {
  RasterImage source_image;
  Polygon source_polygon;
  Polygon target_polygon;
  // Optional convex intermediate: the warp then composes source->intermediate
  // with the inverse of target->intermediate.
  std::optional<Polygon> intermediate;
  // Vertex lists pair up in index order; apply rotations or inactive-vertex
  // insertions to the polygons before building the job.
  double cell_size = 1.0 / 64.0;
  std::array<std::uint8_t, 4> background{0, 0, 0, 0};
};

namespace detail {

// Refuses to warp through a map whose image triangles overlap: each target
// pixel would have several preimages and the result would depend on scan
// order.  The error text carries the overlap evidence.
inline void require_injective(const HarmonicMap& map, const char* label) {
  InjectivityReport r = check_injectivity(map);
  if (!r.overlaps.empty()) {
    raise(ErrorCode::ambiguous_preimage,
          std::string(label) + " map is not injective: " +
              std::to_string(r.overlaps.size()) +
              " image-triangle overlap(s), first pair (" +
              std::to_string(r.overlaps[0].first) + ", " +
              std::to_string(r.overlaps[0].second) + "), area ratio " +
              std::to_string(r.area_ratio));
  }
}

// Runs fn(row) for every row index in [0, rows), splitting rows across a
// small worker pool.  The first exception wins and is rethrown after join.
template <typename Fn>
void for_each_row(int rows, Fn fn) {
  unsigned hw = std::thread::hardware_concurrency();
  int workers = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
  if (workers <= 1 || rows < 64) {
    for (int r = 0; r < rows; ++r) fn(r);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&]() {
    for (;;) {
      int r = next.fetch_add(1);
      if (r >= rows) return;
      try {
        fn(r);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (int w = 0; w < workers; ++w) pool.emplace_back(work);
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace detail

// Pull-back warp.  The output covers the target polygon's bounding box at
// the source image's resolution; pixels outside the target polygon (and
// pixels whose pull-back leaves the map image) get the background color.
inline RasterImage warp_image(const WarpJob& job) {
  validate_raster(job.source_image);
  Polygon source = validate_polygon(job.source_polygon);
  Polygon target = validate_polygon(job.target_polygon);

  // The source image must cover the source polygon, or pull-backs would
  // extrapolate behind the clamped border.
  BBox sbox = bounding_box(source);
  const RasterImage& si = job.source_image;
  double slack = 0.5 * si.pixel_size + kGeomTol * sbox.max_extent();
  if (sbox.min.x < si.min_corner.x - slack ||
      sbox.min.y < si.min_corner.y - slack ||
      sbox.max.x > si.min_corner.x + si.width * si.pixel_size + slack ||
      sbox.max.y > si.min_corner.y + si.height * si.pixel_size + slack) {
    raise(ErrorCode::parameter_out_of_range,
          "source image placement does not cover the source polygon");
  }

  // Build the map(s) and refuse non-injective configurations up front.
  std::optional<HarmonicMap> direct;
  std::optional<ComposedMap> composed;
  if (job.intermediate) {
    Polygon mid = validate_polygon(*job.intermediate);
    auto basis_v = std::make_shared<const GbcBasis>(
        compute_gbc(source, job.cell_size));
    auto basis_w = std::make_shared<const GbcBasis>(
        compute_gbc(target, job.cell_size));
    HarmonicMap to_mid =
        build_map(basis_v, build_boundary_correspondence(source, mid));
    HarmonicMap from_mid =
        build_map(basis_w, build_boundary_correspondence(target, mid));
    detail::require_injective(to_mid, "source->intermediate");
    detail::require_injective(from_mid, "target->intermediate");
    composed = compose_maps(std::move(to_mid), std::move(from_mid));
  } else {
    auto basis = std::make_shared<const GbcBasis>(
        compute_gbc(source, job.cell_size));
    direct = build_map(basis, build_boundary_correspondence(source, target));
    detail::require_injective(*direct, "source->target");
  }

  BBox tbox = bounding_box(target);
  Vec2 ext = tbox.extent();
  double s = si.pixel_size;
  RasterImage out;
  out.pixel_size = s;
  out.min_corner = tbox.min;
  out.width = std::max(1, static_cast<int>(std::ceil(ext.x / s - 1e-9)));
  out.height = std::max(1, static_cast<int>(std::ceil(ext.y / s - 1e-9)));
  out.rgba.assign(static_cast<size_t>(out.width) * out.height * 4, 0);

  double inside_tol = kGeomTol * tbox.max_extent();
  detail::for_each_row(out.height, [&](int row) {
    for (int col = 0; col < out.width; ++col) {
      std::uint8_t* px = out.pixel(col, row);
      Vec2 p = out.pixel_center(col, row);
      std::optional<Vec2> pre;
      if (side_of_polygon(target, p, inside_tol) > 0) {
        if (direct) {
          auto inv = try_invert(*direct, p);
          if (inv) {
            if (inv->multiplicity > 1) {
              raise(ErrorCode::ambiguous_preimage,
                    "pixel pull-back hit an ambiguous preimage");
            }
            pre = inv->point;
          }
        } else {
          try {
            pre = eval_composed_inverse(*composed, p).point;
          } catch (const Error& e) {
            if (e.code() != ErrorCode::outside_image &&
                e.code() != ErrorCode::outside_domain) {
              throw;
            }
          }
        }
      }
      if (pre) {
        std::array<double, 4> c = sample_bilinear(si, *pre);
        for (int k = 0; k < 4; ++k) {
          px[k] = static_cast<std::uint8_t>(
              std::lround(std::clamp(c[k], 0.0, 255.0)));
        }
      } else {
        for (int k = 0; k < 4; ++k) px[k] = job.background[k];
      }
    }
  });
  return out;
}

}  // namespace polymap

#endif  // POLYMAP_WARP_HPP_
