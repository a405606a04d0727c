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

#ifndef POLYMAP_POLYMAP_HPP_
#define POLYMAP_POLYMAP_HPP_

// Umbrella header: harmonic generalized barycentric coordinates, the
// polygon-to-polygon maps they induce, and everything around them.

#include "polymap/errors.hpp"      // IWYU pragma: export
#include "polymap/geometry.hpp"    // IWYU pragma: export
#include "polymap/trimesh.hpp"     // IWYU pragma: export
#include "polymap/triangulate.hpp" // IWYU pragma: export
#include "polymap/solver.hpp"      // IWYU pragma: export
#include "polymap/gbc.hpp"         // IWYU pragma: export
#include "polymap/mapping.hpp"     // IWYU pragma: export
#include "polymap/verifier.hpp"    // IWYU pragma: export
#include "polymap/warp.hpp"        // IWYU pragma: export
#include "polymap/plot.hpp"        // IWYU pragma: export
#include "polymap/io.hpp"          // IWYU pragma: export

#endif  // POLYMAP_POLYMAP_HPP_
