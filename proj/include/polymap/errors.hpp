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

#ifndef POLYMAP_ERRORS_HPP_
#define POLYMAP_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace polymap {

enum class ErrorCode {
  self_intersection,
  duplicate_vertex,
  zero_area,
  hole_outside_outer,
  parameter_out_of_range,
  count_mismatch,
  meshing_failure,
  degenerate_triangle,
  solver_divergence,
  basis_invariant_violation,
  outside_domain,
  outside_image,
  ambiguous_preimage,
  intermediate_mismatch,
  io_failure,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::self_intersection: return "SelfIntersection";
    case ErrorCode::duplicate_vertex: return "DuplicateVertex";
    case ErrorCode::zero_area: return "ZeroArea";
    case ErrorCode::hole_outside_outer: return "HoleOutsideOuter";
    case ErrorCode::parameter_out_of_range: return "ParameterOutOfRange";
    case ErrorCode::count_mismatch: return "CountMismatch";
    case ErrorCode::meshing_failure: return "MeshingFailure";
    case ErrorCode::degenerate_triangle: return "DegenerateTriangle";
    case ErrorCode::solver_divergence: return "SolverDivergence";
    case ErrorCode::basis_invariant_violation: return "BasisInvariantViolation";
    case ErrorCode::outside_domain: return "OutsideDomain";
    case ErrorCode::outside_image: return "OutsideImage";
    case ErrorCode::ambiguous_preimage: return "Ambiguous";
    case ErrorCode::intermediate_mismatch: return "IntermediateMismatch";
    case ErrorCode::io_failure: return "IoFailure";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + detail),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& detail) {
  throw Error(code, detail);
}

}  // namespace polymap

#endif  // POLYMAP_ERRORS_HPP_
