#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace contrast_asym {

enum class ErrorCode {
  invalid_conductivity,
  unsupported_dimension,
  ordering_violation,
  invalid_family,
  overlapping_regions,
  unresolvable_thin_region,
  mismatched_mesh,
  solver_divergence,
  point_inside_k,
  unknown_boundary,
  nonzero_flux,
  zero_measure,
  nonpositive_sample,
  too_few_samples,
  config,
  io,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_conductivity: return "invalid-conductivity";
    case ErrorCode::unsupported_dimension: return "unsupported-dimension";
    case ErrorCode::ordering_violation: return "ordering-violation";
    case ErrorCode::invalid_family: return "invalid-family";
    case ErrorCode::overlapping_regions: return "overlapping-regions";
    case ErrorCode::unresolvable_thin_region: return "unresolvable-thin-region";
    case ErrorCode::mismatched_mesh: return "mismatched-mesh";
    case ErrorCode::solver_divergence: return "solver-divergence";
    case ErrorCode::point_inside_k: return "point-inside-k";
    case ErrorCode::unknown_boundary: return "unknown-boundary";
    case ErrorCode::nonzero_flux: return "nonzero-flux";
    case ErrorCode::zero_measure: return "zero-measure";
    case ErrorCode::nonpositive_sample: return "nonpositive-sample";
    case ErrorCode::too_few_samples: return "too-few-samples";
    case ErrorCode::config: return "config";
    case ErrorCode::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace contrast_asym
