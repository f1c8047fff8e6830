#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include "contrast_asym/error.hpp"

namespace contrast_asym {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;  ///< max |log y − fitted log y|
};

/// Least-squares line through (log x, log y).
inline RateFit fit_rate(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 3) throw Error(ErrorCode::too_few_samples, "a rate fit needs at least 3 samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [x, y] : samples) {
    if (!(x > 0.0) || !(y > 0.0) || !std::isfinite(x) || !std::isfinite(y))
      throw Error(ErrorCode::nonpositive_sample, "rate samples must be positive and finite");
    const double lx = std::log(x), ly = std::log(y);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
  }
  const double m = double(samples.size());
  const double den = m * sxx - sx * sx;
  if (den <= 0.0) throw Error(ErrorCode::too_few_samples, "rate samples need distinct abscissae");
  RateFit f;
  f.slope = (m * sxy - sx * sy) / den;
  f.intercept = (sy - f.slope * sx) / m;
  for (const auto& [x, y] : samples)
    f.residual = std::max(f.residual, std::abs(std::log(y) - (f.intercept + f.slope * std::log(x))));
  return f;
}

}  // namespace contrast_asym
