#pragma once

#include <span>

namespace optsample {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares line through (log x, log y). Needs at least two points
/// with positive coordinates and distinct x.
RateFit fit_loglog(std::span<const double> x, std::span<const double> y);

}  // namespace optsample
