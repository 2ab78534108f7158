#include <algorithm>
#include <cmath>
#include <limits>

#include "optsample/kernels.hpp"

namespace optsample::kernels::scalar {

double min_sup_distance(const double* q, const double* const* cols, std::size_t d,
                        std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    double dist = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dist = std::max(dist, std::abs(q[k] - cols[k][i]));
    }
    best = std::min(best, dist);
  }
  return best;
}

double min_torus_distance(double q, const double* pts, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::abs(q - pts[i]);
    best = std::min(best, std::min(a, 1.0 - a));
  }
  return best;
}

double weighted_abs2_sum(const double* re, const double* im, const double* w, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += w[i] * (re[i] * re[i] + im[i] * im[i]);
  }
  return acc;
}

}  // namespace optsample::kernels::scalar
