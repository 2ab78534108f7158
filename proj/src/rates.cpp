#include "optsample/rates.hpp"

#include <cmath>

#include "optsample/core.hpp"

namespace optsample {

RateFit fit_loglog(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionError("x and y differ in length");
  if (x.size() < 2) throw PreconditionError("rate fit needs at least two points");
  const auto n = static_cast<Eigen::Index>(x.size());
  RMatrix a(n, 2);
  RVector b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double xi = x[static_cast<std::size_t>(i)];
    const double yi = y[static_cast<std::size_t>(i)];
    if (!(xi > 0.0) || !(yi > 0.0)) throw PreconditionError("rate fit needs positive data");
    a(i, 0) = std::log(xi);
    a(i, 1) = 1.0;
    b[i] = std::log(yi);
  }
  if (a.col(0).maxCoeff() == a.col(0).minCoeff()) {
    throw PreconditionError("rate fit needs distinct x values");
  }
  const RVector coef = a.colPivHouseholderQr().solve(b);
  RateFit fit;
  fit.slope = coef[0];
  fit.intercept = coef[1];
  const double mean = b.mean();
  const double ss_tot = (b.array() - mean).square().sum();
  const double ss_res = (a * coef - b).squaredNorm();
  fit.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace optsample
