#include "optsample/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "optsample/model.hpp"

namespace optsample {

CVector decay_coefficients(double alpha, std::size_t K, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw PreconditionError("decay exponent must be positive");
  if (K == 0) throw PreconditionError("need at least one coefficient");
  Rng rng(seed);
  CVector c(static_cast<Eigen::Index>(K));
  c[0] = 1.0;
  for (std::size_t k = 1; k < K; ++k) {
    const double kd = static_cast<double>(k);
    const double mag = std::sqrt(std::pow(kd, -2.0 * alpha) - std::pow(kd + 1.0, -2.0 * alpha));
    c[static_cast<Eigen::Index>(k)] = (rng() & 1U) ? mag : -mag;
  }
  return c;
}

CVector rkhs_random_coefficients(const std::vector<double>& sigmas, std::uint64_t seed) {
  if (sigmas.empty()) throw PreconditionError("need at least one singular value");
  Rng rng(seed);
  std::normal_distribution<double> normal;
  RVector xi(static_cast<Eigen::Index>(sigmas.size()));
  for (Eigen::Index k = 0; k < xi.size(); ++k) xi[k] = normal(rng);
  const double radius = std::pow(uniform01(rng), 1.0 / static_cast<double>(sigmas.size()));
  xi *= radius / xi.norm();
  CVector c(xi.size());
  for (Eigen::Index k = 0; k < xi.size(); ++k) c[k] = sigmas[static_cast<std::size_t>(k)] * xi[k];
  return c;
}

CVector sparse_coefficients(std::size_t m, std::size_t N, std::uint64_t seed) {
  if (m == 0 || m > N) throw PreconditionError("sparsity must lie in [1, N]");
  Rng rng(seed);
  std::vector<std::size_t> idx(N);
  std::iota(idx.begin(), idx.end(), 0);
  std::shuffle(idx.begin(), idx.end(), rng);
  std::normal_distribution<double> normal;
  CVector c = CVector::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t j = 0; j < m; ++j) {
    const double re = normal(rng);
    const double im = normal(rng);
    c[static_cast<Eigen::Index>(idx[j])] = Scalar(re, im);
  }
  return c;
}

double tail_energy(const CVector& coefficients, std::size_t m) {
  const auto size = static_cast<std::size_t>(coefficients.size());
  if (m >= size) return 0.0;
  return coefficients.tail(static_cast<Eigen::Index>(size - m)).squaredNorm();
}

TargetFunction trig_decay(BasisPtr basis, double alpha, std::size_t K, std::uint64_t seed) {
  return TargetFunction::from_coefficients(std::move(basis), decay_coefficients(alpha, K, seed));
}

TargetFunction lipschitz_hat(double center, double width) {
  if (!(width > 0.0)) throw PreconditionError("hat width must be positive");
  return TargetFunction([center, width](const Point& x) {
    return Scalar(std::max(0.0, width - torus_distance(x[0], center)));
  });
}

TargetFunction lacunary(std::size_t levels) {
  return TargetFunction([levels](const Point& x) {
    double acc = 0.0;
    double freq = 1.0;
    double amp = 1.0;
    for (std::size_t j = 0; j <= levels; ++j) {
      acc += amp * std::cos(2.0 * std::numbers::pi * freq * x[0]);
      freq *= 2.0;
      amp *= 0.25;
    }
    return Scalar(acc);
  });
}

}  // namespace optsample
