#include "optsample/multilevel.hpp"

#include <cmath>

#include "optsample/random_designs.hpp"

namespace optsample {

CVector ml_level_update(const TargetFunction& f, const MLConfig& config, const CVector& current,
                        std::size_t level, Rng& rng, SampledDesign* used) {
  if (!config.basis) throw PreconditionError("multilevel config needs a basis");
  if (config.r == 0) throw PreconditionError("oversampling factor r must be at least 1");
  const std::size_t ms = std::size_t{1} << level;
  const std::size_t ns = config.r * ms;
  if (static_cast<std::size_t>(current.size()) < ms) {
    throw PreconditionError("coefficient vector shorter than the level dimension");
  }
  const DensitySpec density = christoffel_density(config.basis, ms);
  if (!density.sup_bound) {
    throw PreconditionError("Christoffel sampling unavailable for basis " +
                            std::string(config.basis->name()));
  }
  const auto msi = static_cast<Eigen::Index>(ms);
  CVector update = CVector::Zero(msi);
  CVector row(msi);
  for (std::size_t i = 0; i < ns; ++i) {
    const Point x = density.sample(config.measure, rng);
    const double rho = density.eval(x);
    config.basis->eval_block(0, std::span<Scalar>(row.data(), ms), x);
    const Scalar residual = f(x) - current.head(msi).cwiseProduct(row).sum();
    update += (residual / rho) * row.conjugate();
    if (used) {
      used->points.push_back(x);
      used->weights.push_back(1.0 / (static_cast<double>(ns) * rho));
    }
  }
  return update / static_cast<double>(ns);
}

MLResult ml_recover(const TargetFunction& f, const MLConfig& config, std::uint64_t seed) {
  if (config.k >= 40) throw PreconditionError("level k too large");
  const std::size_t m = std::size_t{1} << config.k;
  config.basis->check_index(m - 1);
  Rng rng(seed);
  MLResult out;
  CVector c = CVector::Zero(static_cast<Eigen::Index>(m));
  for (std::size_t s = 0; s <= config.k; ++s) {
    const auto ms = static_cast<Eigen::Index>(std::size_t{1} << s);
    c.head(ms) += ml_level_update(f, config, c, s, rng, &out.approximant.design);
    out.evaluations += config.r * (std::size_t{1} << s);
  }
  out.approximant.coefficients = std::move(c);
  out.approximant.basis = config.basis;
  return out;
}

double ml_error_bound(std::size_t r, std::size_t k, const std::function<double(double)>& tail) {
  const double rd = static_cast<double>(r);
  double acc = 0.0;
  for (int v = -1; v <= static_cast<int>(k); ++v) {
    acc += std::pow(rd, v) * tail(std::ldexp(1.0, v));
  }
  return acc * std::pow(rd, -static_cast<double>(k));
}

}  // namespace optsample
