#include "optsample/random_designs.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

namespace optsample {

Point DensitySpec::sample(const Measure& measure, Rng& rng, std::size_t max_tries) const {
  if (!sup_bound) {
    throw PreconditionError("density has no sup bound; rejection sampling unavailable");
  }
  return rejection_sample(measure, eval, *sup_bound, rng, max_tries);
}

DensitySpec flat_density() {
  DensitySpec d;
  d.kind = DensitySpec::Kind::Flat;
  d.eval = [](const Point&) { return 1.0; };
  d.sup_bound = 1.0;
  return d;
}

namespace {

double mean_abs2(const Basis& basis, std::size_t first, std::size_t count, const Point& x) {
  std::vector<Scalar> v(count);
  basis.eval_block(first, v, x);
  double acc = 0.0;
  for (const auto& z : v) acc += std::norm(z);
  return acc / static_cast<double>(count);
}

}  // namespace

DensitySpec christoffel_density(BasisPtr basis, std::size_t m) {
  if (m == 0) throw PreconditionError("Christoffel density needs m >= 1");
  basis->check_index(m - 1);
  DensitySpec d;
  d.kind = DensitySpec::Kind::Christoffel;
  d.m = m;
  d.sup_bound = basis->christoffel_sup(m);
  d.eval = [basis, m](const Point& x) { return mean_abs2(*basis, 0, m, x); };
  return d;
}

DensitySpec optimal_rkhs_density(BasisPtr basis, std::size_t m, std::vector<double> sigmas) {
  if (m == 0) throw PreconditionError("optimal density needs m >= 1");
  if (sigmas.size() <= m) throw DegenerateTail("no singular values beyond index m");
  basis->check_index(sigmas.size() - 1);
  double tail = 0.0;
  for (std::size_t k = m; k < sigmas.size(); ++k) tail += sigmas[k] * sigmas[k];
  if (!(tail > 0.0)) throw DegenerateTail("tail singular values are all zero");

  DensitySpec d;
  d.kind = DensitySpec::Kind::OptimalRkhs;
  d.m = m;
  const auto head_sup = basis->christoffel_sup(m);
  if (head_sup && basis->theta()) d.sup_bound = 0.5 * (*head_sup + (*basis->theta()) * (*basis->theta()));
  const std::size_t total = sigmas.size();
  d.eval = [basis, m, total, tail, s = std::move(sigmas)](const Point& x) {
    std::vector<Scalar> v(total);
    basis->eval_block(0, v, x);
    double head = 0.0;
    for (std::size_t k = 0; k < m; ++k) head += std::norm(v[k]);
    double weighted = 0.0;
    for (std::size_t k = m; k < total; ++k) weighted += s[k] * s[k] * std::norm(v[k]);
    return 0.5 * (head / static_cast<double>(m) + weighted / tail);
  };
  return d;
}

SampledDesign iid_design(const DensitySpec& density, std::size_t n, const Measure& measure,
                         std::uint64_t seed, std::size_t max_tries) {
  if (n == 0) throw PreconditionError("design size must be positive");
  Rng rng(seed);
  SampledDesign design;
  design.points.reserve(n);
  design.weights.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Point x = density.sample(measure, rng, max_tries);
    design.weights.push_back(1.0 / (static_cast<double>(n) * density.eval(x)));
    design.points.push_back(x);
  }
  return design;
}

std::size_t conditional_christoffel_size(std::size_t m) {
  const double md = static_cast<double>(m);
  return static_cast<std::size_t>(std::ceil(10.0 * md * std::log(4.0 * md)));
}

ConditionalDesign conditional_christoffel_design(BasisPtr basis, std::size_t m,
                                                 const Measure& measure, std::uint64_t seed,
                                                 std::size_t redraw_cap) {
  if (m == 0) throw PreconditionError("m must be at least 1");
  const DensitySpec density = christoffel_density(basis, m);
  const std::size_t n = conditional_christoffel_size(m);
  for (std::size_t draw = 0; draw < redraw_cap; ++draw) {
    SampledDesign design = iid_design(density, n, measure, derive_seed(seed, draw));
    SpectralCertificate cert = stability_constant(design, *basis, m);
    if (cert.lambda_min >= 0.5) return {std::move(design), cert, draw + 1};
  }
  throw BudgetExceeded("conditional Christoffel design: redraw cap " +
                       std::to_string(redraw_cap) + " exceeded");
}

SampledDesign dolbeault_chkifa_design(BasisPtr basis, std::size_t m, std::size_t n,
                                      const Measure& measure, std::uint64_t seed,
                                      std::size_t max_tries) {
  if (m < 2) throw PreconditionError("Algorithm needs m >= 2");
  if (n < m) throw PreconditionError("Algorithm needs n >= m");
  basis->check_index(m - 1);
  const auto csup = basis->christoffel_sup(m);
  if (!csup) throw PreconditionError("basis has no Christoffel sup bound for rejection sampling");
  const double md = static_cast<double>(m);
  const double step = 1.0 / std::sqrt(static_cast<double>(n) / (md - 1.0));
  const auto mi = static_cast<Eigen::Index>(m);

  Rng rng(seed);
  CMatrix a = CMatrix::Zero(mi, mi);
  double ell = -md;
  SampledDesign design;
  CVector bx(mi);
  for (std::size_t i = 0; i < n; ++i) {
    // A - ell I is Hermitian positive definite by the barrier argument; eigen-decompose once.
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(a);
    const RVector lam = eig.eigenvalues();
    const RVector y = (lam.array() - ell).inverse();
    const double next_ell = ell + step;
    if ((lam.array() - next_ell).minCoeff() <= 0.0) {
      throw NonConvergence("barrier left the positive definite cone");
    }
    const RVector z = (lam.array() - next_ell).inverse();
    const double gap = z.sum() - y.sum();
    const RVector w_eig = z.array().square() / gap - z.array();
    const CMatrix w = eig.eigenvectors() * w_eig.cast<Scalar>().asDiagonal() *
                      eig.eigenvectors().adjoint();
    const double wmax = w_eig.maxCoeff();
    if (!(wmax > 0.0)) throw NonConvergence("sampling density is non-positive everywhere");

    auto rho = [&](const Point& x) {
      basis->eval_block(0, std::span<Scalar>(bx.data(), m), x);
      return std::real(bx.dot(w * bx));
    };
    const Point x = rejection_sample(measure, rho, wmax * md * (*csup), rng, max_tries);
    const double rx = rho(x);
    const double weight = 1.0 / rx;
    basis->eval_block(0, std::span<Scalar>(bx.data(), m), x);
    a.noalias() += weight * bx * bx.adjoint();
    design.points.push_back(x);
    design.weights.push_back(weight);
    ell = next_ell;
  }
  return design;
}

}  // namespace optsample
