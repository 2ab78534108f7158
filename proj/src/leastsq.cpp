#include "optsample/leastsq.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace optsample {

SpectralCertificate certify(const CMatrix& g) {
  SpectralCertificate cert;
  if (g.rows() == 0) return cert;
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(g, Eigen::EigenvaluesOnly);
  cert.lambda_min = eig.eigenvalues().minCoeff();
  cert.lambda_max = eig.eigenvalues().maxCoeff();
  if (cert.lambda_min > 0.0) cert.stability_K = 1.0 / std::sqrt(cert.lambda_min);
  return cert;
}

namespace {

void check_fit_inputs(const SampledDesign& design, std::size_t m) {
  design.validate();
  if (m == 0) throw PreconditionError("m must be at least 1");
}

CMatrix scaled_matrix(const SampledDesign& design, const Basis& basis, std::size_t m,
                      RVector* sqrt_w_out) {
  CMatrix b = evaluation_matrix(basis, m, design.points);
  RVector sqrt_w(b.rows());
  for (Eigen::Index i = 0; i < b.rows(); ++i) {
    sqrt_w[i] = std::sqrt(design.weights[static_cast<std::size_t>(i)]);
  }
  b = sqrt_w.asDiagonal() * b;
  if (sqrt_w_out) *sqrt_w_out = std::move(sqrt_w);
  return b;
}

}  // namespace

CMatrix gram(const SampledDesign& design, const Basis& basis, std::size_t m) {
  check_fit_inputs(design, m);
  const CMatrix scaled = scaled_matrix(design, basis, m, nullptr);
  CMatrix g = scaled.adjoint() * scaled;
  // Symmetrize away round-off so downstream eigen-solvers see an exact Hermitian matrix.
  return 0.5 * (g + g.adjoint());
}

SpectralCertificate stability_constant(const SampledDesign& design, const Basis& basis,
                                       std::size_t m) {
  return certify(gram(design, basis, m));
}

Scalar FittedApproximant::operator()(const Point& x) const {
  const std::size_t m = size();
  if (m == 0) return 0.0;
  CVector values = eval_basis_block(*basis, 0, m, x);
  return coefficients.cwiseProduct(values).sum();
}

LeastSquaresFactorization::LeastSquaresFactorization(const SampledDesign& design,
                                                     const Basis& basis, std::size_t m,
                                                     double tol)
    : m_(m) {
  check_fit_inputs(design, m);
  if (design.size() < m) {
    throw IllPosedDesign("least squares needs n >= m points (n = " +
                         std::to_string(design.size()) + ", m = " + std::to_string(m) + ")");
  }
  const CMatrix scaled = scaled_matrix(design, basis, m, &sqrt_w_);
  Eigen::BDCSVD<CMatrix> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  u_ = svd.matrixU();
  v_ = svd.matrixV();
  singular_ = svd.singularValues();
  certificate_.lambda_max = singular_(0) * singular_(0);
  certificate_.lambda_min = singular_(singular_.size() - 1) * singular_(singular_.size() - 1);
  if (certificate_.lambda_min > 0.0) {
    certificate_.stability_K = 1.0 / std::sqrt(certificate_.lambda_min);
  }
  if (!(certificate_.lambda_max > 0.0) ||
      certificate_.lambda_min / certificate_.lambda_max <= tol) {
    throw IllPosedDesign("Gram matrix fails the singularity gate (lambda_min / lambda_max = " +
                         std::to_string(certificate_.lambda_max > 0.0
                                            ? certificate_.lambda_min / certificate_.lambda_max
                                            : 0.0) +
                         ")");
  }
}

CVector LeastSquaresFactorization::solve(std::span<const Scalar> values) const {
  if (values.size() != n()) throw PreconditionError("value count differs from design size");
  CVector y(static_cast<Eigen::Index>(values.size()));
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    y[i] = sqrt_w_[i] * values[static_cast<std::size_t>(i)];
  }
  CVector projected = u_.adjoint() * y;
  projected.array() /= singular_.array().cast<Scalar>();
  return v_ * projected;
}

FittedApproximant fit(std::span<const Scalar> values, const SampledDesign& design, BasisPtr basis,
                      std::size_t m, double tol) {
  LeastSquaresFactorization factor(design, *basis, m, tol);
  return {factor.solve(values), std::move(basis), design};
}

FittedApproximant hyperinterpolate(std::span<const Scalar> values, const SampledDesign& design,
                                   BasisPtr basis, std::size_t m) {
  check_fit_inputs(design, m);
  if (values.size() != design.size()) {
    throw PreconditionError("value count differs from design size");
  }
  CVector c = CVector::Zero(static_cast<Eigen::Index>(m));
  CVector row(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < design.size(); ++i) {
    basis->eval_block(0, std::span<Scalar>(row.data(), m), design.points[i]);
    c += (design.weights[i] * values[i]) * row.conjugate();
  }
  return {std::move(c), std::move(basis), design};
}

LpEstimate lp_norm(const std::function<Scalar(const Point&)>& g, double p, const Measure& measure,
                   std::size_t budget, std::uint64_t seed) {
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  if (budget == 0) throw PreconditionError("Monte Carlo budget must be positive");
  Rng rng(seed);
  if (std::isinf(p)) {
    double best = 0.0;
    for (std::size_t s = 0; s < budget; ++s) best = std::max(best, std::abs(g(measure.sample(rng))));
    return {best, 0.0};
  }
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t s = 0; s < budget; ++s) {
    const double v = std::pow(std::abs(g(measure.sample(rng))), p);
    const double delta = v - mean;
    mean += delta / static_cast<double>(s + 1);
    m2 += delta * (v - mean);
  }
  const double var = budget > 1 ? m2 / static_cast<double>(budget - 1) : 0.0;
  return {std::pow(mean, 1.0 / p), std::sqrt(var / static_cast<double>(budget))};
}

double lp_error(const TargetFunction& f, const FittedApproximant& approx, double p,
                const Measure& measure, std::size_t budget, std::uint64_t seed) {
  return lp_norm([&](const Point& x) { return f(x) - approx(x); }, p, measure, budget, seed).value;
}

DiscretizationCheck check_discretization(const SampledDesign& design, const Basis& basis,
                                         std::size_t m, double lower,
                                         std::optional<double> upper) {
  DiscretizationCheck out;
  out.certificate = stability_constant(design, basis, m);
  const double slack = 1e-12 * std::max(1.0, out.certificate.lambda_max);
  out.holds = out.certificate.lambda_min >= lower * lower - slack &&
              (!upper || out.certificate.lambda_max <= (*upper) * (*upper) + slack);
  return out;
}

double coefficient_l2_error(const CVector& exact, const CVector& fitted) {
  const Eigen::Index len = std::max(exact.size(), fitted.size());
  double acc = 0.0;
  for (Eigen::Index k = 0; k < len; ++k) {
    const Scalar a = k < exact.size() ? exact[k] : Scalar(0.0);
    const Scalar b = k < fitted.size() ? fitted[k] : Scalar(0.0);
    acc += std::norm(a - b);
  }
  return std::sqrt(acc);
}

}  // namespace optsample
