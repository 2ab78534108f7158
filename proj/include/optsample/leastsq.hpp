#pragma once

// Weighted least squares over a basis prefix, Gram diagnostics and error
// measurement.

#include <functional>
#include <limits>
#include <optional>
#include <span>

#include "optsample/model.hpp"

namespace optsample {

inline constexpr double kDefaultSingularityTol = 1e-10;

/// Extreme eigenvalues of a weighted Gram matrix and K = lambda_min^{-1/2}.
struct SpectralCertificate {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double stability_K = std::numeric_limits<double>::infinity();

  bool stable() const { return lambda_min > 0.0; }
};

SpectralCertificate certify(const CMatrix& gram);

/// G(j, k) = sum_i w_i b_k(x_i) conj(b_j(x_i)).
CMatrix gram(const SampledDesign& design, const Basis& basis, std::size_t m);

SpectralCertificate stability_constant(const SampledDesign& design, const Basis& basis,
                                       std::size_t m);

/// Coefficients over b_0..b_{m-1}, evaluable anywhere.
struct FittedApproximant {
  CVector coefficients;
  BasisPtr basis;
  SampledDesign design;

  Scalar operator()(const Point& x) const;
  std::size_t size() const { return static_cast<std::size_t>(coefficients.size()); }
};

/// SVD of the sqrt(w)-scaled evaluation matrix, computed once per design and
/// reused for any number of value vectors.
class LeastSquaresFactorization {
public:
  /// Throws IllPosedDesign when lambda_min(G) / lambda_max(G) <= tol.
  LeastSquaresFactorization(const SampledDesign& design, const Basis& basis, std::size_t m,
                            double tol = kDefaultSingularityTol);

  CVector solve(std::span<const Scalar> values) const;
  const SpectralCertificate& certificate() const { return certificate_; }
  std::size_t m() const { return m_; }
  std::size_t n() const { return static_cast<std::size_t>(sqrt_w_.size()); }
  /// Squared singular values of M, i.e. the Gram eigenvalues, descending.
  RVector gram_eigenvalues() const { return singular_.array().square(); }

private:
  std::size_t m_;
  RVector sqrt_w_;
  CMatrix u_;
  RVector singular_;
  CMatrix v_;
  SpectralCertificate certificate_;
};

FittedApproximant fit(std::span<const Scalar> values, const SampledDesign& design, BasisPtr basis,
                      std::size_t m, double tol = kDefaultSingularityTol);

/// c_k = sum_i w_i f(x_i) conj(b_k(x_i)).
FittedApproximant hyperinterpolate(std::span<const Scalar> values, const SampledDesign& design,
                                   BasisPtr basis, std::size_t m);

struct LpEstimate {
  double value = 0.0;
  /// Standard error of the MC mean of |g|^p (before the 1/p root); 0 for p = inf.
  double standard_error = 0.0;
};

/// Monte Carlo L_p norm of g under `measure`; p = infinity gives the max
/// over the draws.
LpEstimate lp_norm(const std::function<Scalar(const Point&)>& g, double p, const Measure& measure,
                   std::size_t budget, std::uint64_t seed);

double lp_error(const TargetFunction& f, const FittedApproximant& approx, double p,
                const Measure& measure, std::size_t budget, std::uint64_t seed);

struct DiscretizationCheck {
  bool holds = false;
  SpectralCertificate certificate;
};

/// True iff lambda_min(G) >= lower^2 and, when given, lambda_max(G) <= upper^2,
/// both up to a round-off slack of 1e-12 max(1, lambda_max).
DiscretizationCheck check_discretization(const SampledDesign& design, const Basis& basis,
                                         std::size_t m, double lower,
                                         std::optional<double> upper = std::nullopt);

/// ||f - A f||_2 by Parseval when both sides are expansions in the same
/// orthonormal basis; the shorter vector is zero-padded.
double coefficient_l2_error(const CVector& exact, const CVector& fitted);

}  // namespace optsample
