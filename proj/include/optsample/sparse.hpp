#pragma once

// Square-root Lasso over a bounded orthonormal system and brute-force
// restricted isometry checks.

#include <optional>
#include <vector>

#include "optsample/leastsq.hpp"

namespace optsample {

struct SparseProblem {
  BasisPtr basis;
  /// Dictionary size: b_0 .. b_{N-1}.
  std::size_t N = 0;
  std::vector<Point> points;
  double lambda = 0.0;

  /// 2 sqrt(m / n).
  static double default_lambda(std::size_t m, std::size_t n);
  void validate() const;
  /// B(i, j) = b_j(x_i), unscaled.
  CMatrix matrix() const;
};

/// ||z||_1 + lambda ||B z - y||_2.
double sqrt_lasso_objective(const CMatrix& b, const CVector& z, const CVector& y, double lambda);

struct SqrtLassoResult {
  CVector coefficients;
  double objective = 0.0;
  /// Primal objective minus the best feasible dual value.
  double gap = 0.0;
  std::size_t iterations = 0;
  /// Objective of the reported iterate after each gap check; non-increasing.
  std::vector<double> objective_trace;
};

struct SqrtLassoOptions {
  /// Stop once gap <= tol * max(1, objective).
  double tol = 1e-8;
  std::size_t max_iterations = 200'000;
  std::size_t check_every = 20;
};

/// Primal-dual splitting on the square-root Lasso. The reported iterate is
/// the best one seen, refined by a least-squares fit on its support whenever
/// that lowers the objective. Throws NonConvergence at the iteration cap.
SqrtLassoResult sqrt_lasso(std::span<const Scalar> values, const SparseProblem& problem,
                           const SqrtLassoOptions& options = {});

struct RipReport {
  bool holds = false;
  std::size_t supports = 0;
  /// Supports that needed an eigenvalue solve after the Gershgorin test.
  std::size_t eigen_solves = 0;
  /// A support violating the bounds, when one was found.
  std::vector<std::size_t> violating_support;
};

/// True iff for every support S of size `sparsity` the eigenvalues of
/// (A^* A)_{SS}, A = B / sqrt(n), lie in [lower, upper]. Throws
/// BudgetExceeded when there are more than `max_supports` supports.
RipReport rip_check(std::span<const Point> points, const Basis& basis, std::size_t N,
                    std::size_t sparsity, double lower = 0.75, double upper = 1.25,
                    std::size_t max_supports = 50'000'000);

}  // namespace optsample
