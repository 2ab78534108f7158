#include "optsample/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include "optsample/kernels.hpp"
#include "optsample/parallel.hpp"

namespace optsample {

double SparseProblem::default_lambda(std::size_t m, std::size_t n) {
  if (n == 0) throw PreconditionError("n must be positive");
  return 2.0 * std::sqrt(static_cast<double>(m) / static_cast<double>(n));
}

void SparseProblem::validate() const {
  if (!basis) throw PreconditionError("sparse problem needs a basis");
  if (N == 0) throw PreconditionError("N must be at least 1");
  if (points.empty()) throw PreconditionError("sparse problem needs sampling points");
  if (!(lambda > 0.0)) throw PreconditionError("lambda must be positive");
  basis->check_index(N - 1);
}

CMatrix SparseProblem::matrix() const { return evaluation_matrix(*basis, N, points); }

namespace {

double residual_norm(const CMatrix& b, const CVector& z, const CVector& y) {
  const CVector r = b * z - y;
  const auto n = static_cast<std::size_t>(r.size());
  std::vector<double> re(n);
  std::vector<double> im(n);
  std::vector<double> ones(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    re[i] = r[static_cast<Eigen::Index>(i)].real();
    im[i] = r[static_cast<Eigen::Index>(i)].imag();
  }
  return std::sqrt(kernels::active().weighted_abs2_sum(re.data(), im.data(), ones.data(), n));
}

CVector soft_threshold(const CVector& v, double t) {
  CVector out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    const double a = std::abs(v[j]);
    out[j] = a > t ? v[j] * ((a - t) / a) : Scalar(0.0);
  }
  return out;
}

/// Least squares on the support of z; empty optional when the support is
/// empty or not smaller than the number of rows.
std::optional<CVector> polish(const CMatrix& b, const CVector& z, const CVector& y) {
  const double top = z.cwiseAbs().maxCoeff();
  if (!(top > 0.0)) return std::nullopt;
  std::vector<Eigen::Index> support;
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    if (std::abs(z[j]) > 1e-3 * top) support.push_back(j);
  }
  if (support.size() >= static_cast<std::size_t>(b.rows())) return std::nullopt;
  CMatrix bs(b.rows(), static_cast<Eigen::Index>(support.size()));
  for (std::size_t c = 0; c < support.size(); ++c) bs.col(static_cast<Eigen::Index>(c)) = b.col(support[c]);
  const CVector cs = bs.colPivHouseholderQr().solve(y);
  CVector out = CVector::Zero(z.size());
  for (std::size_t c = 0; c < support.size(); ++c) out[support[c]] = cs[static_cast<Eigen::Index>(c)];
  return out;
}

}  // namespace

double sqrt_lasso_objective(const CMatrix& b, const CVector& z, const CVector& y, double lambda) {
  return z.cwiseAbs().sum() + lambda * residual_norm(b, z, y);
}

SqrtLassoResult sqrt_lasso(std::span<const Scalar> values, const SparseProblem& problem,
                           const SqrtLassoOptions& options) {
  problem.validate();
  if (values.size() != problem.points.size()) {
    throw PreconditionError("one value per sampling point is required");
  }
  if (options.check_every == 0) throw PreconditionError("check_every must be positive");
  const CMatrix b = problem.matrix();
  const CVector y = Eigen::Map<const CVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  const double lambda = problem.lambda;
  const auto n_cols = b.cols();

  Eigen::JacobiSVD<CMatrix> svd(b);
  const double norm_b = svd.singularValues()(0);
  if (!(norm_b > 0.0)) throw PreconditionError("sampling matrix is zero");
  const double tau = 0.99 / norm_b;
  const double sigma = 0.99 / norm_b;

  CVector z = CVector::Zero(n_cols);
  CVector z_bar = z;
  CVector p = CVector::Zero(b.rows());

  SqrtLassoResult best;
  best.coefficients = z;
  best.objective = sqrt_lasso_objective(b, z, y, lambda);
  double best_dual = 0.0;

  auto consider = [&](const CVector& candidate) {
    const double obj = sqrt_lasso_objective(b, candidate, y, lambda);
    if (obj < best.objective) {
      best.objective = obj;
      best.coefficients = candidate;
    }
  };
  auto dual_value = [&](const CVector& q) {
    const double qn = q.norm();
    const double cinf = (b.adjoint() * q).cwiseAbs().maxCoeff();
    double scale = 1.0;
    if (qn > lambda) scale = std::min(scale, lambda / qn);
    if (cinf > 1.0) scale = std::min(scale, 1.0 / cinf);
    return -scale * std::real(q.dot(y));
  };

  for (std::size_t it = 1; it <= options.max_iterations; ++it) {
    p += sigma * (b * z_bar - y);
    const double pn = p.norm();
    if (pn > lambda) p *= lambda / pn;
    const CVector z_next = soft_threshold(z - tau * (b.adjoint() * p), tau);
    z_bar = 2.0 * z_next - z;
    z = z_next;

    if (it % options.check_every != 0) continue;
    consider(z);
    if (auto polished = polish(b, best.coefficients, y)) consider(*polished);
    best_dual = std::max(best_dual, dual_value(p));
    const CVector r = b * best.coefficients - y;
    const double rn = r.norm();
    if (rn > 0.0) best_dual = std::max(best_dual, dual_value(lambda * r / rn));
    best.gap = best.objective - best_dual;
    best.objective_trace.push_back(best.objective);
    best.iterations = it;
    if (best.gap <= options.tol * std::max(1.0, best.objective)) return best;
  }
  throw NonConvergence("square-root Lasso: duality gap " + std::to_string(best.gap) +
                       " above tolerance after " + std::to_string(options.max_iterations) +
                       " iterations");
}

namespace {

double binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0.0;
  double out = 1.0;
  for (std::size_t i = 1; i <= k; ++i) {
    out = out * static_cast<double>(n - k + i) / static_cast<double>(i);
  }
  return std::round(out);
}

bool gershgorin_inside(const CMatrix& h, const std::vector<std::size_t>& s, double lower,
                       double upper) {
  for (auto j : s) {
    double radius = 0.0;
    for (auto k : s) {
      if (k != j) radius += std::abs(h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)));
    }
    const double c = h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j)).real();
    if (c - radius < lower || c + radius > upper) return false;
  }
  return true;
}

}  // namespace

RipReport rip_check(std::span<const Point> points, const Basis& basis, std::size_t N,
                    std::size_t sparsity, double lower, double upper, std::size_t max_supports) {
  if (points.empty()) throw PreconditionError("rip_check needs sampling points");
  if (N == 0 || sparsity == 0) throw PreconditionError("N and sparsity must be positive");
  if (lower > upper) throw PreconditionError("lower bound exceeds upper bound");
  const std::size_t s = std::min(sparsity, N);
  if (binomial(N, s) > static_cast<double>(max_supports)) {
    throw BudgetExceeded("rip_check: C(" + std::to_string(N) + ", " + std::to_string(s) +
                         ") supports exceed the budget");
  }
  const CMatrix a = evaluation_matrix(basis, N, points) / std::sqrt(static_cast<double>(points.size()));
  const CMatrix h = a.adjoint() * a;

  // Supports are split by their smallest index. A worker stops once a
  // violation with a smaller leading index is known, so the reported support
  // is the lexicographically first one regardless of scheduling.
  std::atomic<std::size_t> first_fail{N};
  std::vector<std::vector<std::size_t>> violation(N);
  std::vector<std::size_t> counted(N, 0);
  std::vector<std::size_t> solved(N, 0);

  parallel_for(N, [&](std::size_t lead) {
    if (lead + s > N) return;
    std::vector<std::size_t> idx(s);
    for (std::size_t i = 0; i < s; ++i) idx[i] = lead + i;
    CMatrix sub(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(s));
    while (true) {
      if (first_fail.load(std::memory_order_relaxed) < lead) return;
      ++counted[lead];
      if (!gershgorin_inside(h, idx, lower, upper)) {
        ++solved[lead];
        for (std::size_t r = 0; r < s; ++r) {
          for (std::size_t c = 0; c < s; ++c) {
            sub(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                h(static_cast<Eigen::Index>(idx[r]), static_cast<Eigen::Index>(idx[c]));
          }
        }
        Eigen::SelfAdjointEigenSolver<CMatrix> eig(sub, Eigen::EigenvaluesOnly);
        if (eig.eigenvalues().minCoeff() < lower || eig.eigenvalues().maxCoeff() > upper) {
          violation[lead] = idx;
          std::size_t cur = first_fail.load();
          while (lead < cur && !first_fail.compare_exchange_weak(cur, lead)) {
          }
          return;
        }
      }
      // Next combination with idx[0] fixed.
      std::size_t pos = s;
      while (pos > 1 && idx[pos - 1] == N - s + pos - 1) --pos;
      if (pos <= 1) return;
      ++idx[pos - 1];
      for (std::size_t i = pos; i < s; ++i) idx[i] = idx[i - 1] + 1;
    }
  });

  RipReport rep;
  const std::size_t fail = first_fail.load();
  rep.holds = fail == N;
  if (!rep.holds) rep.violating_support = violation[fail];
  for (std::size_t i = 0; i < N; ++i) {
    rep.supports += counted[i];
    rep.eigen_solves += solved[i];
  }
  return rep;
}

}  // namespace optsample
