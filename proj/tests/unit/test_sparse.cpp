#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "optsample/parallel.hpp"
#include "optsample/sparse.hpp"
#include "optsample/targets.hpp"

using namespace optsample;

namespace {

std::vector<Point> equispaced(std::size_t n) {
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(static_cast<double>(i) / n);
  return pts;
}

std::vector<Point> iid(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < n; ++i) pts.emplace_back(uniform01(rng));
  return pts;
}

std::vector<Scalar> observe(const CMatrix& b, const CVector& c) {
  const CVector y = b * c;
  return {y.data(), y.data() + y.size()};
}

SparseProblem problem(std::vector<Point> pts, std::size_t N, std::size_t m) {
  SparseProblem p;
  p.basis = std::make_shared<TrigBasis>();
  p.N = N;
  p.lambda = SparseProblem::default_lambda(m, pts.size());
  p.points = std::move(pts);
  return p;
}

}  // namespace

TEST_SUITE("sparse") {

TEST_CASE("problem validation") {
  SparseProblem p = problem(equispaced(8), 8, 2);
  CHECK_NOTHROW(p.validate());
  p.lambda = 0.0;
  CHECK_THROWS_AS(p.validate(), PreconditionError);
  p.lambda = 1.0;
  p.N = 0;
  CHECK_THROWS_AS(p.validate(), PreconditionError);
  CHECK(SparseProblem::default_lambda(3, 48) == doctest::Approx(0.5));
  const SparseProblem q = problem(equispaced(8), 8, 2);
  CHECK_THROWS_AS(sqrt_lasso(std::vector<Scalar>(7, 0.0), q), PreconditionError);
}

TEST_CASE("zero values give zero coefficients") {
  const SparseProblem p = problem(iid(40, 1), 16, 3);
  const SqrtLassoResult r = sqrt_lasso(std::vector<Scalar>(40, 0.0), p);
  CHECK(r.coefficients.norm() == 0.0);
  CHECK(r.objective == 0.0);
}

TEST_CASE("exact recovery on equispaced points") {
  const SparseProblem p = problem(equispaced(32), 32, 3);
  const CMatrix b = p.matrix();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CVector c = sparse_coefficients(3, 32, seed);
    const SqrtLassoResult r = sqrt_lasso(observe(b, c), p);
    CHECK((r.coefficients - c).norm() / c.norm() <= 1e-7);
    CHECK(r.gap <= 1e-8 * std::max(1.0, r.objective));
  }
}

TEST_CASE("exact recovery on a random design that passes the RIP check") {
  const std::size_t N = 32, m = 3;
  std::vector<Point> pts;
  for (std::uint64_t seed = 0;; ++seed) {
    pts = iid(900, 500 + seed);
    if (rip_check(pts, TrigBasis(), N, 2 * m).holds) break;
    REQUIRE(seed < 5);
  }
  const SparseProblem p = problem(pts, N, m);
  const CMatrix b = p.matrix();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const CVector c = sparse_coefficients(m, N, 100 + seed);
    const SqrtLassoResult r = sqrt_lasso(observe(b, c), p);
    CHECK((r.coefficients - c).norm() / c.norm() <= 1e-7);
  }
}

TEST_CASE("objective trace is non-increasing and beats a probe set") {
  const SparseProblem p = problem(iid(48, 3), 24, 4);
  const CMatrix b = p.matrix();
  Rng rng(11);
  std::vector<Scalar> y(48);
  for (auto& v : y) v = Scalar(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
  const SqrtLassoResult r = sqrt_lasso(y, p);
  for (std::size_t i = 1; i < r.objective_trace.size(); ++i) {
    CHECK(r.objective_trace[i] <= r.objective_trace[i - 1]);
  }
  const CVector yv = Eigen::Map<const CVector>(y.data(), 48);
  CHECK(r.objective == doctest::Approx(sqrt_lasso_objective(b, r.coefficients, yv, p.lambda)).epsilon(1e-12));

  std::vector<CVector> probes;
  probes.push_back(CVector::Zero(24));
  probes.push_back(b.colPivHouseholderQr().solve(yv));
  probes.push_back(b.adjoint() * yv / 48.0);
  for (int k = 0; k < 200; ++k) {
    CVector z = r.coefficients;
    for (Eigen::Index j = 0; j < z.size(); ++j) z[j] += 1e-3 * Scalar(uniform01(rng) - 0.5, uniform01(rng) - 0.5);
    probes.push_back(z);
  }
  for (const auto& z : probes) CHECK(r.objective <= sqrt_lasso_objective(b, z, yv, p.lambda) + 1e-8);
}

TEST_CASE("iteration cap raises NonConvergence") {
  const SparseProblem p = problem(iid(48, 3), 24, 4);
  Rng rng(2);
  std::vector<Scalar> y(48);
  for (auto& v : y) v = Scalar(uniform01(rng), uniform01(rng));
  SqrtLassoOptions opt;
  opt.max_iterations = 20;
  CHECK_THROWS_AS(sqrt_lasso(y, p, opt), NonConvergence);
}

TEST_CASE("noisy sparse targets: error proportional to the perturbation") {
  const std::size_t N = 32, m = 3;
  const SparseProblem p = problem(equispaced(64), N, m);
  const CMatrix b = p.matrix();
  double worst = 0.0;
  for (double eps : {1e-4, 1e-3, 1e-2, 1e-1}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const CVector c = sparse_coefficients(m, N, seed);
      std::vector<Scalar> y = observe(b, c);
      Rng rng(seed + 77);
      for (auto& v : y) v += eps * (2.0 * uniform01(rng) - 1.0);
      const SqrtLassoResult r = sqrt_lasso(y, p);
      worst = std::max(worst, (r.coefficients - c).norm() / eps);
    }
  }
  CHECK(worst <= 3.0);
}

TEST_CASE("compressible targets obey the best-term bound") {
  // Coefficients |c_k| ~ k^{-3/2}; the bound is C (m^{-1/2} sum_{k>=m} |c_k|).
  const std::size_t N = 32, m = 4;
  const SparseProblem p = problem(equispaced(64), N, m);
  const CMatrix b = p.matrix();
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const CVector c = decay_coefficients(1.0, N, seed);
    std::vector<double> mags(c.size());
    for (Eigen::Index k = 0; k < c.size(); ++k) mags[k] = std::abs(c[k]);
    std::sort(mags.rbegin(), mags.rend());
    double tail = 0.0;
    for (std::size_t k = m; k < mags.size(); ++k) tail += mags[k];
    const SqrtLassoResult r = sqrt_lasso(observe(b, c), p);
    worst = std::max(worst, (r.coefficients - c).norm() / (tail / std::sqrt(double(m))));
  }
  CHECK(worst <= 2.0);
}

TEST_CASE("rip_check on equispaced points is an exact isometry") {
  const RipReport rep = rip_check(equispaced(32), TrigBasis(), 32, 4);
  CHECK(rep.holds);
  CHECK(rep.supports == 35960);
  CHECK(rep.eigen_solves == 0);
  CHECK(rep.violating_support.empty());
}

TEST_CASE("rip_check fails below the sparsity") {
  const RipReport rep = rip_check(iid(3, 4), TrigBasis(), 12, 4);
  CHECK_FALSE(rep.holds);
  CHECK(rep.violating_support == std::vector<std::size_t>{0, 1, 2, 3});
}

TEST_CASE("rip_check reports the same support for any thread count") {
  const auto pts = iid(40, 9);
  set_max_threads(1);
  const RipReport one = rip_check(pts, TrigBasis(), 24, 4);
  set_max_threads(4);
  const RipReport four = rip_check(pts, TrigBasis(), 24, 4);
  set_max_threads(0);
  CHECK(one.holds == four.holds);
  CHECK(one.violating_support == four.violating_support);
}

TEST_CASE("rip_check budget") {
  CHECK_THROWS_AS(rip_check(equispaced(64), TrigBasis(), 32, 16), BudgetExceeded);
  CHECK_THROWS_AS(rip_check(equispaced(8), TrigBasis(), 8, 2, 1.0, 0.5), PreconditionError);
}

TEST_CASE("i.i.d. designs pass at a calibrated size") {
  const std::size_t N = 16, s = 4;
  int passed = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) passed += rip_check(iid(450, 900 + seed), TrigBasis(), N, s).holds;
  CHECK(passed >= 90);
}

}
