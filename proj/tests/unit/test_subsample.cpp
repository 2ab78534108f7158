#include <doctest.h>

#include <cmath>

#include "optsample/subsample.hpp"
#include "optsample/targets.hpp"

using namespace optsample;

namespace {

/// lambda_max of sum_i w_i b(x_i) b(x_i)^*, recomputed from the design alone.
double upper_from_design(const SampledDesign& d, const AuxiliaryFamily& b) {
  CMatrix acc = CMatrix::Zero(b.size, b.size);
  CVector v(b.size);
  for (std::size_t i = 0; i < d.size(); ++i) {
    b.eval(d.points[i], std::span<Scalar>(v.data(), b.size));
    acc += d.weights[i] * v * v.adjoint();
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(acc, Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

}  // namespace

TEST_SUITE("subsample") {

TEST_CASE("barrier parameters") {
  const CMatrix J = CMatrix::Identity(3, 3) * 4.0;
  const BarrierParameters p = barrier_parameters(8, 24, J);
  CHECK(p.r == doctest::Approx(std::sqrt(8.0 / 25.0)));
  CHECK(p.sigma == doctest::Approx(2.0));
  CHECK(p.s == doctest::Approx(std::sqrt(12.0 / 24.0)));
  CHECK(p.delta_star == doctest::Approx((1.0 - p.r) / 25.0));
  CHECK(p.zeta_star == doctest::Approx((2.0 + p.s) / (2.0 * 24.0)));
  CHECK_THROWS_AS(barrier_parameters(8, 4, J), PreconditionError);
}

TEST_CASE("tail count and config preconditions") {
  CHECK(rkhs_tail_count(16, 1.5, 0.5) == 48);
  CHECK(rkhs_tail_count(8, 1.0, 0.5) == 56);
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  CHECK_THROWS_AS(rkhs_tail_config(trig, 8, 16, 1.5, 0.5, 0.5, mu), PreconditionError);
  CHECK_THROWS_AS(rkhs_tail_config(trig, 8, 16, 1.0, 1.0, 0.5, mu), PreconditionError);
  CHECK_THROWS_AS(rkhs_tail_config(trig, 8, 16, 1.5, 1.0, 0.4, mu), PreconditionError);
  CHECK_THROWS_AS(rkhs_tail_config(trig, 64, 128, 1.5, 1.0, 0.5, mu, 100), PreconditionError);

  const GreedyConfig cfg = rkhs_tail_config(trig, 16, 32, 1.5, 1.0, 0.5, mu);
  CHECK(cfg.b.size == 49);
  double tail = 0.0;
  for (std::size_t k = 16; k < 64; ++k) tail += 1.0 / (k * static_cast<double>(k));
  const double c = 1.0 / 16.0 + std::sqrt(tail / 32.0);
  CHECK(std::real(cfg.b.J(0, 0)) == doctest::Approx(c * c));
  CHECK(std::real(cfg.b.J(1, 1)) == doctest::Approx(1.0 / 256.0));
  CHECK(cfg.b.J.isDiagonal(0.0));
}

TEST_CASE("greedy design satisfies both output inequalities") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  for (std::uint64_t seed : {1, 2, 3}) {
    const GreedyConfig cfg = rkhs_tail_config(trig, 8, 16, 1.5, 1.0, 0.5, mu);
    const GreedyResult res = bss_subsample(cfg, mu, seed);
    CHECK(res.design.size() == 16);
    CHECK(res.certificate.lower_holds);
    CHECK(res.certificate.upper_holds);

    const BarrierParameters& p = res.certificate.params;
    const SpectralCertificate g = stability_constant(res.design, *trig, 8);
    CHECK(g.lambda_min + p.r * (1.0 - p.r) >= 17.0 * cfg.delta * (1.0 - 1e-10));
    CHECK(g.lambda_min >= (1.0 - p.r) * (1.0 - p.r) * (1.0 - 1e-10));
    CHECK(g.stability_K <= 1.0 / (1.0 - p.r) * (1.0 + 1e-10));
    CHECK(upper_from_design(res.design, cfg.b) <= (16.0 * cfg.zeta * p.sigma * p.sigma + p.s * (p.sigma + p.s)) * (1.0 + 1e-10));

    for (const GreedyStep& st : res.trace) {
      CHECK(st.lower_margin > 0.0);
      CHECK(st.upper_margin > 0.0);
      CHECK(st.lhs >= 1.0 / st.weight * (1.0 - 1e-12));
      CHECK(1.0 / st.weight >= st.rhs * (1.0 - 1e-12));
    }
  }
}

TEST_CASE("greedy construction refuses n < m") {
  auto trig = std::make_shared<TrigBasis>();
  CHECK_THROWS_AS(GreedyConfig::with_defaults(trig, 8, 4, AuxiliaryFamily::constant()), PreconditionError);
  GreedyConfig cfg = GreedyConfig::with_defaults(trig, 4, 8, AuxiliaryFamily::constant());
  cfg.n = 3;
  CHECK_THROWS_AS(bss_subsample(cfg, Measure::uniform(Domain::circle()), 1), PreconditionError);
  cfg.n = 8;
  cfg.delta *= 2.0;
  CHECK_THROWS_AS(bss_subsample(cfg, Measure::uniform(Domain::circle()), 1), PreconditionError);
}

TEST_CASE("Christoffel suggestions are accepted at rate at least 1/(4m)") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  const std::size_t m = 8, n = 32;
  GreedyConfig cfg = rkhs_tail_config(trig, m, n, 1.5, 1.0, 0.5, mu);
  cfg.delta = cfg.delta - 1.0 / (4.0 * (n + 1.0));
  REQUIRE(cfg.delta > 0.0);
  cfg.probe_draws = 64;
  const GreedyResult res = bss_subsample(cfg, mu, 5);
  double accepted = 0.0;
  double drawn = 0.0;
  for (const auto& st : res.trace) {
    accepted += st.probe_acceptance * cfg.probe_draws;
    drawn += cfg.probe_draws;
  }
  REQUIRE(drawn >= 1000.0);
  CHECK(accepted / drawn >= 1.0 / (4.0 * m));
}

TEST_CASE("unweighted variant") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  const UnweightedResult r = unweighted_subsample(6, 24, trig, mu, OracleKind::Christoffel, 3);
  CHECK(r.holds);
  CHECK(r.lower_bound == doctest::Approx(0.25));
  CHECK(r.certificate.lambda_min >= 0.25);
  for (double w : r.design.weights) CHECK(w == 1.0 / 24.0);
  // Maximal weights are all equal along the way.
  for (double w : r.greedy.design.weights) CHECK(w == doctest::Approx(r.greedy.design.weights.front()).epsilon(1e-9));

  const UnweightedResult one = unweighted_subsample(1, 1, trig, mu, OracleKind::Christoffel, 3);
  CHECK(one.design.size() == 1);
  CHECK(one.design.weights[0] == 1.0);
}

TEST_CASE("candidate list oracle over a grid") {
  auto leg = std::make_shared<LegendreBasis>();
  const Measure mu = Measure::uniform(Domain::unit_interval());
  const std::size_t m = 5;
  std::vector<Point> grid;
  for (std::size_t i = 0; i < 10 * m; ++i) grid.emplace_back((i + 0.5) / (10.0 * m));
  int finished = 0;
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    try {
      const UnweightedResult r = unweighted_subsample(m, 4 * m, leg, mu, OracleKind::CandidateList, seed, grid);
      ++finished;
      CHECK(r.holds);
      for (const auto& x : r.design.points) {
        CHECK(std::find(grid.begin(), grid.end(), x) != grid.end());
      }
    } catch (const OracleExhausted&) {
    }
  }
  MESSAGE("candidate-list runs finished: " << finished << " of 4");
}

TEST_CASE("two-sided bounds with b = a at n = 4m") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  const std::size_t m = 6;
  const GreedyConfig cfg = GreedyConfig::with_defaults(trig, m, 4 * m, AuxiliaryFamily::prefix(trig, m, mu));
  const GreedyResult res = bss_subsample(cfg, mu, 11);
  CHECK(check_discretization(res.design, *trig, m, 0.5, 1.5).holds);
}

TEST_CASE("low-rank and dense upper barriers agree") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  GreedyConfig cfg = rkhs_tail_config(trig, 4, 8, 1.5, 1.0, 0.5, mu);
  const GreedyResult fast = bss_subsample(cfg, mu, 2);
  cfg.force_dense = true;
  const GreedyResult dense = bss_subsample(cfg, mu, 2);
  REQUIRE(fast.design.size() == dense.design.size());
  for (std::size_t i = 0; i < fast.design.size(); ++i) {
    CHECK(fast.design.points[i] == dense.design.points[i]);
    CHECK(fast.design.weights[i] == doctest::Approx(dense.design.weights[i]).epsilon(1e-9));
  }
  for (std::size_t i = 0; i < fast.trace.size(); ++i) {
    CHECK(fast.trace[i].rhs == doctest::Approx(dense.trace[i].rhs).epsilon(1e-8));
  }
}

TEST_CASE("greedy runs are deterministic") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  const GreedyConfig cfg = rkhs_tail_config(trig, 4, 8, 1.5, 1.0, 0.5, mu);
  const GreedyResult a = bss_subsample(cfg, mu, 9);
  const GreedyResult b = bss_subsample(cfg, mu, 9);
  CHECK(a.design.points == b.design.points);
  CHECK(a.design.weights == b.design.weights);
}

TEST_CASE("Monte Carlo J for non-exact settings") {
  auto leg = std::make_shared<LegendreBasis>();
  const Measure tilted = Measure::with_density(Domain::unit_interval(), [](const Point& x) { return 0.5 + x[0]; }, 1.5);
  const AuxiliaryFamily f = AuxiliaryFamily::scaled_tail(leg, 2, {1.0, 0.5}, std::nullopt, tilted, 3, 200'000);
  // J_jk = int b_j b_k (0.5 + x) dx: diagonal entries stay 1 and 1/4 times
  // the orthonormal value, off-diagonal pick up the x-moment.
  CHECK(std::real(f.J(0, 0)) == doctest::Approx(1.0).epsilon(0.02));
  CHECK(std::real(f.J(1, 1)) == doctest::Approx(0.25).epsilon(0.02));
  CHECK(std::abs(f.J(0, 1)) > 0.05);
}

TEST_CASE("error bound for synthetic RKHS functions") {
  auto trig = std::make_shared<TrigBasis>();
  const Measure mu = Measure::uniform(Domain::circle());
  const std::size_t m = 8, n = 16, K = 96;
  std::vector<double> sig(K);
  sig[0] = 1.0;
  for (std::size_t k = 1; k < K; ++k) sig[k] = 1.0 / static_cast<double>(k);
  const GreedyConfig cfg = sigma_tail_config(trig, m, n, sig, mu);
  const GreedyResult res = bss_subsample(cfg, mu, 4);
  LeastSquaresFactorization factor(res.design, *trig, m);
  const double r = (n + 1.0) / m;
  double tail = 0.0;
  for (std::size_t k = m; k < K; ++k) tail += sig[k] * sig[k];
  const double factor_bound = std::sqrt(2.0 * r) / (std::sqrt(r) - 1.0) * (sig[m] + std::sqrt(tail / (r * m)));
  for (std::uint64_t s = 0; s < 20; ++s) {
    const CVector c = rkhs_random_coefficients(sig, s);
    const auto values = TargetFunction::from_coefficients(trig, c).sample(res.design.points);
    double xi_tail = 0.0;
    for (std::size_t k = m; k < K; ++k) xi_tail += std::norm(c[static_cast<Eigen::Index>(k)] / sig[k]);
    CHECK(coefficient_l2_error(c, factor.solve(values)) <= factor_bound * std::sqrt(xi_tail));
  }
}

}
