#include <doctest.h>

#include <cmath>
#include <numbers>

#include "optsample/lipschitz.hpp"
#include "optsample/model.hpp"

using namespace optsample;

TEST_SUITE("lipschitz") {

TEST_CASE("equispaced radius") {
  for (std::size_t n : {1, 2, 7, 10, 64}) {
    const CircleDesign d = CircleDesign::equispaced(n);
    CHECK(exact_radius(d, kInfinity) == doctest::Approx(0.5 / n));
    for (double p : {1.0, 2.0, 5.0}) {
      CHECK(exact_radius(d, p) == doctest::Approx(0.5 * std::pow(1.0 / (1.0 + p), 1.0 / p) / n));
    }
  }
  CHECK(exact_radius(CircleDesign({0.3}), 1.0) == doctest::Approx(0.25));
}

TEST_CASE("optimal error closed form") {
  CHECK(optimal_error(10, kInfinity) == doctest::Approx(0.05));
  CHECK(optimal_error(2, 1.0) == doctest::Approx(0.125));
  for (std::size_t n = 1; n < 50; ++n) {
    for (double p : {1.0, 1.5, 3.0, 10.0, kInfinity}) {
      CHECK(optimal_error(n, p) >= 0.25 / n - 1e-15);
      CHECK(optimal_error(n, p) <= 0.5 / n + 1e-15);
    }
  }
  CHECK_THROWS_AS(optimal_error(0, 1.0), PreconditionError);
}

TEST_CASE("expected radius closed form") {
  CHECK(expected_radius(2, 1.0) == doctest::Approx(1.0 / 6.0));
  CHECK(expected_radius(2, kInfinity) == doctest::Approx(0.375));
  CHECK(expected_radius(8, 1.0) == doctest::Approx(1.0 / 18.0));
}

TEST_CASE("expected radius against simulation") {
  Rng rng(3);
  const int designs = 4000;
  for (double p : {1.0, kInfinity}) {
    double mean = 0.0, m2 = 0.0;
    for (int s = 0; s < designs; ++s) {
      std::vector<double> pts(5);
      for (auto& x : pts) x = uniform01(rng);
      const double v = exact_radius(CircleDesign(pts), p);
      const double delta = v - mean;
      mean += delta / (s + 1);
      m2 += delta * (v - mean);
    }
    CHECK(std::abs(mean - expected_radius(5, p)) <= 3.0 * std::sqrt(m2 / (designs - 1) / designs));
  }
}

TEST_CASE("gaps sum to one and points are sorted modulo one") {
  const CircleDesign d({0.7, 1.2, -0.1, 0.45});
  double total = 0.0;
  for (double g : d.gaps()) {
    CHECK(g >= 0.0);
    total += g;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::is_sorted(d.points().begin(), d.points().end()));
  CHECK(d.points().front() == doctest::Approx(0.2));
}

TEST_CASE("radius against trapezoid integration") {
  const CircleDesign d({0.02, 0.11, 0.4, 0.41, 0.77});
  const std::size_t grid = 200'000;
  for (double p : {1.0, 2.0, 5.0}) {
    double acc = 0.0;
    for (std::size_t i = 0; i < grid; ++i) {
      const double a = std::pow(d.distance_to_set(static_cast<double>(i) / grid), p);
      const double b = std::pow(d.distance_to_set(static_cast<double>(i + 1) / grid), p);
      acc += 0.5 * (a + b) / grid;
    }
    CHECK(std::pow(acc, 1.0 / p) == doctest::Approx(exact_radius(d, p)).epsilon(1e-6));
  }
}

TEST_CASE("adding a point never increases the radius") {
  Rng rng(12);
  std::vector<double> pts{uniform01(rng)};
  for (int step = 0; step < 30; ++step) {
    const CircleDesign before(pts);
    pts.push_back(uniform01(rng));
    const CircleDesign after(pts);
    for (double p : {1.0, 2.0, 4.0, kInfinity}) CHECK(exact_radius(after, p) <= exact_radius(before, p) + 1e-15);
  }
}

TEST_CASE("central reconstruction of zero data") {
  const CircleDesign d({0.1, 0.35, 0.8});
  const CentralReconstruction phi = central_reconstruct(d, {0.0, 0.0, 0.0});
  CHECK(phi.consistent());
  for (int i = 0; i < 100; ++i) {
    const double x = i / 100.0;
    CHECK(phi(x) == doctest::Approx(0.0));
    CHECK(phi.upper(x) == doctest::Approx(d.distance_to_set(x)));
  }
  const CentralReconstruction single = central_reconstruct(CircleDesign({0.5}), {0.0});
  CHECK(single(0.1) == doctest::Approx(0.0));
}

TEST_CASE("central reconstruction interpolates and is 1-Lipschitz") {
  const auto f = [](double x) { return 0.3 * std::sin(2.0 * std::numbers::pi * x) / (2.0 * std::numbers::pi) * 3.0; };
  const CircleDesign d({0.05, 0.2, 0.33, 0.6, 0.61, 0.9});
  std::vector<double> y;
  for (double x : d.points()) y.push_back(f(x));
  const CentralReconstruction phi = central_reconstruct(d, y);
  CHECK(phi.consistent());
  for (std::size_t i = 0; i < d.size(); ++i) CHECK(phi(d.points()[i]) == doctest::Approx(y[i]));
  const std::size_t grid = 2000;
  double worst = 0.0;
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = static_cast<double>(i) / grid;
    const double xn = static_cast<double>(i + 1) / grid;
    CHECK(std::abs(phi(xn) - phi(x)) <= torus_distance(x, xn) + 1e-12);
    CHECK(phi.lower(x) <= phi(x) + 1e-15);
    CHECK(phi(x) <= phi.upper(x) + 1e-15);
    worst = std::max(worst, std::abs(f(x) - phi(x)));
  }
  CHECK(worst <= exact_radius(d, kInfinity) + 1.0 / grid);
}

TEST_CASE("inconsistent data is flagged") {
  const CentralReconstruction phi = central_reconstruct(CircleDesign({0.1, 0.2}), {0.0, 0.5});
  CHECK_FALSE(phi.consistent());
}

TEST_CASE("central reconstruction versus linear spline") {
  // The spline through the data is itself 1-Lipschitz; the central value
  // is never worse than twice the spline's sup error on the fooling function.
  const CircleDesign d({0.0, 0.25, 0.3, 0.7});
  const std::vector<double> y(4, 0.0);
  const CentralReconstruction phi = central_reconstruct(d, y);
  double central = 0.0, spline = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = i / 1000.0;
    const double f = d.distance_to_set(x);
    central = std::max(central, std::abs(f - phi(x)));
    spline = std::max(spline, f);
  }
  CHECK(central <= 2.0 * spline);
  CHECK(central <= exact_radius(d, kInfinity) + 1e-12);
}

}
