#pragma once

// Cube splitting for scattered points in (0,1)^d, piecewise polynomial
// recovery on the resulting cubes, and point-set quality measures.

#include <array>
#include <functional>
#include <span>
#include <vector>

#include "optsample/model.hpp"

namespace optsample {

/// Dyadic cube [index * 2^-level, (index + 1) * 2^-level)^d.
struct DyadicCube {
  std::array<std::uint32_t, Point::kMaxDim> index{};
  std::uint32_t level = 0;
  std::size_t point_count = 0;

  double side() const;
  double corner(std::size_t axis) const;
  /// Half-open membership.
  bool contains(const Point& x, std::size_t dim) const;
  bool closure_contains(const Point& x, std::size_t dim) const;
};

struct CubeDecomposition {
  std::size_t dim = 1;
  std::size_t ell = 1;
  /// Sorted lexicographically by corner.
  std::vector<DyadicCube> cubes;
  /// Number of split tests performed.
  std::size_t tested = 0;

  bool root_only() const { return cubes.size() == 1 && cubes[0].level == 0; }
};

/// A cube passes when every cell of its (4 ell)^d grid holds a point; passing
/// cubes are replaced by their 2^d children. Cells are half-open.
CubeDecomposition cube_split(std::span<const Point> points, std::size_t ell);

struct CubeInvariantReport {
  bool coverage = false;
  bool disjoint = false;
  bool occupancy = false;
  bool empty_subcube = false;

  bool all() const { return coverage && disjoint && occupancy && empty_subcube; }
};

/// Checks the four decomposition invariants by direct enumeration.
CubeInvariantReport check_cube_invariants(const CubeDecomposition& dec,
                                          std::span<const Point> points);

/// Number of monomials of total degree <= s in d variables.
std::size_t polynomial_dimension(std::size_t s, std::size_t d);

struct LocalPolynomial {
  DyadicCube cube;
  std::size_t degree = 0;
  /// Coefficients over tensor Legendre products P_a(t_1) ... with |a| <= degree,
  /// t mapped affinely from the cube to [-1, 1]^d.
  CVector coefficients;
  std::vector<std::size_t> nodes;
};

class PiecewiseApproximant {
public:
  PiecewiseApproximant(CubeDecomposition decomposition, std::vector<LocalPolynomial> pieces,
                       std::size_t degree);

  /// Zero when the decomposition is the root cube alone. Points on shared
  /// faces use the containing cube with the lexicographically smallest corner.
  Scalar operator()(const Point& x) const;
  Scalar eval_piece(std::size_t j, const Point& x) const;

  const CubeDecomposition& decomposition() const { return decomposition_; }
  const std::vector<LocalPolynomial>& pieces() const { return pieces_; }
  std::size_t degree() const { return degree_; }
  bool is_zero() const { return pieces_.empty(); }
  /// Number of cubes fitted with a lower degree than requested.
  std::size_t degree_fallbacks() const;

private:
  CubeDecomposition decomposition_;
  std::vector<LocalPolynomial> pieces_;
  std::size_t degree_;
};

/// Unweighted least squares of total degree <= s on ell^d nodes per cube.
/// ell = 0 selects the default ell = s + 1.
PiecewiseApproximant piecewise_recover(std::span<const Scalar> values,
                                       std::span<const Point> points, std::size_t s,
                                       std::size_t ell = 0);

/// ||f - A f||_{L_2((0,1)^d)} by tensor Gauss-Legendre quadrature on every
/// cube, refined so no quadrature cell is wider than `max_cell`.
double piecewise_l2_error(const std::function<Scalar(const Point&)>& f,
                          const PiecewiseApproximant& approx, std::size_t gauss_points = 6,
                          double max_cell = 1.0 / 64.0);

/// Sup-norm fill distance: exact on the circle and interval, Monte Carlo
/// maximum over uniform draws on the cube (d >= 2), exact on finite sets.
double covering_radius(std::span<const Point> points, const Domain& domain,
                       std::size_t mc_budget, std::uint64_t seed);

/// ||dist(., P)||_{L_gamma}: exact on the circle and interval, Monte Carlo on
/// the cube; gamma = inf delegates to covering_radius.
double distortion(std::span<const Point> points, double gamma, const Domain& domain,
                  std::size_t mc_budget, std::uint64_t seed);

}  // namespace optsample
