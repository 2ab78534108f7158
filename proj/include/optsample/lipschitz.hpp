#pragma once

// Closed-form ground truth for 1-Lipschitz functions on the circle.

#include <limits>
#include <vector>

#include "optsample/core.hpp"

namespace optsample {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Sorted points on [0, 1) with wrap-around gaps summing to 1.
class CircleDesign {
public:
  /// Points are reduced modulo 1 and sorted. Throws on an empty set.
  explicit CircleDesign(std::vector<double> points);
  static CircleDesign equispaced(std::size_t n);

  const std::vector<double>& points() const { return points_; }
  /// gaps()[i] is the arc from points()[i] to the next point.
  const std::vector<double>& gaps() const { return gaps_; }
  std::size_t size() const { return points_.size(); }
  double distance_to_set(double x) const;

private:
  std::vector<double> points_;
  std::vector<double> gaps_;
};

/// ||dist(., P_n)||_p: half the largest gap for p = inf, otherwise
/// (sum_g 2 (g/2)^{p+1} / (p+1))^{1/p}.
double exact_radius(const CircleDesign& design, double p);

/// 1/(2n) for p = inf, (1/2) (1/(1+p))^{1/p} / n otherwise.
double optimal_error(std::size_t n, double p);

/// Expected exact_radius for n i.i.d. uniform points:
/// H_n / (2n) for p = inf, (1/2) (n! / ((p+1)...(p+n)))^{1/p} otherwise.
double expected_radius(std::size_t n, double p);

/// Phi*(x) = (h+(x) + h-(x)) / 2 with h+- = min/max_i (y_i +- dist(x, x_i)).
class CentralReconstruction {
public:
  /// values[i] belongs to design.points()[i] (sorted order).
  CentralReconstruction(CircleDesign design, std::vector<double> values);

  double operator()(double x) const;
  double upper(double x) const;
  double lower(double x) const;
  /// False when some pair violates |y_i - y_j| <= dist(x_i, x_j).
  bool consistent() const { return consistent_; }
  const CircleDesign& design() const { return design_; }

private:
  CircleDesign design_;
  std::vector<double> values_;
  bool consistent_ = true;
};

CentralReconstruction central_reconstruct(const CircleDesign& design, std::vector<double> values);

}  // namespace optsample
