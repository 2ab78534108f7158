#include "optsample/lipschitz.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "optsample/kernels.hpp"
#include "optsample/model.hpp"

namespace optsample {

CircleDesign::CircleDesign(std::vector<double> points) : points_(std::move(points)) {
  if (points_.empty()) throw PreconditionError("circle design needs at least one point");
  for (double& x : points_) {
    if (!std::isfinite(x)) throw PreconditionError("circle points must be finite");
    x -= std::floor(x);
    if (x >= 1.0) x = 0.0;
  }
  std::sort(points_.begin(), points_.end());
  const std::size_t n = points_.size();
  gaps_.resize(n);
  for (std::size_t i = 0; i + 1 < n; ++i) gaps_[i] = points_[i + 1] - points_[i];
  gaps_[n - 1] = 1.0 - points_[n - 1] + points_[0];
  const double total = std::accumulate(gaps_.begin(), gaps_.end(), 0.0);
  for (double& g : gaps_) g /= total;
}

CircleDesign CircleDesign::equispaced(std::size_t n) {
  if (n == 0) throw PreconditionError("circle design needs at least one point");
  std::vector<double> pts(n);
  for (std::size_t i = 0; i < n; ++i) pts[i] = static_cast<double>(i) / static_cast<double>(n);
  return CircleDesign(std::move(pts));
}

double CircleDesign::distance_to_set(double x) const {
  return kernels::active().min_torus_distance(x - std::floor(x), points_.data(), points_.size());
}

double exact_radius(const CircleDesign& design, double p) {
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  if (std::isinf(p)) return 0.5 * *std::max_element(design.gaps().begin(), design.gaps().end());
  double acc = 0.0;
  for (double g : design.gaps()) acc += 2.0 * std::pow(0.5 * g, p + 1.0) / (p + 1.0);
  return std::pow(acc, 1.0 / p);
}

double optimal_error(std::size_t n, double p) {
  if (n == 0) throw PreconditionError("n must be at least 1");
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  const double nd = static_cast<double>(n);
  if (std::isinf(p)) return 0.5 / nd;
  return 0.5 * std::pow(1.0 / (1.0 + p), 1.0 / p) / nd;
}

double expected_radius(std::size_t n, double p) {
  if (n == 0) throw PreconditionError("n must be at least 1");
  if (!(p >= 1.0)) throw PreconditionError("p must be at least 1");
  const double nd = static_cast<double>(n);
  if (std::isinf(p)) {
    double harmonic = 0.0;
    for (std::size_t i = n; i >= 1; --i) harmonic += 1.0 / static_cast<double>(i);
    return harmonic / (2.0 * nd);
  }
  double log_ratio = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    const double id = static_cast<double>(i);
    log_ratio += std::log(id) - std::log(p + id);
  }
  return 0.5 * std::exp(log_ratio / p);
}

CentralReconstruction::CentralReconstruction(CircleDesign design, std::vector<double> values)
    : design_(std::move(design)), values_(std::move(values)) {
  if (values_.size() != design_.size()) {
    throw PreconditionError("one value per design point is required");
  }
  const auto& x = design_.points();
  for (std::size_t i = 0; i < x.size() && consistent_; ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      if (std::abs(values_[i] - values_[j]) > torus_distance(x[i], x[j]) + 1e-12) {
        consistent_ = false;
        break;
      }
    }
  }
}

double CentralReconstruction::upper(double x) const {
  const auto& pts = design_.points();
  double best = kInfinity;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    best = std::min(best, values_[i] + torus_distance(x, pts[i]));
  }
  return best;
}

double CentralReconstruction::lower(double x) const {
  const auto& pts = design_.points();
  double best = -kInfinity;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    best = std::max(best, values_[i] - torus_distance(x, pts[i]));
  }
  return best;
}

double CentralReconstruction::operator()(double x) const { return 0.5 * (upper(x) + lower(x)); }

CentralReconstruction central_reconstruct(const CircleDesign& design, std::vector<double> values) {
  return CentralReconstruction(design, std::move(values));
}

}  // namespace optsample
