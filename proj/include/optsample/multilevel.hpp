#pragma once

// Multilevel Monte Carlo estimation of basis coefficients over dyadic
// levels m_s = 2^s.

#include "optsample/leastsq.hpp"

namespace optsample {

struct MLConfig {
  std::size_t r = 2;
  std::size_t k = 0;
  BasisPtr basis;
  Measure measure = Measure::uniform(Domain::unit_interval());
};

struct MLResult {
  FittedApproximant approximant;
  std::size_t evaluations = 0;
};

/// One level of the estimator: draws r 2^s points from rho_{2^s} dmu and
/// returns (1 / n_s) B_w^* (y - B c[2^s]) with c the current prefix.
CVector ml_level_update(const TargetFunction& f, const MLConfig& config, const CVector& current,
                        std::size_t level, Rng& rng, SampledDesign* used = nullptr);

/// Coefficients over b_0 .. b_{2^k - 1}. Uses sum_s r 2^s evaluations.
MLResult ml_recover(const TargetFunction& f, const MLConfig& config, std::uint64_t seed);

/// r^{-k} sum_{v=-1}^{k} r^v tail(2^v), where tail(m) = ||f - P_m f||_2^2 and
/// tail(1/2) = ||f||_2^2.
double ml_error_bound(std::size_t r, std::size_t k, const std::function<double(double)>& tail);

}  // namespace optsample
