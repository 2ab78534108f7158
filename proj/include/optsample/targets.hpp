#pragma once

// Synthetic target functions with known coefficients or closed-form norms.

#include <vector>

#include "optsample/model.hpp"

namespace optsample {

/// c_0 = 1 and |c_k|^2 = k^{-2 alpha} - (k+1)^{-2 alpha} for 1 <= k < K with
/// random signs, so ||f - P_m f||_2^2 = m^{-2 alpha} - K^{-2 alpha}.
CVector decay_coefficients(double alpha, std::size_t K, std::uint64_t seed);

/// sigma_k xi_k with xi uniform in the real unit ball of dimension sigmas.size().
CVector rkhs_random_coefficients(const std::vector<double>& sigmas, std::uint64_t seed);

/// m nonzero complex Gaussian entries at a uniformly random support in [0, N).
CVector sparse_coefficients(std::size_t m, std::size_t N, std::uint64_t seed);

/// sum_{k >= m} |c_k|^2.
double tail_energy(const CVector& coefficients, std::size_t m);

/// f = sum_k c_k b_k over the given basis.
TargetFunction trig_decay(BasisPtr basis, double alpha, std::size_t K, std::uint64_t seed);

/// Circle hat max(0, width - dist(x, center)); 1-Lipschitz.
TargetFunction lipschitz_hat(double center, double width);

/// sum_{j=0}^{levels} 4^{-j} cos(2 pi 2^j x): second differences of size h^2
/// at every scale, nowhere twice differentiable.
TargetFunction lacunary(std::size_t levels);

}  // namespace optsample
