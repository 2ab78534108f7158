#pragma once

// Densities for i.i.d. sampling and the randomized design constructions
// built on them.

#include <functional>
#include <optional>
#include <vector>

#include "optsample/leastsq.hpp"

namespace optsample {

inline constexpr std::size_t kDefaultRejectionTries = 1'000'000;

/// A probability density with respect to the reference measure, with an
/// optional upper bound that enables rejection sampling.
struct DensitySpec {
  enum class Kind { Christoffel, OptimalRkhs, Flat };

  Kind kind = Kind::Flat;
  std::size_t m = 0;
  std::function<double(const Point&)> eval;
  std::optional<double> sup_bound;

  /// Throws PreconditionError when no sup bound is known.
  Point sample(const Measure& measure, Rng& rng,
               std::size_t max_tries = kDefaultRejectionTries) const;
};

DensitySpec flat_density();

/// rho_m(x) = (1/m) sum_{k<m} |b_k(x)|^2.
DensitySpec christoffel_density(BasisPtr basis, std::size_t m);

/// 1/2 (rho_m + sum_{k>=m} s_k^2 |b_k|^2 / sum_{k>=m} s_k^2), where
/// `sigmas` lists s_0, s_1, ... and its length truncates the tail.
/// Throws DegenerateTail when the tail is identically zero.
DensitySpec optimal_rkhs_density(BasisPtr basis, std::size_t m, std::vector<double> sigmas);

/// n i.i.d. draws from density * mu with weights 1 / (n rho(x_i)).
SampledDesign iid_design(const DensitySpec& density, std::size_t n, const Measure& measure,
                         std::uint64_t seed, std::size_t max_tries = kDefaultRejectionTries);

/// ceil(10 m ln(4 m)).
std::size_t conditional_christoffel_size(std::size_t m);

struct ConditionalDesign {
  SampledDesign design;
  SpectralCertificate certificate;
  /// Number of independent point sets drawn, the accepted one included.
  std::size_t redraw_count = 0;
};

/// Redraws Christoffel samples of size conditional_christoffel_size(m) until
/// lambda_min(G) >= 1/2. Throws BudgetExceeded after `redraw_cap` draws.
ConditionalDesign conditional_christoffel_design(BasisPtr basis, std::size_t m,
                                                 const Measure& measure, std::uint64_t seed,
                                                 std::size_t redraw_cap = 64);

/// Randomized barrier construction with oversampling r = n / (m - 1).
/// Requires m >= 2, n >= m and a known Christoffel sup bound.
SampledDesign dolbeault_chkifa_design(BasisPtr basis, std::size_t m, std::size_t n,
                                      const Measure& measure, std::uint64_t seed,
                                      std::size_t max_tries = kDefaultRejectionTries);

}  // namespace optsample
