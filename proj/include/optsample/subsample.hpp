#pragma once

// Greedy barrier construction of points and weights with two-sided
// spectral guarantees.

#include <functional>
#include <optional>
#include <vector>

#include "optsample/leastsq.hpp"

namespace optsample {

/// The finite family b = (b_1, ..., b_N) controlling the upper bound, with
/// J = int b b^* dmu.
struct AuxiliaryFamily {
  std::size_t size = 0;
  std::function<void(const Point&, std::span<Scalar>)> eval;
  CMatrix J;

  /// The constant function 1 under a probability measure: N = 1, J = [[1]].
  static AuxiliaryFamily constant();
  /// (c, scales[0] b_first, scales[1] b_{first+1}, ...); the constant entry
  /// is present iff `constant` is set. J is exact for exactly orthonormal
  /// bases under the uniform measure and Monte Carlo otherwise.
  static AuxiliaryFamily scaled_tail(BasisPtr basis, std::size_t first, std::vector<double> scales,
                                     std::optional<double> constant, const Measure& measure,
                                     std::uint64_t seed = 0, std::size_t mc_budget = 1'000'000);
  /// b = (b_0, ..., b_{m-1}) itself, J = I (exact for exactly orthonormal bases).
  static AuxiliaryFamily prefix(BasisPtr basis, std::size_t m, const Measure& measure,
                                std::uint64_t seed = 0, std::size_t mc_budget = 1'000'000);
};

enum class OracleKind { Christoffel, CandidateList };
enum class WeightChoice { Minimal, Maximal };

struct BarrierParameters {
  double r = 0.0;
  double sigma = 0.0;
  double s = 0.0;
  double delta_star = 0.0;
  double zeta_star = 0.0;
};

BarrierParameters barrier_parameters(std::size_t m, std::size_t n, const CMatrix& J);

struct GreedyConfig {
  BasisPtr a_basis;
  std::size_t m = 0;
  std::size_t n = 0;
  AuxiliaryFamily b;
  double delta = 0.0;
  double zeta = 0.0;
  OracleKind oracle = OracleKind::Christoffel;
  std::vector<Point> candidates;
  std::size_t max_suggestions = 10'000'000;
  WeightChoice weights = WeightChoice::Minimal;
  /// Suggestions drawn per batch; tested in parallel, first acceptable wins.
  std::size_t batch = 16;
  /// Extra Christoffel draws per step used only to estimate the acceptance
  /// probability (recorded in the trace, never accepted).
  std::size_t probe_draws = 0;
  /// Use dense factorizations for the upper barrier even when J is diagonal.
  bool force_dense = false;

  /// Fills delta and zeta with (delta*, zeta*) for the current m, n, b.
  static GreedyConfig with_defaults(BasisPtr a_basis, std::size_t m, std::size_t n,
                                    AuxiliaryFamily b);
};

struct GreedyStep {
  double lhs = 0.0;
  double rhs = 0.0;
  double weight = 0.0;
  /// lambda_min(G - ell I) after the update.
  double lower_margin = 0.0;
  /// Smallest eigenvalue of a matrix that is positive definite iff
  /// u J - Gamma is (the Schur complement in low-rank mode).
  double upper_margin = 0.0;
  std::size_t suggestions = 0;
  double probe_acceptance = -1.0;
};

struct GreedyCertificate {
  BarrierParameters params;
  /// Eigenvalues of sum_i w_i a(x_i) a(x_i)^*.
  SpectralCertificate design;
  /// lambda_min of the accumulated G (including its initial offset).
  double accumulated_lower = 0.0;
  double lower_bound = 0.0;
  /// lambda_max of sum_i w_i b(x_i) b(x_i)^*.
  double upper_value = 0.0;
  double upper_bound = 0.0;
  /// (1 - r)^{-1}.
  double stability_bound = 0.0;
  bool lower_holds = false;
  bool upper_holds = false;
  std::size_t suggestions = 0;
};

struct GreedyResult {
  SampledDesign design;
  GreedyCertificate certificate;
  std::vector<GreedyStep> trace;
};

/// Throws PreconditionError for invalid configurations and OracleExhausted
/// when the suggestion budget or candidate list runs out.
GreedyResult bss_subsample(const GreedyConfig& config, const Measure& measure, std::uint64_t seed);

struct UnweightedResult {
  /// Weights all equal to 1/n.
  SampledDesign design;
  /// Equal-weight Gram on V_m.
  SpectralCertificate certificate;
  /// (1 - sqrt(m/n))^2.
  double lower_bound = 0.0;
  bool holds = false;
  GreedyResult greedy;
};

UnweightedResult unweighted_subsample(std::size_t m, std::size_t n, BasisPtr a_basis,
                                      const Measure& measure, OracleKind oracle,
                                      std::uint64_t seed, std::vector<Point> candidates = {});

/// Number of tail terms: ceil(m^{alpha0 / (alpha0 - theta)} - m), at least 1.
std::size_t rkhs_tail_count(std::size_t m, double alpha0, double theta);

/// a = (b_0..b_{m-1}), b = (c, k^{-t} b_k) for m <= k < m + N with N from
/// rkhs_tail_count and c = m^{-t} + sqrt(sum k^{-2t} / (2m)).
/// Throws PreconditionError unless alpha0 > t > theta >= 1/2 and N <= cap.
GreedyConfig rkhs_tail_config(BasisPtr basis, std::size_t m, std::size_t n, double alpha0,
                              double t, double theta, const Measure& measure,
                              std::size_t cap = 20'000);

/// Tail family (sigma_k b_k) for m <= k < sigmas.size() with (delta*, zeta*).
GreedyConfig sigma_tail_config(BasisPtr basis, std::size_t m, std::size_t n,
                               const std::vector<double>& sigmas, const Measure& measure);

}  // namespace optsample
