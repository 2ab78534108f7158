#include "optsample/subsample.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include "optsample/parallel.hpp"
#include "optsample/random_designs.hpp"

namespace optsample {

namespace {

bool exact_gram_available(const Basis& basis, const Measure& measure) {
  return basis.exactly_orthonormal() && !measure.has_density() &&
         measure.domain().kind() != DomainKind::FiniteSet;
}

CMatrix monte_carlo_J(const AuxiliaryFamily& family, const Measure& measure, std::uint64_t seed,
                      std::size_t budget) {
  const auto n = static_cast<Eigen::Index>(family.size);
  constexpr Eigen::Index kChunk = 256;
  Rng rng(seed);
  CMatrix acc = CMatrix::Zero(n, n);
  CMatrix block(n, kChunk);
  std::size_t done = 0;
  while (done < budget) {
    const auto cols = static_cast<Eigen::Index>(std::min<std::size_t>(kChunk, budget - done));
    for (Eigen::Index c = 0; c < cols; ++c) {
      family.eval(measure.sample(rng), std::span<Scalar>(block.col(c).data(), family.size));
    }
    acc.noalias() += block.leftCols(cols) * block.leftCols(cols).adjoint();
    done += static_cast<std::size_t>(cols);
  }
  acc /= static_cast<double>(budget);
  return 0.5 * (acc + acc.adjoint());
}

}  // namespace

AuxiliaryFamily AuxiliaryFamily::constant() {
  AuxiliaryFamily f;
  f.size = 1;
  f.eval = [](const Point&, std::span<Scalar> out) { out[0] = 1.0; };
  f.J = CMatrix::Ones(1, 1);
  return f;
}

AuxiliaryFamily AuxiliaryFamily::scaled_tail(BasisPtr basis, std::size_t first,
                                             std::vector<double> scales,
                                             std::optional<double> constant,
                                             const Measure& measure, std::uint64_t seed,
                                             std::size_t mc_budget) {
  if (scales.empty()) throw PreconditionError("tail family needs at least one element");
  basis->check_index(first + scales.size() - 1);
  const std::size_t offset = constant ? 1 : 0;
  const std::size_t count = scales.size();
  AuxiliaryFamily f;
  f.size = count + offset;
  const double c = constant.value_or(0.0);
  f.eval = [basis, first, count, offset, c, s = scales](const Point& x, std::span<Scalar> out) {
    if (offset) out[0] = c;
    basis->eval_block(first, out.subspan(offset, count), x);
    for (std::size_t k = 0; k < count; ++k) out[offset + k] *= s[k];
  };
  const auto cidx = basis->constant_index();
  const bool constant_orthogonal = !constant || (cidx && *cidx < first);
  if (exact_gram_available(*basis, measure) && constant_orthogonal) {
    RVector diag(static_cast<Eigen::Index>(f.size));
    if (offset) diag[0] = c * c;
    for (std::size_t k = 0; k < count; ++k) {
      diag[static_cast<Eigen::Index>(offset + k)] = scales[k] * scales[k];
    }
    f.J = diag.cast<Scalar>().asDiagonal();
  } else {
    f.J = monte_carlo_J(f, measure, seed, mc_budget);
  }
  return f;
}

AuxiliaryFamily AuxiliaryFamily::prefix(BasisPtr basis, std::size_t m, const Measure& measure,
                                        std::uint64_t seed, std::size_t mc_budget) {
  return scaled_tail(std::move(basis), 0, std::vector<double>(m, 1.0), std::nullopt, measure,
                     seed, mc_budget);
}

BarrierParameters barrier_parameters(std::size_t m, std::size_t n, const CMatrix& J) {
  if (m == 0) throw PreconditionError("m must be at least 1");
  if (n < m) throw PreconditionError("greedy construction needs n >= m");
  if (J.rows() == 0 || J.rows() != J.cols()) throw PreconditionError("J must be square, non-empty");
  BarrierParameters p;
  const double nd = static_cast<double>(n);
  p.r = std::sqrt(static_cast<double>(m) / (nd + 1.0));
  Eigen::SelfAdjointEigenSolver<CMatrix> eig(J, Eigen::EigenvaluesOnly);
  p.sigma = std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
  p.s = std::sqrt(std::max(0.0, J.trace().real()) / nd);
  p.delta_star = (1.0 - p.r) / (nd + 1.0);
  p.zeta_star = (p.sigma + p.s) / (p.sigma * nd);
  return p;
}

GreedyConfig GreedyConfig::with_defaults(BasisPtr a_basis, std::size_t m, std::size_t n,
                                         AuxiliaryFamily b) {
  GreedyConfig c;
  const BarrierParameters p = barrier_parameters(m, n, b.J);
  c.a_basis = std::move(a_basis);
  c.m = m;
  c.n = n;
  c.b = std::move(b);
  c.delta = p.delta_star;
  c.zeta = p.zeta_star;
  return c;
}

namespace {

/// (G - ell I)^{-1} side: V = L_d^2 / Tr(L_d - L) - L_d in the eigenbasis of G.
class LowerBarrier {
public:
  LowerBarrier(std::size_t m, double offset)
      : g_(CMatrix::Identity(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) *
           offset) {}

  void prepare(double ell, double delta) {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(g_);
    q_ = eig.eigenvectors();
    const RVector lam = eig.eigenvalues();
    if ((lam.array() - ell - delta).minCoeff() <= 0.0) {
      throw NonConvergence("lower barrier left the positive definite cone");
    }
    const RVector l = (lam.array() - ell).inverse();
    const RVector ld = (lam.array() - ell - delta).inverse();
    const double gap = (ld - l).sum();
    v_ = ld.array().square() / gap - ld.array();
  }

  double lhs(const CVector& a) const {
    const CVector proj = q_.adjoint() * a;
    double acc = 0.0;
    for (Eigen::Index j = 0; j < proj.size(); ++j) acc += v_[j] * std::norm(proj[j]);
    return acc;
  }

  void add(const CVector& a, double w) { g_.noalias() += w * a * a.adjoint(); }

  double min_eigenvalue() const {
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(g_, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }

  const CMatrix& g() const { return g_; }

private:
  CMatrix g_;
  CMatrix q_;
  RVector v_;
};

/// (u J - Gamma)^{-1} side with Gamma = -c0 I + C C^*. For diagonal J the
/// inverse is applied through the Woodbury identity, otherwise densely.
class UpperBarrier {
public:
  UpperBarrier(const CMatrix& j, double c0, bool dense)
      : j_(j), c0_(c0), dense_(dense), n_(j.rows()), c_(n_, 0) {
    if (!dense_) jdiag_ = j_.diagonal().real();
  }

  void add(const CVector& b, double w) {
    c_.conservativeResize(Eigen::NoChange, c_.cols() + 1);
    c_.col(c_.cols() - 1) = std::sqrt(w) * b;
  }

  void prepare(double u, double zeta) {
    const double t0 = trace_j_inverse(u, nullptr);
    const double t1 = trace_j_inverse(u + zeta, &state_);
    tau_ = t0 - t1;
    if (!(tau_ > 0.0)) throw NonConvergence("upper barrier potential did not decrease");
  }

  double rhs(const CVector& b) const {
    CVector y;
    if (dense_) {
      y = state_.llt.solve(b);
    } else {
      const CVector t = state_.dinv.cwiseProduct(b);
      y = t;
      if (c_.cols() > 0) y.noalias() += state_.e * state_.k_llt.solve(c_.adjoint() * t);
    }
    double yjy;
    if (dense_) {
      yjy = std::real(y.dot(j_ * y));
    } else {
      yjy = (jdiag_.array() * y.array().abs2()).sum();
    }
    return yjy / tau_ + std::real(b.dot(y));
  }

  /// Positive iff u J - Gamma is positive definite.
  double margin(double u) const {
    if (dense_) {
      Eigen::SelfAdjointEigenSolver<CMatrix> eig(matrix(u), Eigen::EigenvaluesOnly);
      return eig.eigenvalues().minCoeff();
    }
    if (c_.cols() == 0) return 1.0;
    const RVector dinv = (u * jdiag_.array() + c0_).inverse();
    CMatrix k = CMatrix::Identity(c_.cols(), c_.cols()) - c_.adjoint() * dinv.asDiagonal() * c_;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(k, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff();
  }

  /// lambda_max(C C^*) = lambda_max(C^* C).
  double accumulated_max() const {
    if (c_.cols() == 0) return 0.0;
    CMatrix small = c_.adjoint() * c_;
    Eigen::SelfAdjointEigenSolver<CMatrix> eig(small, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().maxCoeff();
  }

private:
  struct State {
    Eigen::LLT<CMatrix> llt;
    RVector dinv;
    CMatrix e;
    Eigen::LLT<CMatrix> k_llt;
  };

  CMatrix matrix(double u) const {
    CMatrix m = u * j_ - c_ * c_.adjoint();
    m.diagonal().array() += c0_;
    return m;
  }

  double trace_j_inverse(double u, State* keep) const {
    if (dense_) {
      Eigen::LLT<CMatrix> llt(matrix(u));
      if (llt.info() != Eigen::Success) {
        throw NonConvergence("upper barrier left the positive definite cone");
      }
      const double tr = llt.solve(j_).trace().real();
      if (keep) keep->llt = std::move(llt);
      return tr;
    }
    const RVector dinv = (u * jdiag_.array() + c0_).inverse();
    double tr = (jdiag_.array() * dinv.array()).sum();
    if (c_.cols() > 0) {
      CMatrix e = dinv.asDiagonal() * c_;
      CMatrix k = CMatrix::Identity(c_.cols(), c_.cols()) - c_.adjoint() * e;
      Eigen::LLT<CMatrix> k_llt(k);
      if (k_llt.info() != Eigen::Success) {
        throw NonConvergence("upper barrier left the positive definite cone");
      }
      const CMatrix je = jdiag_.asDiagonal() * e;
      tr += k_llt.solve(e.adjoint() * je).trace().real();
      if (keep) {
        keep->e = std::move(e);
        keep->k_llt = std::move(k_llt);
      }
    }
    if (keep) keep->dinv = dinv;
    return tr;
  }

  CMatrix j_;
  RVector jdiag_;
  double c0_;
  bool dense_;
  Eigen::Index n_;
  CMatrix c_;
  State state_;
  double tau_ = 0.0;
};

class SuggestionSource {
public:
  SuggestionSource(const GreedyConfig& cfg, const Measure& measure, Rng& rng)
      : cfg_(cfg), measure_(measure), rng_(rng) {
    if (cfg.oracle == OracleKind::Christoffel) {
      density_ = christoffel_density(cfg.a_basis, cfg.m);
      if (!density_.sup_bound) {
        throw PreconditionError("Christoffel oracle needs a known sup of the Christoffel density");
      }
    } else {
      if (cfg.candidates.empty()) throw PreconditionError("candidate-list oracle needs candidates");
      order_.resize(cfg.candidates.size());
      for (std::size_t i = 0; i < order_.size(); ++i) order_[i] = i;
      std::shuffle(order_.begin(), order_.end(), rng_);
    }
  }

  bool christoffel() const { return cfg_.oracle == OracleKind::Christoffel; }

  /// Next `count` suggestions without consuming candidate-list positions.
  std::vector<Point> peek(std::size_t count) {
    std::vector<Point> out;
    out.reserve(count);
    if (christoffel()) {
      for (std::size_t i = 0; i < count; ++i) out.push_back(density_.sample(measure_, rng_));
    } else {
      for (std::size_t i = 0; i < count; ++i) {
        out.push_back(cfg_.candidates[order_[(cursor_ + i) % order_.size()]]);
      }
    }
    return out;
  }

  void consume(std::size_t used) {
    if (!christoffel()) cursor_ = (cursor_ + used) % order_.size();
  }

  std::size_t list_size() const { return order_.size(); }

private:
  const GreedyConfig& cfg_;
  const Measure& measure_;
  Rng& rng_;
  DensitySpec density_;
  std::vector<std::size_t> order_;
  std::size_t cursor_ = 0;
};

void validate(const GreedyConfig& cfg) {
  if (!cfg.a_basis) throw PreconditionError("greedy config needs a basis");
  if (cfg.m == 0) throw PreconditionError("m must be at least 1");
  if (cfg.n < cfg.m) throw PreconditionError("greedy construction needs n >= m");
  cfg.a_basis->check_index(cfg.m - 1);
  if (cfg.b.size == 0 || !cfg.b.eval) throw PreconditionError("auxiliary family is empty");
  if (static_cast<std::size_t>(cfg.b.J.rows()) != cfg.b.size) {
    throw PreconditionError("J does not match the auxiliary family size");
  }
  const BarrierParameters p = barrier_parameters(cfg.m, cfg.n, cfg.b.J);
  if (!(cfg.delta > 0.0) || cfg.delta > p.delta_star * (1.0 + 1e-12)) {
    throw PreconditionError("delta must lie in (0, delta*]");
  }
  if (!(cfg.zeta >= p.zeta_star * (1.0 - 1e-12))) throw PreconditionError("zeta must be >= zeta*");
  if (cfg.batch == 0) throw PreconditionError("batch size must be positive");
}

}  // namespace

GreedyResult bss_subsample(const GreedyConfig& cfg, const Measure& measure, std::uint64_t seed) {
  validate(cfg);
  const BarrierParameters p = barrier_parameters(cfg.m, cfg.n, cfg.b.J);
  const std::size_t m = cfg.m;
  const std::size_t big_n = cfg.b.size;
  const double offset = p.r * (1.0 - p.r);

  const bool diagonal = cfg.b.J.isDiagonal(0.0);
  LowerBarrier lower(m, offset);
  UpperBarrier upper(cfg.b.J, p.s * (p.sigma + p.s), cfg.force_dense || !diagonal);

  Rng rng(seed);
  Rng probe_rng(derive_seed(seed, 0x70726f6265ULL));
  SuggestionSource source(cfg, measure, rng);
  std::optional<SuggestionSource> probe_source;
  if (cfg.probe_draws > 0 && source.christoffel()) probe_source.emplace(cfg, measure, probe_rng);

  auto eval_a = [&](const Point& x) {
    CVector a(static_cast<Eigen::Index>(m));
    cfg.a_basis->eval_block(0, std::span<Scalar>(a.data(), m), x);
    return a;
  };
  auto eval_b = [&](const Point& x) {
    CVector b(static_cast<Eigen::Index>(big_n));
    cfg.b.eval(x, std::span<Scalar>(b.data(), big_n));
    return b;
  };

  GreedyResult result;
  result.design.points.reserve(cfg.n);
  result.design.weights.reserve(cfg.n);
  result.trace.reserve(cfg.n);
  double ell = 0.0;
  double u = 0.0;
  std::size_t total = 0;

  for (std::size_t i = 0; i < cfg.n; ++i) {
    lower.prepare(ell, cfg.delta);
    upper.prepare(u, cfg.zeta);
    GreedyStep step;

    if (probe_source) {
      const std::vector<Point> probes = probe_source->peek(cfg.probe_draws);
      std::size_t ok = 0;
      for (const auto& x : probes) {
        const double l = lower.lhs(eval_a(x));
        if (l > 0.0 && l >= upper.rhs(eval_b(x))) ++ok;
      }
      step.probe_acceptance = static_cast<double>(ok) / static_cast<double>(probes.size());
    }

    std::size_t consecutive_rejects = 0;
    bool accepted = false;
    Point chosen;
    CVector a_chosen;
    CVector b_chosen;
    while (!accepted) {
      if (total >= cfg.max_suggestions) {
        throw OracleExhausted("suggestion budget of " + std::to_string(cfg.max_suggestions) +
                              " exhausted after " + std::to_string(i) + " acceptances");
      }
      const std::size_t count = std::min(cfg.batch, cfg.max_suggestions - total);
      const std::vector<Point> batch = source.peek(count);
      std::vector<double> lhs(count);
      std::vector<double> rhs(count);
      parallel_for(count, [&](std::size_t j) {
        lhs[j] = lower.lhs(eval_a(batch[j]));
        rhs[j] = upper.rhs(eval_b(batch[j]));
      });
      std::size_t used = count;
      for (std::size_t j = 0; j < count; ++j) {
        ++total;
        ++step.suggestions;
        if (lhs[j] > 0.0 && lhs[j] >= rhs[j]) {
          accepted = true;
          chosen = batch[j];
          step.lhs = lhs[j];
          step.rhs = rhs[j];
          used = j + 1;
          break;
        }
        ++consecutive_rejects;
        if (!source.christoffel() && consecutive_rejects >= source.list_size()) {
          throw OracleExhausted("no candidate accepted during a full pass over " +
                                std::to_string(source.list_size()) + " candidates after " +
                                std::to_string(i) + " acceptances");
        }
      }
      source.consume(used);
    }

    const double inv_w = (cfg.weights == WeightChoice::Maximal && step.rhs > 0.0) ? step.rhs
                                                                                  : step.lhs;
    step.weight = 1.0 / inv_w;
    a_chosen = eval_a(chosen);
    b_chosen = eval_b(chosen);
    lower.add(a_chosen, step.weight);
    upper.add(b_chosen, step.weight);
    ell += cfg.delta;
    u += cfg.zeta;
    step.lower_margin = lower.min_eigenvalue() - ell;
    step.upper_margin = upper.margin(u);
    result.design.points.push_back(chosen);
    result.design.weights.push_back(step.weight);
    result.trace.push_back(step);
  }

  GreedyCertificate& cert = result.certificate;
  cert.params = p;
  CMatrix design_gram = lower.g();
  design_gram.diagonal().array() -= offset;
  cert.design = certify(design_gram);
  cert.accumulated_lower = lower.min_eigenvalue();
  cert.lower_bound = static_cast<double>(cfg.n + 1) * cfg.delta;
  cert.upper_value = upper.accumulated_max();
  cert.upper_bound = static_cast<double>(cfg.n) * cfg.zeta * p.sigma * p.sigma + p.s * (p.sigma + p.s);
  cert.stability_bound = 1.0 / (1.0 - p.r);
  cert.lower_holds = cert.accumulated_lower >= cert.lower_bound * (1.0 - 1e-12);
  cert.upper_holds = cert.upper_value <= cert.upper_bound * (1.0 + 1e-12);
  cert.suggestions = total;
  return result;
}

UnweightedResult unweighted_subsample(std::size_t m, std::size_t n, BasisPtr a_basis,
                                      const Measure& measure, OracleKind oracle,
                                      std::uint64_t seed, std::vector<Point> candidates) {
  GreedyConfig cfg = GreedyConfig::with_defaults(a_basis, m, n, AuxiliaryFamily::constant());
  cfg.oracle = oracle;
  cfg.candidates = std::move(candidates);
  cfg.weights = WeightChoice::Maximal;
  UnweightedResult out;
  out.greedy = bss_subsample(cfg, measure, seed);
  out.design = SampledDesign::equal_weights(out.greedy.design.points, 1.0 / static_cast<double>(n));
  out.certificate = stability_constant(out.design, *a_basis, m);
  const double root = 1.0 - std::sqrt(static_cast<double>(m) / static_cast<double>(n));
  out.lower_bound = root * root;
  out.holds = out.certificate.lambda_min >= out.lower_bound * (1.0 - 1e-12);
  return out;
}

std::size_t rkhs_tail_count(std::size_t m, double alpha0, double theta) {
  const double md = static_cast<double>(m);
  const double v = std::pow(md, alpha0 / (alpha0 - theta)) - md;
  return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(v - 1e-9)));
}

GreedyConfig rkhs_tail_config(BasisPtr basis, std::size_t m, std::size_t n, double alpha0,
                              double t, double theta, const Measure& measure, std::size_t cap) {
  if (!(theta >= 0.5)) throw PreconditionError("theta must be at least 1/2");
  if (!(t > theta)) throw PreconditionError("t must exceed theta");
  if (!(alpha0 > t)) throw PreconditionError("alpha0 must exceed t");
  if (m == 0) throw PreconditionError("m must be at least 1");
  const std::size_t count = rkhs_tail_count(m, alpha0, theta);
  if (count > cap) {
    throw PreconditionError("tail dimension " + std::to_string(count) + " exceeds cap " +
                            std::to_string(cap));
  }
  std::vector<double> scales(count);
  double tail = 0.0;
  for (std::size_t j = 0; j < count; ++j) {
    const double k = static_cast<double>(m + j);
    scales[j] = std::pow(k, -t);
    tail += scales[j] * scales[j];
  }
  const double c = std::pow(static_cast<double>(m), -t) +
                   std::sqrt(tail / (2.0 * static_cast<double>(m)));
  AuxiliaryFamily b = AuxiliaryFamily::scaled_tail(basis, m, std::move(scales), c, measure);
  return GreedyConfig::with_defaults(std::move(basis), m, n, std::move(b));
}

GreedyConfig sigma_tail_config(BasisPtr basis, std::size_t m, std::size_t n,
                               const std::vector<double>& sigmas, const Measure& measure) {
  if (sigmas.size() <= m) throw DegenerateTail("no singular values beyond index m");
  std::vector<double> tail(sigmas.begin() + static_cast<std::ptrdiff_t>(m), sigmas.end());
  AuxiliaryFamily b = AuxiliaryFamily::scaled_tail(basis, m, std::move(tail), std::nullopt, measure);
  return GreedyConfig::with_defaults(std::move(basis), m, n, std::move(b));
}

}  // namespace optsample
