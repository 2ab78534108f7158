// optsample command-line harness: designs, recovery, benchmarks, rate
// tables and closed-form oracles.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "optsample/io.hpp"
#include "optsample/lipschitz.hpp"
#include "optsample/multilevel.hpp"
#include "optsample/parallel.hpp"
#include "optsample/random_designs.hpp"
#include "optsample/rates.hpp"
#include "optsample/scattered.hpp"
#include "optsample/sparse.hpp"
#include "optsample/subsample.hpp"
#include "optsample/targets.hpp"

using namespace optsample;
using nlohmann::json;

namespace {

constexpr int kExitMethodFailure = 2;
constexpr int kExitConfigError = 3;

struct Common {
  std::string basis = "trig";
  std::string table;
  std::uint64_t seed = 1;
  std::size_t mc_budget = 100'000;
  std::string report;
};

struct Timer {
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
};

bool g_timing = false;

std::uint64_t resolve_seed(std::uint64_t configured) {
  const char* env = std::getenv("OPTSAMPLE_SEED");
  if (env == nullptr) return configured;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used);
    if (used != std::string(env).size()) throw std::invalid_argument(env);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(std::string("OPTSAMPLE_SEED is not an unsigned integer: ") + env);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

double parse_number(const std::string& s, const std::string& what) {
  if (s == "inf" || s == "infinity") return kInfinity;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(what + ": not a number: '" + s + "'");
  }
}

/// name[:arg[:arg]]: trig-decay:ALPHA[:K], sobolev:S, rkhs-random[:K],
/// lipschitz-hat[:CENTER:WIDTH], sparse:M:N, lacunary[:LEVELS].
TargetFunction make_target(const std::string& spec, const BasisPtr& basis, std::uint64_t seed) {
  const auto parts = split(spec, ':');
  if (parts.empty()) throw ConfigError("empty target specification");
  const std::string& name = parts[0];
  auto arg = [&](std::size_t i, double fallback) {
    return parts.size() > i ? parse_number(parts[i], "target " + name) : fallback;
  };
  auto count = [&](std::size_t i, double fallback) {
    const double v = arg(i, fallback);
    if (!(v >= 1.0) || v != std::floor(v)) throw ConfigError("target " + name + ": expected a positive integer");
    return static_cast<std::size_t>(v);
  };
  if (name == "trig-decay") {
    if (parts.size() < 2) throw ConfigError("trig-decay needs an exponent, e.g. trig-decay:1.5");
    return trig_decay(basis, arg(1, 0.0), count(2, 1024), seed);
  }
  if (name == "sobolev") {
    if (parts.size() < 2) throw ConfigError("sobolev needs a smoothness, e.g. sobolev:1");
    const double s = arg(1, 0.0);
    const std::size_t K = count(2, 4096);
    Rng rng(seed);
    CVector c(static_cast<Eigen::Index>(K));
    c[0] = 1.0;
    for (std::size_t k = 1; k < K; ++k) {
      const double sign = (rng() & 1U) ? 1.0 : -1.0;
      c[static_cast<Eigen::Index>(k)] = sign * std::pow(static_cast<double>(k), -s - 0.5);
    }
    return TargetFunction::from_coefficients(basis, c);
  }
  if (name == "rkhs-random") {
    const std::size_t K = count(1, 512);
    std::vector<double> sig(K);
    sig[0] = 1.0;
    for (std::size_t k = 1; k < K; ++k) sig[k] = 1.0 / static_cast<double>(k);
    return TargetFunction::from_coefficients(basis, rkhs_random_coefficients(sig, seed));
  }
  if (name == "lipschitz-hat") return lipschitz_hat(arg(1, 0.5), arg(2, 0.25));
  if (name == "sparse") {
    if (parts.size() < 3) throw ConfigError("sparse needs M and N, e.g. sparse:3:32");
    return TargetFunction::from_coefficients(basis, sparse_coefficients(count(1, 0), count(2, 0), seed));
  }
  if (name == "lacunary") return lacunary(count(1, 15));
  throw ConfigError("unknown target '" + name + "'");
}

/// L2 by Parseval when both sides are exact expansions, Monte Carlo otherwise.
json function_errors(const TargetFunction& f, const FittedApproximant& approx, const Basis& basis,
                     const Measure& measure, std::size_t budget, std::uint64_t seed) {
  json out;
  if (f.exact_coefficients() && basis.exactly_orthonormal() &&
      measure.domain().kind() == basis.domain().kind() && !measure.has_density()) {
    out["L2"] = coefficient_l2_error(*f.exact_coefficients(), approx.coefficients);
    out["L2_method"] = "parseval";
  } else {
    out["L2"] = lp_error(f, approx, 2.0, measure, budget, seed);
    out["L2_method"] = "monte-carlo";
  }
  out["Linf_estimate"] = lp_error(f, approx, kInfinity, measure, budget, seed);
  return out;
}

json check(const std::string& name, bool holds, double value, double bound) {
  return {{"name", name}, {"holds", holds}, {"value", value}, {"bound", bound}};
}

void emit(const json& report, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << report.dump(2) << '\n';
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  out << report.dump(2) << '\n';
}

void emit_design(const SampledDesign& design, const std::string& path) {
  if (path.empty() || path == "-") {
    write_design_csv(std::cout, design);
    return;
  }
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_design_csv(out, design);
}

SampledDesign load_design(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read design " + path);
  return read_design_csv(in);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw ConfigError(message);
}

// ---------------------------------------------------------------- design

struct DesignArgs {
  std::string method = "greedy";
  std::size_t m = 0;
  std::size_t n = 0;
  double alpha0 = 1.5;
  double t = 1.0;
  double theta = 0.5;
  std::string oracle = "christoffel";
  std::string out;
  std::string certificate;
};

json design_certificate_random(const SampledDesign& d, const Basis& basis, std::size_t m) {
  json cert;
  cert["gram"] = to_json(stability_constant(d, basis, m));
  return cert;
}

int run_design(const Common& c, const DesignArgs& a) {
  const Timer timer;
  require(a.m >= 1, "--m must be at least 1");
  const BasisPtr basis = make_basis(c.basis, c.table);
  const Measure mu = Measure::uniform(basis->domain());
  const std::uint64_t seed = resolve_seed(c.seed);
  SampledDesign design;
  json cert;
  cert["method"] = a.method;
  cert["basis"] = c.basis;
  cert["m"] = a.m;
  cert["seed"] = seed;

  if (a.method == "greedy") {
    require(a.n >= a.m, "greedy design needs n >= m (got n = " + std::to_string(a.n) +
                            ", m = " + std::to_string(a.m) + ")");
    const GreedyConfig cfg = rkhs_tail_config(basis, a.m, a.n, a.alpha0, a.t, a.theta, mu);
    const GreedyResult res = bss_subsample(cfg, mu, seed);
    design = res.design;
    const GreedyCertificate& g = res.certificate;
    cert["certificate"] = to_json(g);
    cert["checks"] = {
        check("greedy lower barrier: lambda_min of the accumulated Gram >= (n+1) delta", g.lower_holds,
              g.accumulated_lower, g.lower_bound),
        check("greedy upper barrier: lambda_max of the tail Gram <= n zeta sigma^2 + s(sigma + s)",
              g.upper_holds, g.upper_value, g.upper_bound),
        check("stability constant K <= (1 - sqrt(m/(n+1)))^-1", g.design.stability_K <= g.stability_bound,
              g.design.stability_K, g.stability_bound)};
  } else if (a.method == "unweighted") {
    require(a.n >= a.m, "unweighted design needs n >= m");
    require(a.oracle == "christoffel", "unweighted design supports the christoffel oracle only");
    const UnweightedResult res = unweighted_subsample(a.m, a.n, basis, mu, OracleKind::Christoffel, seed);
    design = res.design;
    cert["certificate"] = to_json(res.certificate);
    cert["checks"] = {check("equal-weight lower bound lambda_min >= (1 - sqrt(m/n))^2", res.holds,
                            res.certificate.lambda_min, res.lower_bound)};
  } else if (a.method == "iid" || a.method == "christoffel") {
    require(a.n >= 1, "--n must be at least 1");
    const DensitySpec density = a.method == "iid" ? flat_density() : christoffel_density(basis, a.m);
    design = iid_design(density, a.n, mu, seed);
    cert["certificate"] = design_certificate_random(design, *basis, a.m);
  } else if (a.method == "conditional") {
    const ConditionalDesign res = conditional_christoffel_design(basis, a.m, mu, seed);
    design = res.design;
    cert["certificate"] = to_json(res.certificate);
    cert["redraw_count"] = res.redraw_count;
    cert["checks"] = {check("conditional acceptance lambda_min >= 1/2", res.certificate.lambda_min >= 0.5,
                            res.certificate.lambda_min, 0.5)};
  } else if (a.method == "algorithm3") {
    require(a.m >= 2 && a.n >= a.m, "randomized barrier design needs m >= 2 and n >= m");
    design = dolbeault_chkifa_design(basis, a.m, a.n, mu, seed);
    cert["certificate"] = design_certificate_random(design, *basis, a.m);
    cert["oversampling"] = static_cast<double>(a.n) / static_cast<double>(a.m - 1);
  } else {
    throw ConfigError("unknown design method '" + a.method + "'");
  }
  cert["n"] = design.size();
  if (g_timing) cert["wall_time_s"] = timer.seconds();

  emit_design(design, a.out);
  std::string cert_path = a.certificate;
  if (cert_path.empty() && !a.out.empty() && a.out != "-") cert_path = a.out + ".cert.json";
  if (!cert_path.empty()) emit(cert, cert_path);
  return 0;
}

// ---------------------------------------------------------------- recover

struct RecoverArgs {
  std::string method = "ls";
  std::string target = "trig-decay:1.5";
  std::uint64_t target_seed = 7;
  std::string design;
  std::size_t m = 8;
  std::size_t n = 0;
  std::size_t r = 2;
  std::size_t level = 4;
  std::size_t smoothness = 2;
  std::size_t ell = 0;
  std::size_t dim = 1;
  std::size_t N = 32;
  bool verify_rip = false;
  double solver_tol = 1e-8;
  std::string decomposition;
};

json recover_ls(const Common& c, const RecoverArgs& a, const BasisPtr& basis, const Measure& mu,
                const TargetFunction& f, std::uint64_t seed) {
  SampledDesign design;
  json rep;
  if (!a.design.empty()) {
    design = load_design(a.design);
    rep["design"] = a.design;
  } else {
    const std::size_t n = a.n == 0 ? 2 * a.m : a.n;
    require(n >= a.m, "least squares needs n >= m");
    design = bss_subsample(rkhs_tail_config(basis, a.m, n, 1.5, 1.0, 0.5, mu), mu, seed).design;
    rep["design"] = "greedy";
  }
  const FittedApproximant approx = fit(f.sample(design.points), design, basis, a.m);
  const SpectralCertificate cert = stability_constant(design, *basis, a.m);
  rep["m"] = a.m;
  rep["n"] = design.size();
  rep["certificate"] = to_json(cert);
  rep["errors"] = function_errors(f, approx, *basis, mu, c.mc_budget, derive_seed(seed, 1));
  rep["checks"] = {check("least-squares stability lambda_min(G) > 0", cert.stable(), cert.lambda_min, 0.0)};
  return rep;
}

json recover_mlmc(const Common& c, const RecoverArgs& a, const BasisPtr& basis, const Measure& mu,
                  const TargetFunction& f, std::uint64_t seed) {
  MLConfig cfg;
  cfg.basis = basis;
  cfg.measure = mu;
  cfg.r = a.r;
  cfg.k = a.level;
  const MLResult res = ml_recover(f, cfg, seed);
  json rep;
  rep["r"] = a.r;
  rep["level"] = a.level;
  rep["evaluations"] = res.evaluations;
  rep["errors"] = function_errors(f, res.approximant, *basis, mu, c.mc_budget, derive_seed(seed, 1));
  if (f.exact_coefficients() && basis->exactly_orthonormal()) {
    const CVector& coef = *f.exact_coefficients();
    const auto tail = [&](double m) {
      return m < 1.0 ? coef.squaredNorm() : tail_energy(coef, static_cast<std::size_t>(m));
    };
    rep["expected_squared_error_bound"] = ml_error_bound(a.r, a.level, tail);
  }
  return rep;
}

json recover_cubes(const RecoverArgs& a, const TargetFunction& f, std::uint64_t seed) {
  require(a.dim >= 1 && a.dim <= Point::kMaxDim, "--dim must be 1, 2 or 3");
  require(a.n >= 1, "cube recovery needs --n points");
  // On [0,1)^d the target acts on the mean of the coordinates' images.
  const auto g = [&](const Point& x) {
    Scalar acc = 0.0;
    for (std::size_t k = 0; k < a.dim; ++k) acc += f(Point(x[k]));
    return acc / static_cast<double>(a.dim);
  };
  Rng rng(seed);
  std::vector<Point> pts;
  for (std::size_t i = 0; i < a.n; ++i) {
    Point p = Point::zeros(a.dim);
    for (std::size_t k = 0; k < a.dim; ++k) p[k] = uniform01(rng);
    pts.push_back(p);
  }
  std::vector<Scalar> values;
  for (const auto& p : pts) values.push_back(g(p));
  const PiecewiseApproximant approx = piecewise_recover(values, pts, a.smoothness, a.ell);
  const CubeDecomposition& dec = approx.decomposition();
  const CubeInvariantReport inv = check_cube_invariants(dec, pts);
  json rep;
  rep["n"] = a.n;
  rep["dim"] = a.dim;
  rep["smoothness"] = a.smoothness;
  rep["ell"] = dec.ell;
  rep["cubes"] = dec.cubes.size();
  rep["tested"] = dec.tested;
  rep["degree_fallbacks"] = approx.degree_fallbacks();
  rep["errors"] = {{"L2", piecewise_l2_error(g, approx, 6, a.dim >= 3 ? 1.0 / 16.0 : 1.0 / 64.0)},
                   {"L2_method", "gauss-legendre"}};
  rep["checks"] = {check("cube decomposition invariants", inv.all(), inv.all() ? 1.0 : 0.0, 1.0)};
  if (!a.decomposition.empty()) emit(to_json(dec), a.decomposition);
  return rep;
}

json recover_sqrtlasso(const RecoverArgs& a, const BasisPtr& basis, const Measure& mu,
                       const TargetFunction& f, std::uint64_t seed) {
  require(a.N >= 1 && a.m >= 1, "--N and --m must be positive");
  const std::size_t n = a.n == 0 ? 4 * a.N : a.n;
  Rng rng(seed);
  SparseProblem prob;
  prob.basis = basis;
  prob.N = a.N;
  for (std::size_t i = 0; i < n; ++i) prob.points.push_back(mu.sample_reference(rng));
  prob.lambda = SparseProblem::default_lambda(a.m, n);
  SqrtLassoOptions opt;
  opt.tol = a.solver_tol;
  const SqrtLassoResult res = sqrt_lasso(f.sample(prob.points), prob, opt);
  json rep;
  rep["N"] = a.N;
  rep["m"] = a.m;
  rep["n"] = n;
  rep["lambda"] = prob.lambda;
  rep["objective"] = res.objective;
  rep["gap"] = res.gap;
  rep["iterations"] = res.iterations;
  if (a.verify_rip) {
    const RipReport rip = rip_check(prob.points, *basis, a.N, 2 * a.m);
    rep["rip"] = {{"status", rip.holds ? "verified" : "violated"},
                  {"supports", rip.supports},
                  {"violating_support", rip.violating_support}};
  } else {
    rep["rip"] = {{"status", "unverified, probabilistic"}};
  }
  FittedApproximant approx;
  approx.basis = basis;
  approx.coefficients = res.coefficients;
  rep["errors"] = function_errors(f, approx, *basis, mu, 100'000, derive_seed(seed, 1));
  if (f.exact_coefficients()) {
    CVector exact = CVector::Zero(static_cast<Eigen::Index>(a.N));
    const CVector& ec = *f.exact_coefficients();
    const Eigen::Index len = std::min<Eigen::Index>(ec.size(), exact.size());
    exact.head(len) = ec.head(len);
    rep["relative_coefficient_error"] = (res.coefficients - exact).norm() / std::max(exact.norm(), 1e-300);
  }
  return rep;
}

int run_recover(const Common& c, RecoverArgs a) {
  const Timer timer;
  const BasisPtr basis = make_basis(c.basis, c.table);
  const Measure mu = Measure::uniform(basis->domain());
  const std::uint64_t seed = resolve_seed(c.seed);
  if (a.method == "sqrtlasso" && a.target == "trig-decay:1.5") {
    a.target = "sparse:" + std::to_string(a.m) + ":" + std::to_string(a.N);
  }
  const TargetFunction f = make_target(a.target, basis, a.target_seed);
  json rep;
  if (a.method == "ls") {
    rep = recover_ls(c, a, basis, mu, f, seed);
  } else if (a.method == "mlmc") {
    rep = recover_mlmc(c, a, basis, mu, f, seed);
  } else if (a.method == "cubes") {
    rep = recover_cubes(a, f, seed);
  } else if (a.method == "sqrtlasso") {
    rep = recover_sqrtlasso(a, basis, mu, f, seed);
  } else {
    throw ConfigError("unknown recovery method '" + a.method + "'");
  }
  json out = {{"method", a.method}, {"basis", c.basis}, {"target", a.target}, {"seed", seed}};
  out.update(rep);
  if (g_timing) out["wall_time_s"] = timer.seconds();
  emit(out, c.report);
  return 0;
}

// ---------------------------------------------------------------- benchmark

struct BenchmarkArgs {
  std::string methods;
  std::string target = "trig-decay:1.5";
  std::uint64_t target_seed = 7;
  std::size_t budget = 64;
  std::string plot;
};

int run_benchmark(const Common& c, const BenchmarkArgs& a) {
  const Timer timer;
  const auto methods = split(a.methods, ',');
  require(!methods.empty(), "--methods must list at least one method");
  require(a.budget >= 8, "--budget must be at least 8");
  const BasisPtr basis = make_basis(c.basis, c.table);
  const Measure mu = Measure::uniform(basis->domain());
  const std::uint64_t seed = resolve_seed(c.seed);
  const TargetFunction f = make_target(a.target, basis, a.target_seed);
  const std::size_t n = a.budget;

  json rows = json::array();
  for (const auto& method : methods) {
    json row = {{"method", method}};
    if (method == "greedy-ls") {
      const std::size_t m = n / 2;
      const SampledDesign d = bss_subsample(rkhs_tail_config(basis, m, n, 1.5, 1.0, 0.5, mu), mu, seed).design;
      row["evaluations"] = d.size();
      row["errors"] = function_errors(f, fit(f.sample(d.points), d, basis, m), *basis, mu, c.mc_budget, seed);
    } else if (method == "christoffel-ls") {
      std::size_t m = 1;
      while (conditional_christoffel_size(m + 1) <= n) ++m;
      require(conditional_christoffel_size(m) <= n, "budget too small for a conditional design");
      const ConditionalDesign d = conditional_christoffel_design(basis, m, mu, seed);
      row["evaluations"] = d.design.size();
      row["errors"] = function_errors(f, fit(f.sample(d.design.points), d.design, basis, m), *basis, mu,
                                      c.mc_budget, seed);
    } else if (method == "mlmc") {
      MLConfig cfg;
      cfg.basis = basis;
      cfg.measure = mu;
      cfg.r = 2;
      cfg.k = static_cast<std::size_t>(std::floor(std::log2(static_cast<double>(n) / (2.0 * cfg.r))));
      const MLResult res = ml_recover(f, cfg, seed);
      row["evaluations"] = res.evaluations;
      row["errors"] = function_errors(f, res.approximant, *basis, mu, c.mc_budget, seed);
    } else if (method == "cubes") {
      RecoverArgs ra;
      ra.n = n;
      const json rep = recover_cubes(ra, f, seed);
      row["evaluations"] = n;
      row["errors"] = rep["errors"];
    } else {
      throw ConfigError("unknown benchmark method '" + method + "'");
    }
    rows.push_back(row);
  }
  json out = {{"basis", c.basis}, {"target", a.target}, {"budget", n}, {"seed", seed}, {"results", rows}};
  if (g_timing) out["wall_time_s"] = timer.seconds();
  if (!a.plot.empty()) {
    std::ofstream plot(a.plot);
    if (!plot) throw ConfigError("cannot write " + a.plot);
    plot << "n,error,method\n";
    for (const auto& row : rows) {
      plot << row["evaluations"].get<std::size_t>() << ',' << format_double(row["errors"]["L2"].get<double>())
           << ',' << row["method"].get<std::string>() << '\n';
    }
  }
  emit(out, c.report);
  return 0;
}

// ---------------------------------------------------------------- rates

struct RatesArgs {
  std::string method = "lip-equispaced";
  std::string grid;
  std::string p = "inf";
  std::string target = "sobolev:1";
  std::uint64_t target_seed = 7;
  std::size_t m0 = 0;
  std::string plot;
};

int run_rates(const Common& c, const RatesArgs& a) {
  const Timer timer;
  std::vector<std::size_t> grid;
  for (const auto& s : split(a.grid, ',')) {
    const double v = parse_number(s, "--grid");
    require(v >= 1.0 && v == std::floor(v), "--grid entries must be positive integers");
    grid.push_back(static_cast<std::size_t>(v));
  }
  require(grid.size() >= 4, "--grid needs at least 4 values");
  const double p = parse_number(a.p, "--p");
  require(p >= 1.0, "--p must be at least 1");
  const std::uint64_t seed = resolve_seed(c.seed);

  std::vector<double> errors;
  json table = json::array();
  if (a.method == "lip-equispaced" || a.method == "lip-iid") {
    for (std::size_t n : grid) {
      double e = 0.0;
      if (a.method == "lip-equispaced") {
        e = exact_radius(CircleDesign::equispaced(n), p);
      } else {
        Rng rng(derive_seed(seed, n));
        std::vector<double> pts(n);
        for (auto& x : pts) x = uniform01(rng);
        e = exact_radius(CircleDesign(pts), p);
      }
      errors.push_back(e);
    }
  } else if (a.method == "greedy-ls") {
    const BasisPtr basis = make_basis(c.basis, c.table);
    const Measure mu = Measure::uniform(basis->domain());
    const TargetFunction f = make_target(a.target, basis, a.target_seed);
    for (std::size_t n : grid) {
      const std::size_t m = a.m0 != 0 ? a.m0 : std::max<std::size_t>(1, n / 2);
      require(n >= m, "greedy-ls needs n >= m at every grid point");
      const SampledDesign d =
          bss_subsample(rkhs_tail_config(basis, m, n, 1.0, 0.75, 0.5, mu), mu, derive_seed(seed, n)).design;
      const FittedApproximant approx = fit(f.sample(d.points), d, basis, m);
      errors.push_back(function_errors(f, approx, *basis, mu, c.mc_budget, seed)["L2"].get<double>());
    }
  } else {
    throw ConfigError("unknown rates method '" + a.method + "'");
  }
  for (std::size_t i = 0; i < grid.size(); ++i) table.push_back({{"n", grid[i]}, {"error", errors[i]}});

  json out = {{"method", a.method}, {"p", a.p}, {"seed", seed}, {"table", table}};
  const bool exact = std::all_of(errors.begin(), errors.end(), [](double e) { return e < 1e-12; });
  if (exact) {
    out["fit"] = "exact";
  } else {
    std::vector<double> xs;
    for (std::size_t n : grid) xs.push_back(static_cast<double>(n));
    out["fit"] = to_json(fit_loglog(xs, errors));
  }
  if (g_timing) out["wall_time_s"] = timer.seconds();
  if (!a.plot.empty()) {
    std::ofstream plot(a.plot);
    if (!plot) throw ConfigError("cannot write " + a.plot);
    plot << "n,error,method\n";
    for (std::size_t i = 0; i < grid.size(); ++i) plot << grid[i] << ',' << format_double(errors[i]) << ',' << a.method << '\n';
  }
  emit(out, c.report);
  return 0;
}

// ---------------------------------------------------------------- oracle

struct OracleArgs {
  std::size_t n = 0;
  std::string p = "inf";
  bool expected = false;
};

int run_oracle_lip(const Common& c, const OracleArgs& a) {
  require(a.n >= 1, "--n must be at least 1");
  const double p = parse_number(a.p, "--p");
  require(p >= 1.0, "--p must be at least 1");
  json out = {{"n", a.n}, {"p", a.p}};
  if (a.expected) {
    out["expected_radius"] = expected_radius(a.n, p);
  } else {
    out["optimal_error"] = optimal_error(a.n, p);
    out["equispaced_radius"] = exact_radius(CircleDesign::equispaced(a.n), p);
  }
  emit(out, c.report);
  return 0;
}

// ---------------------------------------------------------------- config

/// Expands --config FILE into command-line arguments. The file is a JSON
/// object with "version": 1, "command" (e.g. "design" or "oracle lip") and
/// option names as keys; options given on the command line win.
std::vector<std::string> expand_config(std::vector<std::string> args) {
  auto it = std::find(args.begin(), args.end(), "--config");
  if (it == args.end()) return args;
  if (it + 1 == args.end()) throw ConfigError("--config needs a file");
  const std::string path = *(it + 1);
  args.erase(it, it + 2);
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  json cfg;
  try {
    cfg = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config must be a JSON object");
  if (!cfg.contains("version") || cfg["version"] != 1) throw ConfigError("config needs \"version\": 1");
  if (!cfg.contains("command") || !cfg["command"].is_string()) throw ConfigError("config needs a \"command\"");

  std::vector<std::string> out(args.begin(), args.begin() + 1);
  for (const auto& word : split(cfg["command"].get<std::string>(), ' ')) out.push_back(word);
  for (const auto& [key, value] : cfg.items()) {
    if (key == "version" || key == "command") continue;
    const std::string flag = "--" + key;
    if (value.is_boolean()) {
      if (value.get<bool>()) out.push_back(flag);
    } else if (value.is_string()) {
      out.push_back(flag);
      out.push_back(value.get<std::string>());
    } else if (value.is_number_integer() || value.is_number_unsigned()) {
      out.push_back(flag);
      out.push_back(value.dump());
    } else if (value.is_number_float()) {
      out.push_back(flag);
      out.push_back(format_double(value.get<double>()));
    } else if (value.is_array()) {
      std::string joined;
      for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
      out.push_back(flag);
      out.push_back(joined);
    } else {
      throw ConfigError("config key '" + key + "' has an unsupported value");
    }
  }
  // Command-line words after the program name (minus a repeated command) follow.
  std::size_t skip = 1;
  const auto words = split(cfg["command"].get<std::string>(), ' ');
  for (const auto& w : words) {
    if (skip < args.size() && args[skip] == w) ++skip;
  }
  out.insert(out.end(), args.begin() + static_cast<std::ptrdiff_t>(skip), args.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> raw(argv, argv + argc);
  try {
    raw = expand_config(raw);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  }

  CLI::App app{"Sampling designs and function recovery"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  Common common;
  std::size_t threads = 0;
  app.add_option("--threads", threads, "Cap on worker threads (0 = hardware)");
  app.add_flag("--timing", g_timing, "Add wall time to reports (breaks byte-identical output)");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--basis", common.basis, "trig, legendre, haar or custom-tabulated");
    sub->add_option("--table", common.table, "CSV for custom-tabulated bases");
    sub->add_option("--seed", common.seed, "Seed (OPTSAMPLE_SEED overrides)");
    sub->add_option("--mc-budget", common.mc_budget, "Monte Carlo draws for error estimates");
    sub->add_option("--report", common.report, "Report path (default stdout)");
  };

  DesignArgs da;
  auto* design = app.add_subcommand("design", "Construct points and weights");
  add_common(design);
  design->add_option("--method", da.method, "greedy, unweighted, iid, christoffel, conditional, algorithm3");
  design->add_option("--m", da.m, "Dimension of the approximation space")->required();
  design->add_option("--n", da.n, "Number of points");
  design->add_option("--alpha0", da.alpha0);
  design->add_option("--t", da.t);
  design->add_option("--theta", da.theta);
  design->add_option("--oracle", da.oracle);
  design->add_option("--out", da.out, "Points CSV (default stdout)");
  design->add_option("--certificate", da.certificate, "Certificate JSON path");

  RecoverArgs ra;
  auto* recover = app.add_subcommand("recover", "Recover a synthetic target from samples");
  add_common(recover);
  recover->add_option("--method", ra.method, "ls, mlmc, cubes, sqrtlasso");
  recover->add_option("--target", ra.target);
  recover->add_option("--target-seed", ra.target_seed);
  recover->add_option("--design", ra.design, "Design CSV for ls");
  recover->add_option("--m", ra.m);
  recover->add_option("--n", ra.n);
  recover->add_option("--r", ra.r);
  recover->add_option("--level", ra.level);
  recover->add_option("--smoothness", ra.smoothness);
  recover->add_option("--ell", ra.ell);
  recover->add_option("--dim", ra.dim);
  recover->add_option("--N", ra.N);
  recover->add_flag("--verify-rip", ra.verify_rip);
  recover->add_option("--solver-tol", ra.solver_tol);
  recover->add_option("--decomposition", ra.decomposition, "Cube decomposition JSON path");

  BenchmarkArgs ba;
  auto* bench = app.add_subcommand("benchmark", "Compare recovery methods on one target");
  add_common(bench);
  bench->add_option("--methods", ba.methods, "Comma list: greedy-ls, christoffel-ls, mlmc, cubes")->required();
  bench->add_option("--target", ba.target);
  bench->add_option("--target-seed", ba.target_seed);
  bench->add_option("--budget", ba.budget, "Evaluation budget");
  bench->add_option("--plot", ba.plot, "Tidy CSV n,error,method");

  RatesArgs rta;
  auto* rates = app.add_subcommand("rates", "Error versus n with a log-log fit");
  add_common(rates);
  rates->add_option("--method", rta.method, "lip-equispaced, lip-iid, greedy-ls");
  rates->add_option("--grid", rta.grid, "Comma list of n")->required();
  rates->add_option("--p", rta.p);
  rates->add_option("--target", rta.target);
  rates->add_option("--target-seed", rta.target_seed);
  rates->add_option("--m", rta.m0, "Fixed m for greedy-ls (default n/2)");
  rates->add_option("--plot", rta.plot, "Tidy CSV n,error,method");

  OracleArgs oa;
  auto* oracle = app.add_subcommand("oracle", "Closed-form oracles");
  oracle->require_subcommand(1);
  auto* lip = oracle->add_subcommand("lip", "Lipschitz radius of information");
  add_common(lip);
  lip->add_option("--n", oa.n)->required();
  lip->add_option("--p", oa.p);
  lip->add_flag("--expected", oa.expected);

  std::vector<std::string> rev(raw.rbegin(), raw.rend() - 1);
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfigError;
  }

  try {
    set_max_threads(threads);
    if (*design) return run_design(common, da);
    if (*recover) return run_recover(common, ra);
    if (*bench) return run_benchmark(common, ba);
    if (*rates) return run_rates(common, rta);
    if (*lip) return run_oracle_lip(common, oa);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const PreconditionError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "method failure: " << e.what() << '\n';
    return kExitMethodFailure;
  }
  return kExitConfigError;
}
