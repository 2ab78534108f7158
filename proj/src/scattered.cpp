#include "optsample/scattered.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <unordered_map>

#include <Eigen/SVD>

#include "optsample/kernels.hpp"
#include "optsample/lipschitz.hpp"

namespace optsample {

double DyadicCube::side() const { return std::ldexp(1.0, -static_cast<int>(level)); }

double DyadicCube::corner(std::size_t axis) const {
  return static_cast<double>(index[axis]) * side();
}

bool DyadicCube::contains(const Point& x, std::size_t dim) const {
  for (std::size_t k = 0; k < dim; ++k) {
    const double scaled = std::ldexp(x[k], static_cast<int>(level));
    if (!(scaled >= index[k] && scaled < index[k] + 1.0)) return false;
  }
  return true;
}

bool DyadicCube::closure_contains(const Point& x, std::size_t dim) const {
  for (std::size_t k = 0; k < dim; ++k) {
    const double scaled = std::ldexp(x[k], static_cast<int>(level));
    if (!(scaled >= index[k] && scaled <= index[k] + 1.0)) return false;
  }
  return true;
}

namespace {

constexpr std::uint32_t kMaxLevel = 30;

std::size_t ipow(std::size_t base, std::size_t exp) {
  std::size_t out = 1;
  for (std::size_t i = 0; i < exp; ++i) out *= base;
  return out;
}

/// Cell of x in the g^d grid of `cube`, flattened with axis 0 fastest.
std::size_t grid_cell(const DyadicCube& cube, const Point& x, std::size_t dim, std::size_t g) {
  std::size_t flat = 0;
  std::size_t stride = 1;
  for (std::size_t k = 0; k < dim; ++k) {
    const double t = std::ldexp(x[k], static_cast<int>(cube.level)) - cube.index[k];
    auto c = static_cast<std::size_t>(std::floor(t * static_cast<double>(g)));
    c = std::min(c, g - 1);
    flat += c * stride;
    stride *= g;
  }
  return flat;
}

std::size_t occupied_cells(const DyadicCube& cube, std::span<const Point> points,
                           std::span<const std::uint32_t> members, std::size_t dim,
                           std::size_t g) {
  std::vector<char> seen(ipow(g, dim), 0);
  std::size_t count = 0;
  for (auto i : members) {
    const std::size_t c = grid_cell(cube, points[i], dim, g);
    if (!seen[c]) {
      seen[c] = 1;
      ++count;
    }
  }
  return count;
}

bool cube_less(const DyadicCube& a, const DyadicCube& b, std::size_t dim) {
  for (std::size_t k = 0; k < dim; ++k) {
    const double ca = a.corner(k);
    const double cb = b.corner(k);
    if (ca != cb) return ca < cb;
  }
  return a.level < b.level;
}

std::uint64_t cube_key(std::uint32_t level, const std::array<std::uint32_t, Point::kMaxDim>& idx) {
  std::uint64_t h = level;
  for (auto v : idx) h = h * 0x100000001b3ULL ^ v;
  return h;
}

void check_points(std::span<const Point> points, std::size_t dim) {
  for (const auto& x : points) {
    if (x.dim() != dim) throw PreconditionError("points must share one dimension");
    for (std::size_t k = 0; k < dim; ++k) {
      if (!(x[k] >= 0.0 && x[k] < 1.0)) throw PreconditionError("points must lie in [0, 1)^d");
    }
  }
}

/// Leaf id containing each point (half-open cubes).
std::vector<std::vector<std::uint32_t>> members_by_cube(const CubeDecomposition& dec,
                                                       std::span<const Point> points) {
  std::unordered_map<std::uint64_t, std::size_t> lookup;
  std::uint32_t max_level = 0;
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    lookup.emplace(cube_key(dec.cubes[j].level, dec.cubes[j].index), j);
    max_level = std::max(max_level, dec.cubes[j].level);
  }
  std::vector<std::vector<std::uint32_t>> members(dec.cubes.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::uint32_t level = 0; level <= max_level; ++level) {
      std::array<std::uint32_t, Point::kMaxDim> idx{};
      for (std::size_t k = 0; k < dec.dim; ++k) {
        idx[k] = static_cast<std::uint32_t>(std::floor(std::ldexp(points[i][k], static_cast<int>(level))));
      }
      auto it = lookup.find(cube_key(level, idx));
      if (it != lookup.end() && dec.cubes[it->second].level == level &&
          dec.cubes[it->second].index == idx) {
        members[it->second].push_back(static_cast<std::uint32_t>(i));
        break;
      }
    }
  }
  return members;
}

}  // namespace

CubeDecomposition cube_split(std::span<const Point> points, std::size_t ell) {
  if (ell == 0) throw PreconditionError("ell must be at least 1");
  CubeDecomposition dec;
  dec.ell = ell;
  dec.dim = points.empty() ? 1 : points[0].dim();
  if (dec.dim == 0 || dec.dim > Point::kMaxDim) throw PreconditionError("dimension must be 1..3");
  check_points(points, dec.dim);

  struct Work {
    DyadicCube cube;
    std::vector<std::uint32_t> members;
  };
  const std::size_t dim = dec.dim;
  const std::size_t grid = 4 * ell;
  const std::size_t children = std::size_t{1} << dim;

  std::vector<Work> pool;
  Work root;
  root.members.resize(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) root.members[i] = static_cast<std::uint32_t>(i);
  pool.push_back(std::move(root));

  while (!pool.empty()) {
    std::vector<Work> next;
    for (auto& w : pool) {
      ++dec.tested;
      const bool passes = w.cube.level < kMaxLevel &&
                          w.members.size() >= ipow(grid, dim) &&
                          occupied_cells(w.cube, points, w.members, dim, grid) == ipow(grid, dim);
      if (!passes) {
        w.cube.point_count = w.members.size();
        dec.cubes.push_back(w.cube);
        continue;
      }
      std::vector<Work> kids(children);
      for (std::size_t c = 0; c < children; ++c) {
        kids[c].cube.level = w.cube.level + 1;
        for (std::size_t k = 0; k < dim; ++k) {
          kids[c].cube.index[k] = 2 * w.cube.index[k] + static_cast<std::uint32_t>((c >> k) & 1U);
        }
      }
      for (auto i : w.members) {
        std::size_t c = 0;
        for (std::size_t k = 0; k < dim; ++k) {
          const double scaled = std::ldexp(points[i][k], static_cast<int>(w.cube.level + 1));
          if (static_cast<std::uint32_t>(std::floor(scaled)) != 2 * w.cube.index[k]) c |= std::size_t{1} << k;
        }
        kids[c].members.push_back(i);
      }
      for (auto& kid : kids) next.push_back(std::move(kid));
    }
    pool = std::move(next);
  }
  std::sort(dec.cubes.begin(), dec.cubes.end(),
            [dim](const DyadicCube& a, const DyadicCube& b) { return cube_less(a, b, dim); });
  return dec;
}

CubeInvariantReport check_cube_invariants(const CubeDecomposition& dec,
                                          std::span<const Point> points) {
  CubeInvariantReport rep;
  const std::size_t dim = dec.dim;
  double volume = 0.0;
  for (const auto& c : dec.cubes) volume += std::pow(c.side(), static_cast<double>(dim));
  rep.coverage = std::abs(volume - 1.0) < 1e-12;

  rep.disjoint = true;
  for (std::size_t a = 0; a < dec.cubes.size() && rep.disjoint; ++a) {
    for (std::size_t b = a + 1; b < dec.cubes.size(); ++b) {
      bool overlap = true;
      for (std::size_t k = 0; k < dim; ++k) {
        const double lo = std::max(dec.cubes[a].corner(k), dec.cubes[b].corner(k));
        const double hi = std::min(dec.cubes[a].corner(k) + dec.cubes[a].side(),
                                   dec.cubes[b].corner(k) + dec.cubes[b].side());
        if (hi <= lo) {
          overlap = false;
          break;
        }
      }
      if (overlap) {
        rep.disjoint = false;
        break;
      }
    }
  }

  const auto members = members_by_cube(dec, points);
  rep.occupancy = true;
  rep.empty_subcube = true;
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    const auto& c = dec.cubes[j];
    if (members[j].size() != c.point_count) rep.occupancy = false;
    if (!dec.root_only()) {
      const std::size_t g = 2 * dec.ell;
      if (occupied_cells(c, points, members[j], dim, g) != ipow(g, dim)) rep.occupancy = false;
    }
    const std::size_t g4 = 4 * dec.ell;
    if (occupied_cells(c, points, members[j], dim, g4) == ipow(g4, dim)) rep.empty_subcube = false;
  }
  return rep;
}

std::size_t polynomial_dimension(std::size_t s, std::size_t d) {
  // C(s + d, d)
  std::size_t out = 1;
  for (std::size_t i = 1; i <= d; ++i) out = out * (s + i) / i;
  return out;
}

namespace {

std::vector<std::array<std::size_t, Point::kMaxDim>> exponents(std::size_t degree, std::size_t d) {
  std::vector<std::array<std::size_t, Point::kMaxDim>> out;
  std::array<std::size_t, Point::kMaxDim> e{};
  for (std::size_t total = 0; total <= degree; ++total) {
    // Enumerate compositions of `total` into d parts.
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t axis, std::size_t left) {
      if (axis + 1 == d) {
        e[axis] = left;
        out.push_back(e);
        return;
      }
      for (std::size_t v = left + 1; v-- > 0;) {
        e[axis] = v;
        rec(axis + 1, left - v);
      }
    };
    rec(0, total);
  }
  return out;
}

void legendre_values(double t, std::size_t degree, std::vector<double>& out) {
  out.assign(degree + 1, 1.0);
  if (degree >= 1) out[1] = t;
  for (std::size_t k = 2; k <= degree; ++k) {
    const double kd = static_cast<double>(k);
    out[k] = ((2.0 * kd - 1.0) * t * out[k - 1] - (kd - 1.0) * out[k - 2]) / kd;
  }
}

RVector local_row(const DyadicCube& cube, const Point& x, std::size_t dim, std::size_t degree,
                  const std::vector<std::array<std::size_t, Point::kMaxDim>>& exps) {
  std::array<std::vector<double>, Point::kMaxDim> leg;
  for (std::size_t k = 0; k < dim; ++k) {
    const double t = 2.0 * (x[k] - cube.corner(k)) / cube.side() - 1.0;
    legendre_values(t, degree, leg[k]);
  }
  RVector row(static_cast<Eigen::Index>(exps.size()));
  for (std::size_t j = 0; j < exps.size(); ++j) {
    double v = 1.0;
    for (std::size_t k = 0; k < dim; ++k) v *= leg[k][exps[j][k]];
    row[static_cast<Eigen::Index>(j)] = v;
  }
  return row;
}

std::vector<std::size_t> select_nodes(const DyadicCube& cube, std::span<const Point> points,
                                      const std::vector<std::uint32_t>& members, std::size_t dim,
                                      std::size_t ell) {
  const std::size_t cells = ipow(ell, dim);
  std::vector<std::size_t> best(cells, SIZE_MAX);
  std::vector<double> best_dist(cells, kInfinity);
  const double h = cube.side() / static_cast<double>(ell);
  for (auto i : members) {
    const std::size_t c = grid_cell(cube, points[i], dim, ell);
    double dist = 0.0;
    std::size_t rem = c;
    for (std::size_t k = 0; k < dim; ++k) {
      const std::size_t ck = rem % ell;
      rem /= ell;
      const double center = cube.corner(k) + (static_cast<double>(ck) + 0.5) * h;
      dist = std::max(dist, std::abs(points[i][k] - center));
    }
    if (dist < best_dist[c]) {
      best_dist[c] = dist;
      best[c] = i;
    }
  }
  std::vector<std::size_t> out;
  for (auto b : best) {
    if (b != SIZE_MAX) out.push_back(b);
  }
  return out;
}

}  // namespace

PiecewiseApproximant::PiecewiseApproximant(CubeDecomposition decomposition,
                                           std::vector<LocalPolynomial> pieces, std::size_t degree)
    : decomposition_(std::move(decomposition)), pieces_(std::move(pieces)), degree_(degree) {}

std::size_t PiecewiseApproximant::degree_fallbacks() const {
  return static_cast<std::size_t>(std::count_if(
      pieces_.begin(), pieces_.end(), [&](const LocalPolynomial& p) { return p.degree < degree_; }));
}

Scalar PiecewiseApproximant::eval_piece(std::size_t j, const Point& x) const {
  const auto& piece = pieces_[j];
  const auto exps = exponents(piece.degree, decomposition_.dim);
  const RVector row = local_row(piece.cube, x, decomposition_.dim, piece.degree, exps);
  return row.cast<Scalar>().cwiseProduct(piece.coefficients).sum();
}

Scalar PiecewiseApproximant::operator()(const Point& x) const {
  if (pieces_.empty()) return 0.0;
  for (std::size_t j = 0; j < pieces_.size(); ++j) {
    if (pieces_[j].cube.closure_contains(x, decomposition_.dim)) return eval_piece(j, x);
  }
  throw PreconditionError("point outside the unit cube");
}

PiecewiseApproximant piecewise_recover(std::span<const Scalar> values,
                                       std::span<const Point> points, std::size_t s,
                                       std::size_t ell) {
  if (values.size() != points.size()) throw PreconditionError("one value per point is required");
  if (ell == 0) ell = s + 1;
  CubeDecomposition dec = cube_split(points, ell);
  if (dec.root_only()) return PiecewiseApproximant(std::move(dec), {}, s);

  const std::size_t dim = dec.dim;
  const auto members = members_by_cube(dec, points);
  std::vector<LocalPolynomial> pieces;
  pieces.reserve(dec.cubes.size());
  for (std::size_t j = 0; j < dec.cubes.size(); ++j) {
    LocalPolynomial piece;
    piece.cube = dec.cubes[j];
    piece.nodes = select_nodes(piece.cube, points, members[j], dim, ell);
    const auto nn = static_cast<Eigen::Index>(piece.nodes.size());
    RMatrix rhs(nn, 2);
    for (Eigen::Index i = 0; i < nn; ++i) {
      const Scalar v = values[piece.nodes[static_cast<std::size_t>(i)]];
      rhs(i, 0) = v.real();
      rhs(i, 1) = v.imag();
    }
    for (std::size_t degree = s + 1; degree-- > 0;) {
      const auto exps = exponents(degree, dim);
      if (exps.size() > piece.nodes.size()) continue;
      RMatrix a(nn, static_cast<Eigen::Index>(exps.size()));
      for (Eigen::Index i = 0; i < nn; ++i) {
        a.row(i) = local_row(piece.cube, points[piece.nodes[static_cast<std::size_t>(i)]], dim,
                             degree, exps);
      }
      Eigen::JacobiSVD<RMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
      const RVector sv = svd.singularValues();
      if (sv.size() == 0 || !(sv(sv.size() - 1) > 1e-10 * sv(0))) continue;
      const RMatrix sol = svd.solve(rhs);
      piece.degree = degree;
      piece.coefficients = sol.col(0).cast<Scalar>() + Scalar(0.0, 1.0) * sol.col(1).cast<Scalar>();
      break;
    }
    if (piece.coefficients.size() == 0) {
      piece.degree = 0;
      piece.coefficients = CVector::Zero(1);
    }
    pieces.push_back(std::move(piece));
  }
  return PiecewiseApproximant(std::move(dec), std::move(pieces), s);
}

namespace {

/// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(std::size_t n, std::vector<double>& nodes, std::vector<double>& weights) {
  nodes.resize(n);
  weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kd = static_cast<double>(k);
        const double p2 = ((2.0 * kd - 1.0) * x * p1 - (kd - 1.0) * p0) / kd;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

}  // namespace

double piecewise_l2_error(const std::function<Scalar(const Point&)>& f,
                          const PiecewiseApproximant& approx, std::size_t gauss_points,
                          double max_cell) {
  if (gauss_points == 0) throw PreconditionError("need at least one Gauss point");
  std::vector<double> gx;
  std::vector<double> gw;
  gauss_legendre(gauss_points, gx, gw);
  const std::size_t dim = approx.decomposition().dim;

  std::vector<DyadicCube> cubes;
  if (approx.is_zero()) {
    cubes.push_back(DyadicCube{});
  } else {
    for (const auto& p : approx.pieces()) cubes.push_back(p.cube);
  }

  double total = 0.0;
  for (std::size_t j = 0; j < cubes.size(); ++j) {
    const auto& cube = cubes[j];
    const auto per_axis = static_cast<std::size_t>(std::max(1.0, std::ceil(cube.side() / max_cell)));
    const double h = cube.side() / static_cast<double>(per_axis);
    const std::size_t cells = ipow(per_axis, dim);
    const std::size_t nodes = ipow(gauss_points, dim);
    double acc = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
      std::array<double, Point::kMaxDim> lo{};
      std::size_t rem = c;
      for (std::size_t k = 0; k < dim; ++k) {
        lo[k] = cube.corner(k) + static_cast<double>(rem % per_axis) * h;
        rem /= per_axis;
      }
      for (std::size_t q = 0; q < nodes; ++q) {
        Point x = Point::zeros(dim);
        double w = 1.0;
        std::size_t r = q;
        for (std::size_t k = 0; k < dim; ++k) {
          const std::size_t qi = r % gauss_points;
          r /= gauss_points;
          x[k] = lo[k] + 0.5 * h * (gx[qi] + 1.0);
          w *= 0.5 * h * gw[qi];
        }
        const Scalar a = approx.is_zero() ? Scalar(0.0) : approx.eval_piece(j, x);
        acc += w * std::norm(f(x) - a);
      }
    }
    total += acc;
  }
  return std::sqrt(total);
}

namespace {

std::vector<double> sorted_first_coordinate(std::span<const Point> points) {
  std::vector<double> xs;
  xs.reserve(points.size());
  for (const auto& p : points) xs.push_back(p[0]);
  std::sort(xs.begin(), xs.end());
  return xs;
}

void check_domain_points(std::span<const Point> points, const Domain& domain) {
  if (points.empty()) throw PreconditionError("point set must be non-empty");
  for (const auto& p : points) {
    if (p.dim() != domain.dim()) throw PreconditionError("point dimension differs from domain");
  }
}

struct Columns {
  std::vector<std::vector<double>> data;
  std::vector<const double*> ptrs;
};

Columns columns_of(std::span<const Point> points, std::size_t dim) {
  Columns c;
  c.data.assign(dim, std::vector<double>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < dim; ++k) c.data[k][i] = points[i][k];
  }
  for (auto& col : c.data) c.ptrs.push_back(col.data());
  return c;
}

double uncovered_fraction(std::span<const Point> points, const Domain& domain) {
  std::vector<char> hit(domain.size(), 0);
  for (const auto& p : points) {
    const auto idx = static_cast<std::size_t>(p[0]);
    if (idx < hit.size()) hit[idx] = 1;
  }
  const auto missing = static_cast<double>(std::count(hit.begin(), hit.end(), 0));
  return missing / static_cast<double>(hit.size());
}

}  // namespace

double covering_radius(std::span<const Point> points, const Domain& domain,
                       std::size_t mc_budget, std::uint64_t seed) {
  check_domain_points(points, domain);
  switch (domain.kind()) {
    case DomainKind::Circle: {
      std::vector<double> xs = sorted_first_coordinate(points);
      return exact_radius(CircleDesign(std::move(xs)), kInfinity);
    }
    case DomainKind::FiniteSet:
      return uncovered_fraction(points, domain) > 0.0 ? 1.0 : 0.0;
    case DomainKind::UnitInterval:
    case DomainKind::UnitCube:
      break;
  }
  if (domain.dim() == 1) {
    const std::vector<double> xs = sorted_first_coordinate(points);
    double best = std::max(xs.front(), 1.0 - xs.back());
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) best = std::max(best, 0.5 * (xs[i + 1] - xs[i]));
    return best;
  }
  if (mc_budget == 0) throw PreconditionError("Monte Carlo budget must be positive");
  const Columns cols = columns_of(points, domain.dim());
  const auto& k = kernels::active();
  Rng rng(seed);
  double best = 0.0;
  std::array<double, Point::kMaxDim> q{};
  for (std::size_t s = 0; s < mc_budget; ++s) {
    for (std::size_t d = 0; d < domain.dim(); ++d) q[d] = uniform01(rng);
    best = std::max(best, k.min_sup_distance(q.data(), cols.ptrs.data(), domain.dim(), points.size()));
  }
  return best;
}

double distortion(std::span<const Point> points, double gamma, const Domain& domain,
                  std::size_t mc_budget, std::uint64_t seed) {
  if (!(gamma > 0.0)) throw PreconditionError("gamma must be positive");
  if (std::isinf(gamma)) return covering_radius(points, domain, mc_budget, seed);
  check_domain_points(points, domain);
  const double gp = gamma + 1.0;
  switch (domain.kind()) {
    case DomainKind::Circle: {
      CircleDesign design(sorted_first_coordinate(points));
      double acc = 0.0;
      for (double g : design.gaps()) acc += 2.0 * std::pow(0.5 * g, gp) / gp;
      return std::pow(acc, 1.0 / gamma);
    }
    case DomainKind::FiniteSet:
      return std::pow(uncovered_fraction(points, domain), 1.0 / gamma);
    case DomainKind::UnitInterval:
    case DomainKind::UnitCube:
      break;
  }
  if (domain.dim() == 1) {
    const std::vector<double> xs = sorted_first_coordinate(points);
    double acc = std::pow(xs.front(), gp) / gp + std::pow(1.0 - xs.back(), gp) / gp;
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      acc += 2.0 * std::pow(0.5 * (xs[i + 1] - xs[i]), gp) / gp;
    }
    return std::pow(acc, 1.0 / gamma);
  }
  if (mc_budget == 0) throw PreconditionError("Monte Carlo budget must be positive");
  const Columns cols = columns_of(points, domain.dim());
  const auto& k = kernels::active();
  Rng rng(seed);
  double acc = 0.0;
  std::array<double, Point::kMaxDim> q{};
  for (std::size_t s = 0; s < mc_budget; ++s) {
    for (std::size_t d = 0; d < domain.dim(); ++d) q[d] = uniform01(rng);
    acc += std::pow(k.min_sup_distance(q.data(), cols.ptrs.data(), domain.dim(), points.size()), gamma);
  }
  return std::pow(acc / static_cast<double>(mc_budget), 1.0 / gamma);
}

}  // namespace optsample
