#include "optsample/model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace optsample {

// ---------------------------------------------------------------- Domain

Domain Domain::unit_interval() { return {DomainKind::UnitInterval, 1, 0}; }

Domain Domain::unit_cube(std::size_t dim) {
  if (dim == 0 || dim > Point::kMaxDim) {
    throw PreconditionError("unit cube dimension must be in [1, 3]");
  }
  return {DomainKind::UnitCube, dim, 0};
}

Domain Domain::circle() { return {DomainKind::Circle, 1, 0}; }

Domain Domain::finite_set(std::size_t size) {
  if (size == 0) throw PreconditionError("finite set must be non-empty");
  return {DomainKind::FiniteSet, 1, size};
}

double torus_distance(double x, double y) {
  double a = std::fmod(std::abs(x - y), 1.0);
  return std::min(a, 1.0 - a);
}

double Domain::distance(const Point& x, const Point& y) const {
  switch (kind_) {
    case DomainKind::UnitInterval:
      return std::abs(x[0] - y[0]);
    case DomainKind::Circle:
      return torus_distance(x[0], y[0]);
    case DomainKind::UnitCube: {
      double d = 0.0;
      for (std::size_t k = 0; k < dim_; ++k) d = std::max(d, std::abs(x[k] - y[k]));
      return d;
    }
    case DomainKind::FiniteSet:
      return x[0] == y[0] ? 0.0 : 1.0;
  }
  return 0.0;
}

bool Domain::contains(const Point& x) const {
  if (x.dim() != dim_) return false;
  switch (kind_) {
    case DomainKind::UnitInterval:
      return x[0] >= 0.0 && x[0] <= 1.0;
    case DomainKind::Circle:
      return x[0] >= 0.0 && x[0] < 1.0;
    case DomainKind::UnitCube:
      for (std::size_t k = 0; k < dim_; ++k) {
        if (!(x[k] >= 0.0 && x[k] <= 1.0)) return false;
      }
      return true;
    case DomainKind::FiniteSet:
      return x[0] >= 0.0 && x[0] < static_cast<double>(size_) && x[0] == std::floor(x[0]);
  }
  return false;
}

std::string Domain::describe() const {
  switch (kind_) {
    case DomainKind::UnitInterval:
      return "unit-interval";
    case DomainKind::Circle:
      return "circle";
    case DomainKind::UnitCube:
      return "unit-cube(" + std::to_string(dim_) + ")";
    case DomainKind::FiniteSet:
      return "finite-set(" + std::to_string(size_) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------- Measure

Measure Measure::uniform(Domain domain) { return Measure(domain); }

Measure Measure::finite(std::vector<double> probabilities) {
  if (probabilities.empty()) throw PreconditionError("finite measure needs probabilities");
  Measure m(Domain::finite_set(probabilities.size()));
  double total = 0.0;
  for (double p : probabilities) {
    if (!(p >= 0.0)) throw PreconditionError("probabilities must be non-negative");
    total += p;
  }
  if (!(total > 0.0)) throw PreconditionError("probabilities sum to zero");
  m.cumulative_.reserve(probabilities.size());
  double run = 0.0;
  for (double p : probabilities) {
    run += p / total;
    m.cumulative_.push_back(run);
  }
  m.cumulative_.back() = 1.0;
  return m;
}

Measure Measure::with_density(Domain domain, std::function<double(const Point&)> density,
                              double density_sup) {
  if (!(density_sup > 0.0)) throw PreconditionError("density bound must be positive");
  Measure m(domain);
  m.density_ = std::move(density);
  m.density_sup_ = density_sup;
  return m;
}

Point Measure::sample_reference(Rng& rng) const {
  switch (domain_.kind()) {
    case DomainKind::UnitInterval:
    case DomainKind::Circle:
      return Point(uniform01(rng));
    case DomainKind::UnitCube: {
      Point p = Point::zeros(domain_.dim());
      for (std::size_t k = 0; k < domain_.dim(); ++k) p[k] = uniform01(rng);
      return p;
    }
    case DomainKind::FiniteSet: {
      const double u = uniform01(rng);
      if (cumulative_.empty()) {
        return Point(std::floor(u * static_cast<double>(domain_.size())));
      }
      auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
      auto idx = static_cast<double>(std::min<std::ptrdiff_t>(
          it - cumulative_.begin(), static_cast<std::ptrdiff_t>(cumulative_.size()) - 1));
      return Point(idx);
    }
  }
  return Point(0.0);
}

Point Measure::sample(Rng& rng) const {
  if (!density_) return sample_reference(rng);
  for (;;) {
    Point x = sample_reference(rng);
    if (uniform01(rng) * density_sup_ < density_(x)) return x;
  }
}

Point rejection_sample(const Measure& measure, const std::function<double(const Point&)>& weight,
                       double weight_sup, Rng& rng, std::size_t max_tries) {
  if (!(weight_sup > 0.0) || !std::isfinite(weight_sup)) {
    throw PreconditionError("rejection sampling needs a finite positive bound");
  }
  for (std::size_t t = 0; t < max_tries; ++t) {
    Point x = measure.sample(rng);
    const double w = weight(x);
    if (w > 0.0 && uniform01(rng) * weight_sup < w) return x;
  }
  throw BudgetExceeded("rejection sampling exceeded " + std::to_string(max_tries) + " tries");
}

// ---------------------------------------------------------------- Basis

void Basis::check_index(std::size_t k) const {
  if (auto d = dim(); d && k >= *d) {
    throw PreconditionError("basis index " + std::to_string(k) + " out of range for " +
                            std::string(name()) + " of dimension " + std::to_string(*d));
  }
}

void Basis::eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = eval(first + j, x);
}

std::optional<double> Basis::christoffel_sup(std::size_t) const {
  if (auto t = theta()) return (*t) * (*t);
  return std::nullopt;
}

// Trig ----------------------------------------------------------------

TrigBasis::TrigBasis(Domain domain) : domain_(domain) {
  if (domain.dim() != 1 || domain.kind() == DomainKind::FiniteSet) {
    throw PreconditionError("trig basis lives on the circle or the unit interval");
  }
}

long TrigBasis::frequency(std::size_t k) {
  if (k == 0) return 0;
  const auto half = static_cast<long>((k + 1) / 2);
  return (k % 2 == 1) ? half : -half;
}

std::size_t TrigBasis::index_of(long f) {
  if (f == 0) return 0;
  return f > 0 ? static_cast<std::size_t>(2 * f - 1) : static_cast<std::size_t>(-2 * f);
}

namespace {

Scalar unit_phase(long f, double x) {
  // Reduce f*x modulo 1 before the trig call so large frequencies stay accurate.
  const double fx = static_cast<double>(f) * x;
  const double frac = fx - std::floor(fx);
  const double angle = 2.0 * std::numbers::pi * frac;
  return {std::cos(angle), std::sin(angle)};
}

}  // namespace

Scalar TrigBasis::eval(std::size_t k, const Point& x) const { return unit_phase(frequency(k), x[0]); }

void TrigBasis::eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = unit_phase(frequency(first + j), x[0]);
}

// Legendre -------------------------------------------------------------

LegendreBasis::LegendreBasis() : domain_(Domain::unit_interval()) {}

Scalar LegendreBasis::eval(std::size_t k, const Point& x) const {
  std::vector<Scalar> v(k + 1);
  eval_block(0, v, x);
  return v[k];
}

void LegendreBasis::eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const {
  if (out.empty()) return;
  const double t = 2.0 * x[0] - 1.0;
  const std::size_t last = first + out.size();
  double p_prev = 1.0;  // P_0
  double p_cur = t;     // P_1
  for (std::size_t k = 0; k < last; ++k) {
    double pk;
    if (k == 0) {
      pk = 1.0;
    } else if (k == 1) {
      pk = t;
    } else {
      const double kd = static_cast<double>(k);
      const double next = ((2.0 * kd - 1.0) * t * p_cur - (kd - 1.0) * p_prev) / kd;
      p_prev = p_cur;
      p_cur = next;
      pk = next;
    }
    if (k >= first) out[k - first] = std::sqrt(2.0 * static_cast<double>(k) + 1.0) * pk;
  }
}

std::optional<double> LegendreBasis::christoffel_sup(std::size_t m) const {
  // (1/m) sum_{k<m} (2k+1) = m, attained at the endpoints.
  return static_cast<double>(m);
}

// Haar -----------------------------------------------------------------

HaarBasis::HaarBasis() : domain_(Domain::unit_interval()) {}

Scalar HaarBasis::eval(std::size_t k, const Point& x) const {
  if (k == 0) return 1.0;
  std::size_t level = 0;
  while ((std::size_t{2} << level) <= k) ++level;
  const std::size_t shift = std::size_t{1} << level;
  const double l = static_cast<double>(k - shift);
  const double scale = static_cast<double>(shift);
  // Position inside the dyadic support; x = 1 belongs to the last interval.
  double u = x[0] * scale - l;
  if (x[0] >= 1.0 && l == scale - 1.0) u = 1.0 - 1e-16;
  if (u < 0.0 || u >= 1.0) return 0.0;
  const double amp = std::sqrt(scale);
  return u < 0.5 ? amp : -amp;
}

std::optional<double> HaarBasis::christoffel_sup(std::size_t m) const {
  if (m == 0) return std::nullopt;
  // Near x = 0 every level below m contributes one element of size 2^j.
  double total = 1.0;
  for (std::size_t level = 0; (std::size_t{1} << level) < m; ++level) {
    total += static_cast<double>(std::size_t{1} << level);
  }
  return total / static_cast<double>(m);
}

// Tabulated ------------------------------------------------------------

TabulatedBasis::TabulatedBasis(std::vector<double> grid, std::vector<std::vector<double>> values)
    : domain_(Domain::unit_interval()), grid_(std::move(grid)), values_(std::move(values)) {
  if (grid_.size() < 2) throw PreconditionError("tabulated basis needs at least two grid nodes");
  if (!std::is_sorted(grid_.begin(), grid_.end())) {
    throw PreconditionError("tabulated grid must be sorted");
  }
  if (values_.empty()) throw PreconditionError("tabulated basis needs at least one column");
  for (const auto& column : values_) {
    if (column.size() != grid_.size()) {
      throw PreconditionError("tabulated column length differs from grid length");
    }
    for (double v : column) theta_ = std::max(theta_, std::abs(v));
  }
}

std::shared_ptr<TabulatedBasis> TabulatedBasis::from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tabulated basis file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty tabulated basis file: " + path);
  std::vector<double> grid;
  std::vector<std::vector<double>> cols;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    if (row.size() < 2) throw ConfigError("tabulated row needs x and at least one value");
    if (cols.empty()) cols.resize(row.size() - 1);
    if (row.size() - 1 != cols.size()) throw ConfigError("ragged tabulated basis file");
    grid.push_back(row[0]);
    for (std::size_t k = 0; k + 1 < row.size(); ++k) cols[k].push_back(row[k + 1]);
  }
  return std::make_shared<TabulatedBasis>(std::move(grid), std::move(cols));
}

Scalar TabulatedBasis::eval(std::size_t k, const Point& x) const {
  check_index(k);
  const double t = std::clamp(x[0], grid_.front(), grid_.back());
  auto it = std::upper_bound(grid_.begin(), grid_.end(), t);
  std::size_t hi = static_cast<std::size_t>(it - grid_.begin());
  if (hi >= grid_.size()) hi = grid_.size() - 1;
  const std::size_t lo = hi - 1;
  const double span = grid_[hi] - grid_[lo];
  const double lambda = span > 0.0 ? (t - grid_[lo]) / span : 0.0;
  return (1.0 - lambda) * values_[k][lo] + lambda * values_[k][hi];
}

std::optional<double> TabulatedBasis::christoffel_sup(std::size_t m) const {
  if (m == 0 || m > values_.size()) return std::nullopt;
  // Sums of squares of linear interpolants peak at grid nodes.
  double best = 0.0;
  for (std::size_t g = 0; g < grid_.size(); ++g) {
    double s = 0.0;
    for (std::size_t k = 0; k < m; ++k) s += values_[k][g] * values_[k][g];
    best = std::max(best, s);
  }
  return best / static_cast<double>(m);
}

// Function family -----------------------------------------------------------

FunctionBasis::FunctionBasis(std::string name, Domain domain, std::size_t dim, Fn fn,
                             std::optional<double> theta)
    : name_(std::move(name)), domain_(domain), dim_(dim), fn_(std::move(fn)), theta_(theta) {}

Scalar FunctionBasis::eval(std::size_t k, const Point& x) const {
  check_index(k);
  return fn_(k, x);
}

BasisPtr make_basis(std::string_view name, const std::string& table_path) {
  if (name == "trig") return std::make_shared<TrigBasis>();
  if (name == "legendre") return std::make_shared<LegendreBasis>();
  if (name == "haar") return std::make_shared<HaarBasis>();
  if (name == "custom-tabulated") {
    if (table_path.empty()) throw ConfigError("custom-tabulated basis requires a table path");
    return TabulatedBasis::from_csv(table_path);
  }
  throw ConfigError("unknown basis family: " + std::string(name));
}

// ---------------------------------------------------------------- designs

void SampledDesign::validate() const {
  if (points.empty()) throw PreconditionError("design must contain at least one point");
  if (points.size() != weights.size()) {
    throw PreconditionError("design points and weights differ in length");
  }
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw PreconditionError("design weights must be positive and finite");
    }
  }
}

SampledDesign SampledDesign::equal_weights(std::vector<Point> points, double weight) {
  SampledDesign d;
  d.weights.assign(points.size(), weight);
  d.points = std::move(points);
  return d;
}

TargetFunction TargetFunction::from_coefficients(BasisPtr basis, CVector coefficients) {
  const auto count = static_cast<std::size_t>(coefficients.size());
  TargetFunction f([basis, coefficients, count](const Point& x) {
    std::vector<Scalar> values(count);
    basis->eval_block(0, values, x);
    Scalar acc = 0.0;
    for (std::size_t k = 0; k < count; ++k) acc += coefficients[static_cast<Eigen::Index>(k)] * values[k];
    return acc;
  });
  f.coefficients_ = std::move(coefficients);
  return f;
}

std::vector<Scalar> TargetFunction::sample(std::span<const Point> points) const {
  std::vector<Scalar> out;
  out.reserve(points.size());
  for (const auto& x : points) out.push_back(fn_(x));
  return out;
}

CVector eval_basis_block(const Basis& basis, std::size_t first, std::size_t count, const Point& x) {
  if (count > 0) basis.check_index(first + count - 1);
  CVector out(static_cast<Eigen::Index>(count));
  basis.eval_block(first, std::span<Scalar>(out.data(), count), x);
  return out;
}

CMatrix evaluation_matrix(const Basis& basis, std::size_t m, std::span<const Point> points) {
  if (m > 0) basis.check_index(m - 1);
  const auto n = static_cast<Eigen::Index>(points.size());
  CMatrix b(n, static_cast<Eigen::Index>(m));
  std::vector<Scalar> row(m);
  for (Eigen::Index i = 0; i < n; ++i) {
    basis.eval_block(0, row, points[static_cast<std::size_t>(i)]);
    for (std::size_t k = 0; k < m; ++k) b(i, static_cast<Eigen::Index>(k)) = row[k];
  }
  return b;
}

double orthonormality_defect(const Basis& basis, const Measure& measure, std::size_t m,
                             std::size_t budget, std::uint64_t seed) {
  if (m == 0) return 0.0;
  basis.check_index(m - 1);
  if (budget == 0) throw PreconditionError("Monte Carlo budget must be positive");
  Rng rng(seed);
  const auto mi = static_cast<Eigen::Index>(m);
  CMatrix acc = CMatrix::Zero(mi, mi);
  CVector v(mi);
  for (std::size_t s = 0; s < budget; ++s) {
    const Point x = measure.sample(rng);
    basis.eval_block(0, std::span<Scalar>(v.data(), m), x);
    acc.selfadjointView<Eigen::Lower>().rankUpdate(v, 1.0);
  }
  CMatrix gram = acc.selfadjointView<Eigen::Lower>();
  gram /= static_cast<double>(budget);
  gram -= CMatrix::Identity(mi, mi);
  return gram.cwiseAbs().maxCoeff();
}

}  // namespace optsample
