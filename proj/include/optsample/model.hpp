#pragma once

// Domains, measures and basis families consumed by every other module.

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "optsample/core.hpp"

namespace optsample {

enum class DomainKind { UnitInterval, UnitCube, Circle, FiniteSet };

class Domain {
public:
  static Domain unit_interval();
  static Domain unit_cube(std::size_t dim);
  static Domain circle();
  static Domain finite_set(std::size_t size);

  DomainKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  /// Number of elements for finite-set domains, 0 otherwise.
  std::size_t size() const { return size_; }

  /// Interval: |x - y|. Circle: min_k |x + k - y|. Cube: sup-norm.
  /// Finite set: discrete metric.
  double distance(const Point& x, const Point& y) const;
  bool contains(const Point& x) const;
  std::string describe() const;

private:
  Domain(DomainKind kind, std::size_t dim, std::size_t size)
      : kind_(kind), dim_(dim), size_(size) {}
  DomainKind kind_;
  std::size_t dim_;
  std::size_t size_;
};

/// Circle distance on [0, 1) with wrap-around, never larger than 1/2.
double torus_distance(double x, double y);

/// A probability measure on a domain. Either the uniform (or counting)
/// reference measure, or a reference measure re-weighted by an evaluable
/// density with a known upper bound.
class Measure {
public:
  static Measure uniform(Domain domain);
  /// Finite set with explicit probabilities (normalized internally).
  static Measure finite(std::vector<double> probabilities);
  /// Uniform reference re-weighted by `density`; `density_sup` bounds it.
  static Measure with_density(Domain domain, std::function<double(const Point&)> density,
                              double density_sup);

  const Domain& domain() const { return domain_; }
  double total_mass() const { return 1.0; }
  bool has_density() const { return static_cast<bool>(density_); }
  double density(const Point& x) const { return density_ ? density_(x) : 1.0; }

  /// Draws from the reference (uniform/counting) measure, ignoring any density.
  Point sample_reference(Rng& rng) const;
  /// Draws from the measure itself (rejection against the reference when a
  /// density is present).
  Point sample(Rng& rng) const;

private:
  explicit Measure(Domain domain) : domain_(domain) {}
  Domain domain_;
  std::vector<double> cumulative_;
  std::function<double(const Point&)> density_;
  double density_sup_ = 1.0;
};

/// Rejection sampling from `weight(x) dmu(x)` (unnormalized) using an upper
/// bound on `weight`. Draws with weight(x) <= 0 are always rejected.
Point rejection_sample(const Measure& measure, const std::function<double(const Point&)>& weight,
                       double weight_sup, Rng& rng, std::size_t max_tries);

/// An indexed family of scalar functions on a domain, orthonormal against a
/// reference measure. Index order is fixed per family since every prefix
/// space V_m depends on it.
class Basis {
public:
  virtual ~Basis() = default;

  virtual std::string_view name() const = 0;
  virtual const Domain& domain() const = 0;
  /// Number of elements; nullopt for infinite families.
  virtual std::optional<std::size_t> dim() const = 0;
  virtual Scalar eval(std::size_t k, const Point& x) const = 0;
  /// out[j] = b_{first + j}(x).
  virtual void eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const;

  /// Uniform bound max_k ||b_k||_inf, when one exists.
  virtual std::optional<double> theta() const { return std::nullopt; }
  /// sup_x (1/m) sum_{k<m} |b_k(x)|^2, when known.
  virtual std::optional<double> christoffel_sup(std::size_t m) const;
  /// Index of the element that is identically 1, if any.
  virtual std::optional<std::size_t> constant_index() const { return std::nullopt; }
  /// True when the family is exactly orthonormal under the uniform measure
  /// on its domain (so Gram-type integrals are known in closed form).
  virtual bool exactly_orthonormal() const { return false; }

  void check_index(std::size_t k) const;
};

using BasisPtr = std::shared_ptr<const Basis>;

/// Complex exponentials e^{2 pi i f x} on the circle. Index order by
/// increasing |f|, positive before negative: f = 0, 1, -1, 2, -2, ...
class TrigBasis final : public Basis {
public:
  explicit TrigBasis(Domain domain = Domain::circle());
  static long frequency(std::size_t k);
  /// Inverse of frequency().
  static std::size_t index_of(long frequency);

  std::string_view name() const override { return "trig"; }
  const Domain& domain() const override { return domain_; }
  std::optional<std::size_t> dim() const override { return std::nullopt; }
  Scalar eval(std::size_t k, const Point& x) const override;
  void eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const override;
  std::optional<double> theta() const override { return 1.0; }
  std::optional<double> christoffel_sup(std::size_t) const override { return 1.0; }
  std::optional<std::size_t> constant_index() const override { return 0; }
  bool exactly_orthonormal() const override { return true; }

private:
  Domain domain_;
};

/// L2-normalized Legendre polynomials sqrt(2k+1) P_k(2x-1) on [0, 1].
class LegendreBasis final : public Basis {
public:
  LegendreBasis();
  std::string_view name() const override { return "legendre"; }
  const Domain& domain() const override { return domain_; }
  std::optional<std::size_t> dim() const override { return std::nullopt; }
  Scalar eval(std::size_t k, const Point& x) const override;
  void eval_block(std::size_t first, std::span<Scalar> out, const Point& x) const override;
  std::optional<double> christoffel_sup(std::size_t m) const override;
  std::optional<std::size_t> constant_index() const override { return 0; }
  bool exactly_orthonormal() const override { return true; }

private:
  Domain domain_;
};

/// Haar system on [0, 1]: b_0 = 1, b_{2^j + l} = 2^{j/2} (+1 on the left
/// half, -1 on the right half of [l 2^-j, (l+1) 2^-j)).
class HaarBasis final : public Basis {
public:
  HaarBasis();
  std::string_view name() const override { return "haar"; }
  const Domain& domain() const override { return domain_; }
  std::optional<std::size_t> dim() const override { return std::nullopt; }
  Scalar eval(std::size_t k, const Point& x) const override;
  std::optional<double> christoffel_sup(std::size_t m) const override;
  std::optional<std::size_t> constant_index() const override { return 0; }
  bool exactly_orthonormal() const override { return true; }

private:
  Domain domain_;
};

/// Real basis functions tabulated on a sorted grid in [0, 1], linearly
/// interpolated. Orthonormality is the caller's contract; check it with
/// orthonormality_defect().
class TabulatedBasis final : public Basis {
public:
  /// values[k][g] is b_k at grid[g].
  TabulatedBasis(std::vector<double> grid, std::vector<std::vector<double>> values);
  /// CSV: header row, first column x, one column per basis function.
  static std::shared_ptr<TabulatedBasis> from_csv(const std::string& path);

  std::string_view name() const override { return "custom-tabulated"; }
  const Domain& domain() const override { return domain_; }
  std::optional<std::size_t> dim() const override { return values_.size(); }
  Scalar eval(std::size_t k, const Point& x) const override;
  std::optional<double> theta() const override { return theta_; }
  std::optional<double> christoffel_sup(std::size_t m) const override;

private:
  Domain domain_;
  std::vector<double> grid_;
  std::vector<std::vector<double>> values_;
  double theta_ = 0.0;
};

/// A finite family given by a callable; used for synthetic and test families.
class FunctionBasis final : public Basis {
public:
  using Fn = std::function<Scalar(std::size_t, const Point&)>;
  FunctionBasis(std::string name, Domain domain, std::size_t dim, Fn fn,
                std::optional<double> theta = std::nullopt);

  std::string_view name() const override { return name_; }
  const Domain& domain() const override { return domain_; }
  std::optional<std::size_t> dim() const override { return dim_; }
  Scalar eval(std::size_t k, const Point& x) const override;
  std::optional<double> theta() const override { return theta_; }

private:
  std::string name_;
  Domain domain_;
  std::size_t dim_;
  Fn fn_;
  std::optional<double> theta_;
};

/// Builds a basis by its configuration name: trig, legendre, haar,
/// custom-tabulated (requires `table_path`).
BasisPtr make_basis(std::string_view name, const std::string& table_path = {});

/// Points with positive weights; a multiset, so repeated points are allowed.
struct SampledDesign {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  /// Throws PreconditionError on empty designs, length mismatch or
  /// non-positive weights.
  void validate() const;
  static SampledDesign equal_weights(std::vector<Point> points, double weight);
};

/// A deterministic function with optional exact coefficients over a basis.
class TargetFunction {
public:
  using Fn = std::function<Scalar(const Point&)>;
  explicit TargetFunction(Fn fn) : fn_(std::move(fn)) {}
  /// f = sum_k coefficients[k] b_k.
  static TargetFunction from_coefficients(BasisPtr basis, CVector coefficients);

  Scalar operator()(const Point& x) const { return fn_(x); }
  std::vector<Scalar> sample(std::span<const Point> points) const;
  const std::optional<CVector>& exact_coefficients() const { return coefficients_; }

private:
  Fn fn_;
  std::optional<CVector> coefficients_;
};

/// Entry j is basis.eval(first + j, x). Throws PreconditionError when the
/// range leaves basis.dim().
CVector eval_basis_block(const Basis& basis, std::size_t first, std::size_t count, const Point& x);

/// n x m matrix B with B(i, k) = b_k(x_i).
CMatrix evaluation_matrix(const Basis& basis, std::size_t m, std::span<const Point> points);

/// max_{j,k<m} |MC<b_j, b_k> - delta_jk| with `budget` draws from `measure`.
double orthonormality_defect(const Basis& basis, const Measure& measure, std::size_t m,
                             std::size_t budget, std::uint64_t seed);

}  // namespace optsample
