#pragma once

// Basic vocabulary shared by every module: scalars, points, RNG streams and
// the exception hierarchy.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace optsample {

using Scalar = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

/// Explicit random state. Nothing in the library touches a global generator.
using Rng = std::mt19937_64;

/// Derives an independent stream seed from a master seed and a stream id
/// (splitmix64 finalizer). Trials use this so results do not depend on
/// scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Uniform draw in [0, 1).
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// A point of a domain with at most three coordinates. Finite-set domains
/// store the element index in coordinate 0.
class Point {
public:
  static constexpr std::size_t kMaxDim = 3;

  Point() = default;
  explicit Point(double x) : dim_(1) { c_[0] = x; }
  Point(double x, double y) : dim_(2) {
    c_[0] = x;
    c_[1] = y;
  }
  Point(double x, double y, double z) : dim_(3) {
    c_[0] = x;
    c_[1] = y;
    c_[2] = z;
  }
  static Point zeros(std::size_t dim);

  std::size_t dim() const { return dim_; }
  double operator[](std::size_t i) const { return c_[i]; }
  double& operator[](std::size_t i) { return c_[i]; }

  bool operator==(const Point& other) const;

private:
  std::array<double, kMaxDim> c_{};
  std::uint8_t dim_ = 1;
};

class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Raised when an input violates an operation's precondition.
class PreconditionError : public Error {
public:
  using Error::Error;
};

/// The weighted Gram matrix of a design fails the singularity gate; the
/// discretization inequality does not hold on the requested space.
class IllPosedDesign : public Error {
public:
  using Error::Error;
};

/// A point-suggestion oracle ran out of budget or candidates.
class OracleExhausted : public Error {
public:
  using Error::Error;
};

/// A rejection sampler or redraw loop exceeded its cap.
class BudgetExceeded : public Error {
public:
  using Error::Error;
};

class NonConvergence : public Error {
public:
  using Error::Error;
};

/// The tail of a singular-value sequence is identically zero.
class DegenerateTail : public Error {
public:
  using Error::Error;
};

class ConfigError : public Error {
public:
  using Error::Error;
};

}  // namespace optsample
