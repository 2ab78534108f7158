#include "optsample/core.hpp"

namespace optsample {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

Point Point::zeros(std::size_t dim) {
  if (dim == 0 || dim > kMaxDim) {
    throw PreconditionError("point dimension must be in [1, 3]");
  }
  Point p;
  p.dim_ = static_cast<std::uint8_t>(dim);
  return p;
}

bool Point::operator==(const Point& other) const {
  if (dim_ != other.dim_) return false;
  for (std::size_t i = 0; i < dim_; ++i) {
    if (c_[i] != other.c_[i]) return false;
  }
  return true;
}

}  // namespace optsample
