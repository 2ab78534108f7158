#pragma once

// Data-parallel inner loops. Each kernel has a portable scalar reference and,
// on x86-64, an AVX2 variant. The variant is chosen once at runtime from the
// CPU feature bits; OPTSAMPLE_SIMD=scalar forces the reference path.

#include <cstddef>
#include <string_view>

namespace optsample::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  /// min over i of max over k < d of |q[k] - cols[k][i]| (sup-norm distance
  /// from q to a point cloud stored column-wise).
  double (*min_sup_distance)(const double* q, const double* const* cols, std::size_t d,
                             std::size_t n);
  /// min over i of the circle distance between q and pts[i]; all inputs in [0, 1).
  double (*min_torus_distance)(double q, const double* pts, std::size_t n);
  /// sum over i of w[i] * (re[i]^2 + im[i]^2).
  double (*weighted_abs2_sum)(const double* re, const double* im, const double* w,
                              std::size_t n);
};

namespace scalar {
double min_sup_distance(const double* q, const double* const* cols, std::size_t d,
                        std::size_t n);
double min_torus_distance(double q, const double* pts, std::size_t n);
double weighted_abs2_sum(const double* re, const double* im, const double* w, std::size_t n);
}  // namespace scalar

namespace avx2 {
/// True when this build carries the AVX2 variants (x86-64 only).
bool compiled();
double min_sup_distance(const double* q, const double* const* cols, std::size_t d,
                        std::size_t n);
double min_torus_distance(double q, const double* pts, std::size_t n);
double weighted_abs2_sum(const double* re, const double* im, const double* w, std::size_t n);
}  // namespace avx2

bool isa_available(Isa isa);
const KernelTable& table_for(Isa isa);
const KernelTable& active();
std::string_view isa_name(Isa isa);

}  // namespace optsample::kernels
