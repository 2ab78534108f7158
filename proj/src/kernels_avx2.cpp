// Compiled with -mavx2 -mfma on x86-64. Nothing here may run unless the
// dispatcher has confirmed CPU support.

#include <algorithm>
#include <cmath>
#include <limits>

#include "optsample/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#define OPTSAMPLE_HAVE_AVX2 1
#include <immintrin.h>
#else
#define OPTSAMPLE_HAVE_AVX2 0
#endif

namespace optsample::kernels::avx2 {

#if OPTSAMPLE_HAVE_AVX2

namespace {

inline __m256d abs_pd(__m256d v) {
  const __m256d sign = _mm256_set1_pd(-0.0);
  return _mm256_andnot_pd(sign, v);
}

inline double hmin(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_min_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_min_sd(lo, hi));
}

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  hi = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, hi));
}

}  // namespace

bool compiled() { return true; }

double min_sup_distance(const double* q, const double* const* cols, std::size_t d,
                        std::size_t n) {
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d dist = _mm256_setzero_pd();
    for (std::size_t k = 0; k < d; ++k) {
      const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(q[k]), _mm256_loadu_pd(cols[k] + i));
      dist = _mm256_max_pd(dist, abs_pd(diff));
    }
    best = _mm256_min_pd(best, dist);
  }
  double result = hmin(best);
  for (; i < n; ++i) {
    double dist = 0.0;
    for (std::size_t k = 0; k < d; ++k) {
      dist = std::max(dist, std::abs(q[k] - cols[k][i]));
    }
    result = std::min(result, dist);
  }
  return result;
}

double min_torus_distance(double q, const double* pts, std::size_t n) {
  const __m256d qv = _mm256_set1_pd(q);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d best = _mm256_set1_pd(std::numeric_limits<double>::infinity());
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d a = abs_pd(_mm256_sub_pd(qv, _mm256_loadu_pd(pts + i)));
    best = _mm256_min_pd(best, _mm256_min_pd(a, _mm256_sub_pd(one, a)));
  }
  double result = hmin(best);
  for (; i < n; ++i) {
    const double a = std::abs(q - pts[i]);
    result = std::min(result, std::min(a, 1.0 - a));
  }
  return result;
}

double weighted_abs2_sum(const double* re, const double* im, const double* w, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_loadu_pd(re + i);
    const __m256d m = _mm256_loadu_pd(im + i);
    const __m256d mag = _mm256_fmadd_pd(r, r, _mm256_mul_pd(m, m));
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(w + i), mag, acc);
  }
  double result = hsum(acc);
  for (; i < n; ++i) {
    result += w[i] * (re[i] * re[i] + im[i] * im[i]);
  }
  return result;
}

#else

bool compiled() { return false; }

double min_sup_distance(const double* q, const double* const* cols, std::size_t d,
                        std::size_t n) {
  return scalar::min_sup_distance(q, cols, d, n);
}

double min_torus_distance(double q, const double* pts, std::size_t n) {
  return scalar::min_torus_distance(q, pts, n);
}

double weighted_abs2_sum(const double* re, const double* im, const double* w, std::size_t n) {
  return scalar::weighted_abs2_sum(re, im, w, n);
}

#endif

}  // namespace optsample::kernels::avx2
