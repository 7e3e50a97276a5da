// Compiled with -mavx2 -mfma. Only raw double arithmetic and intrinsics live
// here so no inline std:: code is emitted with AVX encodings.
#include "kernels_avx2.hpp"

#include <immintrin.h>

namespace qsd::kernels::detail {
namespace {

// Lanes hold (re0, im0, re1, im1). Returns (sum of even lanes, sum of odd lanes).
inline void reduce_pairs(__m256d v, double& even, double& odd) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  even = _mm_cvtsd_f64(s);
  odd = _mm_cvtsd_f64(_mm_unpackhi_pd(s, s));
}

// sum_j a[j] x[j] for j in [0, m), interleaved complex.
inline void dot_plain(const double* a, const double* x, std::size_t m,
                      double& re, double& im) {
  __m256d prod = _mm256_setzero_pd();  // (ar xr, ai xi, ...)
  __m256d swap = _mm256_setzero_pd();  // (ar xi, ai xr, ...)
  std::size_t j = 0;
  for (; j + 2 <= m; j += 2) {
    const __m256d va = _mm256_loadu_pd(a + 2 * j);
    const __m256d vx = _mm256_loadu_pd(x + 2 * j);
    prod = _mm256_fmadd_pd(va, vx, prod);
    swap = _mm256_fmadd_pd(va, _mm256_permute_pd(vx, 0b0101), swap);
  }
  double pe, po, se, so;
  reduce_pairs(prod, pe, po);
  reduce_pairs(swap, se, so);
  re = pe - po;
  im = se + so;
  for (; j < m; ++j) {
    const double ar = a[2 * j], ai = a[2 * j + 1];
    const double xr = x[2 * j], xi = x[2 * j + 1];
    re += ar * xr - ai * xi;
    im += ar * xi + ai * xr;
  }
}

}  // namespace

void band_matvec_avx2(const double* a, std::size_t n, std::size_t lower,
                      std::size_t upper, const double* x, double* y) {
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j0 = i > lower ? i - lower : 0;
    const std::size_t j1 = (i + upper + 1 < n) ? i + upper + 1 : n;
    double re, im;
    dot_plain(a + 2 * (i * n + j0), x + 2 * j0, j1 - j0, re, im);
    y[2 * i] = re;
    y[2 * i + 1] = im;
  }
}

void cdot_avx2(const double* x, const double* y, std::size_t n, double& re,
               double& im) {
  __m256d prod = _mm256_setzero_pd();  // (xr yr, xi yi)
  __m256d swap = _mm256_setzero_pd();  // (xr yi, xi yr)
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    const __m256d vy = _mm256_loadu_pd(y + 2 * i);
    prod = _mm256_fmadd_pd(vx, vy, prod);
    swap = _mm256_fmadd_pd(vx, _mm256_permute_pd(vy, 0b0101), swap);
  }
  double pe, po, se, so;
  reduce_pairs(prod, pe, po);
  reduce_pairs(swap, se, so);
  re = pe + po;
  im = se - so;
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    const double yr = y[2 * i], yi = y[2 * i + 1];
    re += xr * yr + xi * yi;
    im += xr * yi - xi * yr;
  }
}

void axpy_avx2(double ar, double ai, const double* x, double* y,
               std::size_t n) {
  const __m256d vr = _mm256_set1_pd(ar);
  const __m256d vi = _mm256_setr_pd(-ai, ai, -ai, ai);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const __m256d vx = _mm256_loadu_pd(x + 2 * i);
    __m256d vy = _mm256_loadu_pd(y + 2 * i);
    vy = _mm256_fmadd_pd(vr, vx, vy);
    vy = _mm256_fmadd_pd(vi, _mm256_permute_pd(vx, 0b0101), vy);
    _mm256_storeu_pd(y + 2 * i, vy);
  }
  for (; i < n; ++i) {
    const double xr = x[2 * i], xi = x[2 * i + 1];
    y[2 * i] += ar * xr - ai * xi;
    y[2 * i + 1] += ar * xi + ai * xr;
  }
}

double norm2_avx2(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  const std::size_t m = 2 * n;
  std::size_t k = 0;
  for (; k + 8 <= m; k += 8) {
    const __m256d v0 = _mm256_loadu_pd(x + k);
    const __m256d v1 = _mm256_loadu_pd(x + k + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double e, o;
  reduce_pairs(_mm256_add_pd(acc0, acc1), e, o);
  double s = e + o;
  for (; k < m; ++k) s += x[k] * x[k];
  return s;
}

}  // namespace qsd::kernels::detail
