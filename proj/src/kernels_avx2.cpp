// AVX2+FMA variants of the flat kernels. This translation unit is the only
// one built with -mavx2 -mfma; callers reach it through the runtime dispatch
// table, so the rest of the library stays runnable on any x86-64.

#include <immintrin.h>

#include <cstddef>

#include "kernels_detail.hpp"

namespace tacifa::kernels::detail {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wssr_avx2(const double* w, const double* x, const double* m, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r), r, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = x[i] - m[i];
    s += w[i] * r * r;
  }
  return s;
}

double wrdot_avx2(const double* w, const double* x, const double* m,
                  const double* v, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_sub_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(m + i));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + i), r),
                          _mm256_loadu_pd(v + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (x[i] - m[i]) * v[i];
  return s;
}

void axpy_avx2(double a, const double* x, double* y, std::size_t n) {
  // mul+add rather than fma: elementwise results must match the scalar
  // backend bit for bit (reductions only need tolerance agreement).
  const __m256d av = _mm256_set1_pd(a);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    _mm256_storeu_pd(
        y + i, _mm256_add_pd(_mm256_loadu_pd(y + i),
                             _mm256_mul_pd(av, _mm256_loadu_pd(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum_abs_avx2(const double* x, std::size_t n) {
  const __m256d mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4)
    acc = _mm256_add_pd(acc, _mm256_and_pd(mask, _mm256_loadu_pd(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] < 0.0 ? -x[i] : x[i];
  return s;
}

double wssr_block_avx2(const double* w, std::size_t p, const double* x,
                       const double* m, std::size_t ncols) {
  double s = 0.0;
  for (std::size_t c = 0; c < ncols; ++c) s += wssr_avx2(w, x + c * p, m + c * p, p);
  return s;
}

}  // namespace

bool avx2_available() {
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}

const Vtable& avx2_vtable() {
  static const Vtable vt = {dot_avx2, wssr_avx2,     wrdot_avx2,
                            axpy_avx2, sum_abs_avx2, wssr_block_avx2};
  return vt;
}

}  // namespace tacifa::kernels::detail
