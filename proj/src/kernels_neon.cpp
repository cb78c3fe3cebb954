// NEON variants of the flat kernels, built only on aarch64 where NEON is
// baseline. Same contracts as the scalar reference up to reassociation.

#include <arm_neon.h>

#include <cstddef>

#include "kernels_detail.hpp"

namespace tacifa::kernels::detail {

namespace {

inline double hsum(float64x2_t v) { return vgetq_lane_f64(v, 0) + vgetq_lane_f64(v, 1); }

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double wssr_neon(const double* w, const double* x, const double* m, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vsubq_f64(vld1q_f64(x + i), vld1q_f64(m + i));
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), r), r);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double r = x[i] - m[i];
    s += w[i] * r * r;
  }
  return s;
}

double wrdot_neon(const double* w, const double* x, const double* m,
                  const double* v, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t r = vsubq_f64(vld1q_f64(x + i), vld1q_f64(m + i));
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + i), r), vld1q_f64(v + i));
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += w[i] * (x[i] - m[i]) * v[i];
  return s;
}

void axpy_neon(double a, const double* x, double* y, std::size_t n) {
  // mul+add rather than fma: elementwise results must match the scalar
  // backend bit for bit (reductions only need tolerance agreement).
  const float64x2_t av = vdupq_n_f64(a);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2)
    vst1q_f64(y + i, vaddq_f64(vld1q_f64(y + i), vmulq_f64(av, vld1q_f64(x + i))));
  for (; i < n; ++i) y[i] += a * x[i];
}

double sum_abs_neon(const double* x, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vabsq_f64(vld1q_f64(x + i)));
  double s = hsum(acc);
  for (; i < n; ++i) s += x[i] < 0.0 ? -x[i] : x[i];
  return s;
}

double wssr_block_neon(const double* w, std::size_t p, const double* x,
                       const double* m, std::size_t ncols) {
  double s = 0.0;
  for (std::size_t c = 0; c < ncols; ++c) s += wssr_neon(w, x + c * p, m + c * p, p);
  return s;
}

}  // namespace

const Vtable& neon_vtable() {
  static const Vtable vt = {dot_neon, wssr_neon,     wrdot_neon,
                            axpy_neon, sum_abs_neon, wssr_block_neon};
  return vt;
}

}  // namespace tacifa::kernels::detail
