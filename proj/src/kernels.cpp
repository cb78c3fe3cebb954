#include "tacifa/kernels.hpp"

#include <cstdlib>
#include <stdexcept>

#include "kernels_detail.hpp"

namespace tacifa::kernels {

namespace detail {

/*=============================== scalar ===============================*/

static double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

static double wssr_scalar(const double* w, const double* x, const double* m,
                          std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = x[i] - m[i];
    s += w[i] * r * r;
  }
  return s;
}

static double wrdot_scalar(const double* w, const double* x, const double* m,
                           const double* v, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += w[i] * (x[i] - m[i]) * v[i];
  return s;
}

static void axpy_scalar(double a, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

static double sum_abs_scalar(const double* x, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += x[i] < 0.0 ? -x[i] : x[i];
  return s;
}

static double wssr_block_scalar(const double* w, std::size_t p, const double* x,
                                const double* m, std::size_t ncols) {
  double s = 0.0;
  for (std::size_t c = 0; c < ncols; ++c)
    s += wssr_scalar(w, x + c * p, m + c * p, p);
  return s;
}

static const Vtable kScalar = {dot_scalar,      wssr_scalar,     wrdot_scalar,
                               axpy_scalar,     sum_abs_scalar,  wssr_block_scalar};

}  // namespace detail

/*============================== dispatch ==============================*/

namespace {

bool supported(Backend b) {
  switch (b) {
    case Backend::scalar:
      return true;
    case Backend::avx2:
#if TACIFA_HAVE_AVX2
      return detail::avx2_available();
#else
      return false;
#endif
    case Backend::neon:
#if TACIFA_HAVE_NEON
      return true;
#else
      return false;
#endif
  }
  return false;
}

Backend detect() {
  if (const char* env = std::getenv("TACIFA_KERNELS")) {
    const std::string v(env);
    if (v == "scalar") return Backend::scalar;
    if (v == "avx2" && supported(Backend::avx2)) return Backend::avx2;
    if (v == "neon" && supported(Backend::neon)) return Backend::neon;
    // "auto" and unrecognized values fall through to detection
  }
  if (supported(Backend::avx2)) return Backend::avx2;
  if (supported(Backend::neon)) return Backend::neon;
  return Backend::scalar;
}

const detail::Vtable* vtable_for(Backend b) {
  switch (b) {
#if TACIFA_HAVE_AVX2
    case Backend::avx2:
      return &detail::avx2_vtable();
#endif
#if TACIFA_HAVE_NEON
    case Backend::neon:
      return &detail::neon_vtable();
#endif
    default:
      return &detail::kScalar;
  }
}

struct Dispatch {
  Backend backend;
  const detail::Vtable* vt;
  Dispatch() : backend(detect()), vt(vtable_for(backend)) {}
};

Dispatch& dispatch() {
  static Dispatch d;
  return d;
}

}  // namespace

Backend active_backend() { return dispatch().backend; }

bool backend_supported(Backend b) { return supported(b); }

std::string backend_name(Backend b) {
  switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
  }
  return "?";
}

void set_backend(Backend b) {
  if (!supported(b))
    throw std::invalid_argument("kernels: backend " + backend_name(b) +
                                " not supported on this machine");
  dispatch().backend = b;
  dispatch().vt = vtable_for(b);
}

void reset_backend() {
  dispatch().backend = detect();
  dispatch().vt = vtable_for(dispatch().backend);
}

double dot(const double* a, const double* b, std::size_t n) {
  return dispatch().vt->dot(a, b, n);
}

double weighted_ssr(const double* w, const double* x, const double* m, std::size_t n) {
  return dispatch().vt->weighted_ssr(w, x, m, n);
}

double weighted_resid_dot(const double* w, const double* x, const double* m,
                          const double* v, std::size_t n) {
  return dispatch().vt->weighted_resid_dot(w, x, m, v, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
  dispatch().vt->axpy(a, x, y, n);
}

double sum_abs(const double* x, std::size_t n) {
  return dispatch().vt->sum_abs(x, n);
}

double weighted_ssr_block(const double* w, std::size_t p, const double* x,
                          const double* m, std::size_t ncols) {
  return dispatch().vt->weighted_ssr_block(w, p, x, m, ncols);
}

}  // namespace tacifa::kernels
