#pragma once

#include <cstddef>

// Backend function table shared between the dispatcher and the per-ISA
// translation units. Not installed; internal to the library build.
namespace tacifa::kernels::detail {

struct Vtable {
  double (*dot)(const double*, const double*, std::size_t);
  double (*weighted_ssr)(const double*, const double*, const double*, std::size_t);
  double (*weighted_resid_dot)(const double*, const double*, const double*,
                               const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  double (*sum_abs)(const double*, std::size_t);
  double (*weighted_ssr_block)(const double*, std::size_t, const double*,
                               const double*, std::size_t);
};

#if TACIFA_HAVE_AVX2
const Vtable& avx2_vtable();
bool avx2_available();
#endif
#if TACIFA_HAVE_NEON
const Vtable& neon_vtable();
#endif

}  // namespace tacifa::kernels::detail
