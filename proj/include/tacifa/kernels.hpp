#pragma once

#include <cstddef>
#include <string>

namespace tacifa::kernels {

/// Vector backends for the flat arithmetic loops (residual reductions,
/// leapfrog axpy updates, contribution sums). `reset_backend` re-runs
/// detection, which picks the widest instruction set the CPU supports
/// unless the TACIFA_KERNELS environment variable ("scalar", "avx2",
/// "neon", "auto") overrides it. All backends compute identical sums up
/// to floating-point reassociation; the scalar backend is the reference.
enum class Backend { scalar, avx2, neon };

Backend active_backend();
bool backend_supported(Backend b);
std::string backend_name(Backend b);
void set_backend(Backend b);  // throws std::invalid_argument if unsupported here
void reset_backend();

double dot(const double* a, const double* b, std::size_t n);

/// sum_i w[i] * (x[i] - m[i])^2
double weighted_ssr(const double* w, const double* x, const double* m, std::size_t n);

/// sum_i w[i] * (x[i] - m[i]) * v[i]
double weighted_resid_dot(const double* w, const double* x, const double* m,
                          const double* v, std::size_t n);

/// y += a * x
void axpy(double a, const double* x, double* y, std::size_t n);

double sum_abs(const double* x, std::size_t n);

/// Column-major p x ncols panels sharing one weight vector of length p:
/// sum over all entries of w[row] * (x - m)^2.
double weighted_ssr_block(const double* w, std::size_t p, const double* x,
                          const double* m, std::size_t ncols);

}  // namespace tacifa::kernels
