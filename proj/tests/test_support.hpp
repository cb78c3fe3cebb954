#pragma once

#include <vector>

#include "tacifa/model.hpp"
#include "tacifa/rng.hpp"

namespace testsupport {

inline std::vector<double> unit_grid(int n) {
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) g[i] = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
  return g;
}

inline tacifa::Matrix randn_matrix(tacifa::Rng& rng, int rows, int cols) {
  tacifa::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  return m;
}

inline tacifa::Vector randn_vector(tacifa::Rng& rng, int n) {
  tacifa::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

inline tacifa::Vector randu_vector(tacifa::Rng& rng, int n, double lo, double hi) {
  tacifa::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * rng.uniform();
  return v;
}

inline tacifa::Matrix randu_matrix(tacifa::Rng& rng, int rows, int cols, double lo,
                                   double hi) {
  tacifa::Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) m(i, j) = lo + (hi - lo) * rng.uniform();
  return m;
}

struct StateDims {
  int p = 6, r = 2, r1 = 2, r2 = 2;
  int K = 6, K1 = 5, K2 = 5, J = 6;
  int degree = 3, warp_degree = 3;
};

/// A random valid model state: full-rank loadings almost surely, positive
/// variances and shrinkage weights, moderate warp coefficients.
inline tacifa::ModelState make_state(tacifa::Rng& rng, const StateDims& d = {}) {
  using namespace tacifa;
  ShrinkageState sh;
  sh.phi_shared = randu_matrix(rng, d.p, d.r, 0.5, 1.5);
  sh.phi_ind1 = randu_matrix(rng, d.p, d.r1, 0.5, 1.5);
  sh.phi_ind2 = randu_matrix(rng, d.p, d.r2, 0.5, 1.5);
  auto cumprod = [](const Vector& v) {
    Vector out(v.size());
    double run = 1.0;
    for (int i = 0; i < v.size(); ++i) {
      run *= v[i];
      out[i] = run;
    }
    return out;
  };
  sh.delta_shared = randu_vector(rng, d.r, 0.8, 1.6);
  sh.delta_ind1 = randu_vector(rng, d.r1, 0.8, 1.6);
  sh.delta_ind2 = randu_vector(rng, d.r2, 0.8, 1.6);
  sh.tau_shared = cumprod(sh.delta_shared);
  sh.tau_ind1 = cumprod(sh.delta_ind1);
  sh.tau_ind2 = cumprod(sh.delta_ind2);

  BSplineBasis warp_basis(d.warp_degree, d.J);
  Vector kappa = 0.5 * randn_vector(rng, d.J - 1);

  return ModelState{randn_matrix(rng, d.p, d.r),
                    randn_matrix(rng, d.p, d.r1),
                    randn_matrix(rng, d.p, d.r2),
                    randn_vector(rng, d.r),
                    randn_vector(rng, d.r),
                    randn_matrix(rng, d.r, d.K),
                    randn_matrix(rng, d.r1, d.K1),
                    randn_matrix(rng, d.r2, d.K2),
                    randu_vector(rng, d.p, 0.5, 1.5),
                    randu_vector(rng, d.p, 0.5, 1.5),
                    WarpParams(warp_basis, kappa),
                    sh,
                    BSplineBasis(d.degree, d.K),
                    BSplineBasis(d.degree, d.K1),
                    BSplineBasis(d.degree, d.K2)};
}

inline tacifa::SeriesPair make_data(tacifa::Rng& rng, int p, int t1, int t2) {
  tacifa::SeriesPair s;
  s.x = randn_matrix(rng, p, t1);
  s.y = randn_matrix(rng, p, t2);
  s.grid_x = unit_grid(t1);
  s.grid_y = unit_grid(t2);
  return s;
}

/// Central finite difference of f along coordinate i at x.
template <class F>
double fd_central(const F& f, tacifa::Vector x, int i, double h) {
  x[i] += h;
  const double up = f(x);
  x[i] -= 2.0 * h;
  const double down = f(x);
  return (up - down) / (2.0 * h);
}

}  // namespace testsupport
