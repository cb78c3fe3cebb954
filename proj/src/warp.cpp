#include "tacifa/warp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace tacifa {

WarpParams::WarpParams(BSplineBasis b, Eigen::VectorXd k)
    : basis(std::move(b)), kappa(std::move(k)) {
  if (basis.size() < 2)
    throw std::invalid_argument("WarpParams: warp basis needs at least 2 functions");
  if (kappa.size() != basis.size() - 1)
    throw std::invalid_argument("WarpParams: kappa must have J-1 entries");
  if (!kappa.allFinite())
    throw std::invalid_argument("WarpParams: kappa must be finite");
}

Eigen::VectorXd gamma_from_kappa(const Eigen::VectorXd& kappa) {
  const int J = static_cast<int>(kappa.size()) + 1;
  if (J < 2) throw std::invalid_argument("gamma_from_kappa: empty kappa");
  Eigen::VectorXd gamma(J);
  const double shift = kappa.maxCoeff();
  gamma[0] = 0.0;
  double run = 0.0;
  for (int j = 1; j < J; ++j) {
    run += std::exp(kappa[j - 1] - shift);
    gamma[j] = run;
  }
  for (int j = 1; j < J; ++j) gamma[j] /= run;  // gamma[J-1] lands on 1 exactly
  return gamma;
}

double eval_warp(const WarpParams& w, double t) {
  const Eigen::VectorXd gamma = gamma_from_kappa(w.kappa);
  int first;
  double buf[32];
  w.basis.eval_local(t, first, buf, nullptr);
  double m = 0.0;
  for (int r = 0; r <= w.basis.degree(); ++r) m += gamma[first + r] * buf[r];
  return std::clamp(m, 0.0, 1.0);
}

Eigen::VectorXd eval_warp(const WarpParams& w, std::span<const double> grid) {
  const Eigen::VectorXd gamma = gamma_from_kappa(w.kappa);
  Eigen::VectorXd out(grid.size());
  int first;
  double buf[32];
  for (std::size_t g = 0; g < grid.size(); ++g) {
    w.basis.eval_local(grid[g], first, buf, nullptr);
    double m = 0.0;
    for (int r = 0; r <= w.basis.degree(); ++r) m += gamma[first + r] * buf[r];
    out[g] = std::clamp(m, 0.0, 1.0);
  }
  return out;
}

Eigen::VectorXd grad_warp_wrt_kappa(const WarpParams& w, double t) {
  const int J = w.J();
  const Eigen::VectorXd values = w.basis.eval(t);
  const Eigen::VectorXd gamma = gamma_from_kappa(w.kappa);
  const double m = gamma.dot(values);

  // softmax weights of the increments
  const double shift = w.kappa.maxCoeff();
  Eigen::VectorXd sm(J - 1);
  double total = 0.0;
  for (int q = 0; q < J - 1; ++q) {
    sm[q] = std::exp(w.kappa[q] - shift);
    total += sm[q];
  }
  sm /= total;

  // dM/dkappa_q = sm_q * (sum_{l >= q+1} B_l(t) - M(t))
  Eigen::VectorXd grad(J - 1);
  double suffix = 0.0;
  for (int q = J - 2; q >= 0; --q) {
    suffix += values[q + 1];
    grad[q] = sm[q] * (suffix - m);
  }
  return grad;
}

}  // namespace tacifa
