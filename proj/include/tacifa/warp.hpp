#pragma once

#include <Eigen/Dense>
#include <span>

#include "tacifa/basis.hpp"

namespace tacifa {

/// Monotone time warp on [0, 1]: M(t) = sum_j gamma_j B_j(t), where the
/// gamma are cumulative softmax increments of kappa. By construction
/// M(0) = 0, M(1) = 1 and M is nondecreasing for every real kappa; adding a
/// constant to kappa leaves the warp unchanged.
struct WarpParams {
  BSplineBasis basis;     // J = basis.size() functions
  Eigen::VectorXd kappa;  // length J - 1

  WarpParams(BSplineBasis b, Eigen::VectorXd k);
  int J() const { return basis.size(); }
};

/// Coefficients from kappa: gamma[0] = 0, gamma[J-1] = 1, strictly increasing.
Eigen::VectorXd gamma_from_kappa(const Eigen::VectorXd& kappa);

double eval_warp(const WarpParams& w, double t);
Eigen::VectorXd eval_warp(const WarpParams& w, std::span<const double> grid);

/// dM(t)/dkappa, length J-1; the zero vector at t = 0 and t = 1.
Eigen::VectorXd grad_warp_wrt_kappa(const WarpParams& w, double t);

}  // namespace tacifa
