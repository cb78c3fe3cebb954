#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace tacifa {

/// Clamped B-spline basis on [0, 1] with equidistant interior knots.
/// Values form a partition of unity; the last basis function evaluates to 1
/// at t = 1 (the final span is treated as closed).
class BSplineBasis {
 public:
  BSplineBasis(int degree, int num_basis);

  int degree() const { return degree_; }
  int size() const { return num_basis_; }
  const std::vector<double>& knots() const { return knots_; }

  Eigen::VectorXd eval(double t) const;
  Eigen::VectorXd eval_derivative(double t) const;

  /// Rows are grid points, columns basis functions.
  Eigen::MatrixXd eval_matrix(std::span<const double> grid) const;
  Eigen::MatrixXd eval_derivative_matrix(std::span<const double> grid) const;

  /// The degree()+1 values that can be nonzero at t, belonging to basis
  /// functions first .. first+degree(). Either output may be null; non-null
  /// buffers need degree()+1 slots.
  void eval_local(double t, int& first, double* value, double* deriv) const;

 private:
  int find_span(double t) const;

  int degree_;
  int num_basis_;
  std::vector<double> knots_;  // num_basis_ + degree_ + 1 entries
};

}  // namespace tacifa
