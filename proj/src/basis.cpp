#include "tacifa/basis.hpp"

#include <stdexcept>

namespace tacifa {

namespace {
constexpr int kMaxDegree = 24;
}

BSplineBasis::BSplineBasis(int degree, int num_basis)
    : degree_(degree), num_basis_(num_basis) {
  if (degree < 1 || degree > kMaxDegree)
    throw std::invalid_argument("BSplineBasis: degree must be in [1, 24]");
  if (num_basis < degree + 1)
    throw std::invalid_argument(
        "BSplineBasis: need at least degree+1 basis functions");
  const int spans = num_basis - degree;
  knots_.assign(num_basis + degree + 1, 0.0);
  for (int i = 1; i < spans; ++i)
    knots_[degree + i] = static_cast<double>(i) / spans;
  for (int i = num_basis; i < num_basis + degree + 1; ++i) knots_[i] = 1.0;
}

int BSplineBasis::find_span(double t) const {
  const int spans = num_basis_ - degree_;
  int s = static_cast<int>(t * spans);
  if (s >= spans) s = spans - 1;
  int i = degree_ + s;
  while (i > degree_ && t < knots_[i]) --i;
  while (i < num_basis_ - 1 && t >= knots_[i + 1]) ++i;
  return i;
}

void BSplineBasis::eval_local(double t, int& first, double* value,
                              double* deriv) const {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::domain_error("BSplineBasis: argument outside [0, 1]");
  const int k = degree_;
  const int i = find_span(t);
  first = i - k;

  double nm1[kMaxDegree + 1];
  if (t == 0.0 || t == 1.0) {
    // At the clamped ends exactly one function of each degree is 1 and the
    // rest vanish; writing that directly keeps endpoint values exact instead
    // of accumulating rounding through the triangle.
    const bool at_end = t == 1.0;
    if (value) {
      for (int r = 0; r <= k; ++r) value[r] = 0.0;
      value[at_end ? k : 0] = 1.0;
    }
    if (deriv) {
      for (int r = 0; r < k; ++r) nm1[r] = 0.0;
      nm1[at_end ? k - 1 : 0] = 1.0;
    }
  } else {
    // Cox-de Boor triangle over the k+1 functions alive on span i.
    double left[kMaxDegree + 1], right[kMaxDegree + 1];
    double nv[kMaxDegree + 1];
    nv[0] = 1.0;
    if (deriv && k == 1) nm1[0] = 1.0;
    for (int j = 1; j <= k; ++j) {
      left[j] = t - knots_[i + 1 - j];
      right[j] = knots_[i + j] - t;
      double saved = 0.0;
      for (int r = 0; r < j; ++r) {
        const double tmp = nv[r] / (right[r + 1] + left[j - r]);
        nv[r] = saved + right[r + 1] * tmp;
        saved = left[j - r] * tmp;
      }
      nv[j] = saved;
      if (deriv && j == k - 1)
        for (int r = 0; r <= j; ++r) nm1[r] = nv[r];
    }
    if (value)
      for (int r = 0; r <= k; ++r) value[r] = nv[r];
  }
  if (deriv) {
    for (int r = 0; r <= k; ++r) {
      const int f = first + r;
      double a = 0.0, b = 0.0;
      if (r >= 1) {
        const double den = knots_[f + k] - knots_[f];
        if (den > 0.0) a = nm1[r - 1] / den;
      }
      if (r <= k - 1) {
        const double den = knots_[f + k + 1] - knots_[f + 1];
        if (den > 0.0) b = nm1[r] / den;
      }
      deriv[r] = k * (a - b);
    }
  }
}

Eigen::VectorXd BSplineBasis::eval(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_basis_);
  int first;
  double buf[kMaxDegree + 1];
  eval_local(t, first, buf, nullptr);
  for (int r = 0; r <= degree_; ++r) out[first + r] = buf[r];
  return out;
}

Eigen::VectorXd BSplineBasis::eval_derivative(double t) const {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(num_basis_);
  int first;
  double buf[kMaxDegree + 1];
  eval_local(t, first, nullptr, buf);
  for (int r = 0; r <= degree_; ++r) out[first + r] = buf[r];
  return out;
}

Eigen::MatrixXd BSplineBasis::eval_matrix(std::span<const double> grid) const {
  if (grid.empty())
    throw std::invalid_argument("BSplineBasis::eval_matrix: empty grid");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.size(), num_basis_);
  int first;
  double buf[kMaxDegree + 1];
  for (std::size_t g = 0; g < grid.size(); ++g) {
    eval_local(grid[g], first, buf, nullptr);
    for (int r = 0; r <= degree_; ++r) out(g, first + r) = buf[r];
  }
  return out;
}

Eigen::MatrixXd BSplineBasis::eval_derivative_matrix(
    std::span<const double> grid) const {
  if (grid.empty())
    throw std::invalid_argument(
        "BSplineBasis::eval_derivative_matrix: empty grid");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(grid.size(), num_basis_);
  int first;
  double buf[kMaxDegree + 1];
  for (std::size_t g = 0; g < grid.size(); ++g) {
    eval_local(grid[g], first, nullptr, buf);
    for (int r = 0; r <= degree_; ++r) out(g, first + r) = buf[r];
  }
  return out;
}

}  // namespace tacifa
