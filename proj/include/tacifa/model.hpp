#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "tacifa/basis.hpp"
#include "tacifa/warp.hpp"

namespace tacifa {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// A pair of multivariate series over one feature panel. Columns are time
/// points; observation times live in [0, 1] and strictly increase.
struct SeriesPair {
  Matrix x, y;  // p x T1, p x T2
  std::vector<double> grid_x, grid_y;
  std::vector<std::string> feature_names;  // optional, filled by io

  int p() const { return static_cast<int>(x.rows()); }
  int t1() const { return static_cast<int>(x.cols()); }
  int t2() const { return static_cast<int>(y.cols()); }
  void validate() const;
};

struct HyperParams {
  double nu1 = 3.0;                // local-precision prior Gamma(nu1, nu1)
  double a1 = 5.0, a2 = 5.0;       // column-scale gamma shapes (first, later)
  double sigma_prior_shape = 0.1;  // inverse-gamma on the noise variances
  double sigma_prior_rate = 0.1;
  double omega = 100.0;            // prior variance for Xi, kappa, beta
  int K = 10, K1 = 10, K2 = 10;    // factor-curve basis sizes
  int J = 20;                      // warp basis size
  int degree = 3, warp_degree = 3;
  int r_init = 0, r1_init = 0, r2_init = 0;  // 0: min(p,15) resp. min(p,8)

  void validate() const;
};

/// Multiplicative column shrinkage: entry (l,k) of a loading block has prior
/// precision phi(l,k) * tau(k), tau the running product of delta.
struct ShrinkageState {
  Matrix phi_shared, phi_ind1, phi_ind2;
  Vector delta_shared, delta_ind1, delta_ind2;
  Vector tau_shared, tau_ind1, tau_ind2;
};

struct ModelState {
  Matrix lambda;                // p x r shared loadings
  Matrix gamma1, gamma2;        // p x r1, p x r2 individual loadings
  Vector xi1, xi2;              // per-series diagonal scales on the shared block
  Matrix beta_shared;           // r x K factor-curve coefficients
  Matrix beta_ind1, beta_ind2;  // r1 x K1, r2 x K2
  Vector sigma1_sq, sigma2_sq;  // p noise variances
  WarpParams warp;
  ShrinkageState shrink;
  BSplineBasis basis_shared, basis_ind1, basis_ind2;

  int p() const { return static_cast<int>(lambda.rows()); }
  int r() const { return static_cast<int>(lambda.cols()); }
  int r1() const { return static_cast<int>(gamma1.cols()); }
  int r2() const { return static_cast<int>(gamma2.cols()); }
  void validate() const;
};

/// I - Lambda (Lambda' Lambda)^-1 Lambda' through a rank-revealing QR;
/// throws if the columns are numerically dependent.
Matrix projector(const Matrix& lambda);

/// Coefficient rows evaluated over a grid: rank x |grid|.
Matrix factor_curves(const Matrix& coef, const BSplineBasis& basis,
                     std::span<const double> grid);

/// Curves at arbitrary points in [0,1]; either output may be null.
void factor_curves_at(const Matrix& coef, const BSplineBasis& basis,
                      const Vector& pts, Matrix* value, Matrix* deriv);

/// Lambda Xi_w eta(.) over a grid; warped evaluates eta at M(t).
Matrix shared_mean(const ModelState& s, std::span<const double> grid, int which,
                   bool warped);

/// Psi Gamma_w zeta_w(t) over a grid.
Matrix individual_mean(const ModelState& s, std::span<const double> grid, int which);

/// Gaussian log likelihood of both series, normalizing constants included.
double log_likelihood(const ModelState& s, const SeriesPair& data);

/// Likelihood with the shared block given as loading products and curve
/// coefficients (the representation rotation acts on); individual blocks,
/// noise and warp come from `base`.
double log_likelihood_products(const Matrix& loading1, const Matrix& loading2,
                               const Matrix& eta_coef, const ModelState& base,
                               const SeriesPair& data);

/// Negative log posterior kernel in kappa with every other block held fixed,
/// plus its analytic gradient. Caches everything reusable across leapfrog
/// steps; `data` (and the state's Y-side residual structure) must outlive it.
class KappaObjective {
 public:
  KappaObjective(const ModelState& s, const SeriesPair& data, double omega);
  double value(const Vector& kappa) const;
  Vector gradient(const Vector& kappa) const;

 private:
  Matrix resid_base_;   // Y minus the individual mean, p x T2
  Matrix loading2_;     // Lambda diag(xi2), p x r
  Vector w2_;           // 1 / sigma2^2
  Matrix warp_basis_;   // T2 x J
  Matrix warp_suffix_;  // T2 x (J-1), suffix sums of basis columns
  Matrix beta_;         // r x K
  BSplineBasis basis_shared_;
  double omega_;
};

/// Negative log posterior kernel in one shared-loading column, other blocks
/// fixed; the projector varies with the column through the rank-one update
/// of the fixed remaining-columns projector.
class LambdaColObjective {
 public:
  LambdaColObjective(const ModelState& s, const SeriesPair& data, int col);
  double value(const Vector& u) const;
  Vector gradient(const Vector& u) const;

 private:
  const Matrix* x_;
  const Matrix* y_;
  Matrix g_;              // projector of the remaining columns' complement
  Matrix c1_, c2_;        // Gamma_w zeta_w over the grids
  Matrix gc1_, gc2_;      // G times the above
  Matrix base1_, base2_;  // shared mean without column `col`
  Vector eta1_, eta2_;    // factor-curve row for `col` (plain / warped)
  Vector w1_, w2_;        // 1 / sigma_w^2
  Vector prior_prec_;     // phi(.,col) * tau(col)
  double xi1j_, xi2j_;
};

double neg_loglik_kappa(const ModelState& s, const SeriesPair& data, double omega);
Vector grad_neg_loglik_kappa(const ModelState& s, const SeriesPair& data,
                             double omega);
double neg_loglik_lambda_col(const ModelState& s, const SeriesPair& data, int col);
Vector grad_neg_loglik_lambda_col(const ModelState& s, const SeriesPair& data,
                                  int col);

}  // namespace tacifa
