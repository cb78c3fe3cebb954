#include "tacifa/model.hpp"

#include <cmath>
#include <stdexcept>

#include "tacifa/kernels.hpp"

namespace tacifa {

namespace {

constexpr double kTwoPi = 6.283185307179586;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

void check_grid(const std::vector<double>& grid, const char* name) {
  require(!grid.empty(), std::string("SeriesPair: empty ") + name);
  double prev = -1.0;
  for (double t : grid) {
    require(std::isfinite(t) && t >= 0.0 && t <= 1.0,
            std::string("SeriesPair: ") + name + " outside [0, 1]");
    require(t > prev, std::string("SeriesPair: ") + name + " not strictly increasing");
    prev = t;
  }
}

double gaussian_loglik_term(const Matrix& data, const Matrix& mean, const Vector& sigma_sq) {
  const int p = static_cast<int>(data.rows());
  const int T = static_cast<int>(data.cols());
  Vector w(p);
  double constant = 0.0;
  for (int l = 0; l < p; ++l) {
    if (!(sigma_sq[l] > 0.0))
      throw std::domain_error("log_likelihood: non-positive noise variance");
    w[l] = 1.0 / sigma_sq[l];
    constant += std::log(kTwoPi * sigma_sq[l]);
  }
  const double ssr =
      kernels::weighted_ssr_block(w.data(), p, data.data(), mean.data(), T);
  return -0.5 * (T * constant + ssr);
}

}  // namespace

void SeriesPair::validate() const {
  require(x.rows() >= 1, "SeriesPair: no features");
  require(x.rows() == y.rows(), "SeriesPair: feature panels differ");
  require(x.cols() == static_cast<Eigen::Index>(grid_x.size()),
          "SeriesPair: x columns and grid_x disagree");
  require(y.cols() == static_cast<Eigen::Index>(grid_y.size()),
          "SeriesPair: y columns and grid_y disagree");
  check_grid(grid_x, "grid_x");
  check_grid(grid_y, "grid_y");
  require(x.allFinite() && y.allFinite(), "SeriesPair: non-finite data");
  if (!feature_names.empty())
    require(feature_names.size() == static_cast<std::size_t>(x.rows()),
            "SeriesPair: feature_names length mismatch");
}

void HyperParams::validate() const {
  require(nu1 > 0.0 && a1 > 0.0 && a2 > 0.0, "HyperParams: gamma shapes must be positive");
  require(sigma_prior_shape > 0.0 && sigma_prior_rate > 0.0,
          "HyperParams: noise prior parameters must be positive");
  require(omega > 0.0, "HyperParams: omega must be positive");
  require(degree >= 1 && warp_degree >= 1, "HyperParams: degrees must be >= 1");
  require(K >= degree + 1 && K1 >= degree + 1 && K2 >= degree + 1,
          "HyperParams: factor bases need at least degree+1 functions");
  require(J >= 2 && J >= warp_degree + 1, "HyperParams: warp basis too small");
  require(r_init >= 0 && r1_init >= 0 && r2_init >= 0,
          "HyperParams: negative initial rank");
}

void ModelState::validate() const {
  const int np = p();
  require(np >= 1, "ModelState: empty loading matrix");
  require(r() >= 1 && r1() >= 1 && r2() >= 1, "ModelState: ranks must be >= 1");
  require(gamma1.rows() == np && gamma2.rows() == np,
          "ModelState: loading row counts disagree");
  require(xi1.size() == r() && xi2.size() == r(), "ModelState: xi length != r");
  require(beta_shared.rows() == r() && beta_shared.cols() == basis_shared.size(),
          "ModelState: beta_shared shape");
  require(beta_ind1.rows() == r1() && beta_ind1.cols() == basis_ind1.size(),
          "ModelState: beta_ind1 shape");
  require(beta_ind2.rows() == r2() && beta_ind2.cols() == basis_ind2.size(),
          "ModelState: beta_ind2 shape");
  require(sigma1_sq.size() == np && sigma2_sq.size() == np,
          "ModelState: sigma length != p");
  require((sigma1_sq.array() > 0.0).all() && (sigma2_sq.array() > 0.0).all(),
          "ModelState: non-positive noise variance");
  require(shrink.phi_shared.rows() == np && shrink.phi_shared.cols() == r(),
          "ModelState: phi_shared shape");
  require(shrink.phi_ind1.rows() == np && shrink.phi_ind1.cols() == r1(),
          "ModelState: phi_ind1 shape");
  require(shrink.phi_ind2.rows() == np && shrink.phi_ind2.cols() == r2(),
          "ModelState: phi_ind2 shape");
  require(shrink.delta_shared.size() == r() && shrink.tau_shared.size() == r(),
          "ModelState: shared shrinkage length != r");
  require(shrink.delta_ind1.size() == r1() && shrink.tau_ind1.size() == r1(),
          "ModelState: ind1 shrinkage length != r1");
  require(shrink.delta_ind2.size() == r2() && shrink.tau_ind2.size() == r2(),
          "ModelState: ind2 shrinkage length != r2");
  require((shrink.phi_shared.array() > 0.0).all() &&
              (shrink.phi_ind1.array() > 0.0).all() &&
              (shrink.phi_ind2.array() > 0.0).all(),
          "ModelState: non-positive phi");
  require((shrink.tau_shared.array() > 0.0).all() &&
              (shrink.tau_ind1.array() > 0.0).all() &&
              (shrink.tau_ind2.array() > 0.0).all(),
          "ModelState: non-positive tau");
}

Matrix projector(const Matrix& lambda) {
  const int p = static_cast<int>(lambda.rows());
  if (lambda.cols() == 0) return Matrix::Identity(p, p);
  Eigen::ColPivHouseholderQR<Matrix> qr(lambda);
  qr.setThreshold(1e-12);
  const int rank = static_cast<int>(qr.rank());
  if (rank < lambda.cols())
    throw std::runtime_error("projector: loading matrix numerically rank-deficient (rank " +
                             std::to_string(rank) + " < " +
                             std::to_string(lambda.cols()) + " columns)");
  Matrix q1 = qr.householderQ() * Matrix::Identity(p, rank);
  Matrix psi = -q1 * q1.transpose();
  psi.diagonal().array() += 1.0;
  return psi;
}

Matrix factor_curves(const Matrix& coef, const BSplineBasis& basis,
                     std::span<const double> grid) {
  require(coef.cols() == basis.size(), "factor_curves: coefficient columns != basis size");
  return coef * basis.eval_matrix(grid).transpose();
}

void factor_curves_at(const Matrix& coef, const BSplineBasis& basis,
                      const Vector& pts, Matrix* value, Matrix* deriv) {
  require(coef.cols() == basis.size(), "factor_curves_at: coefficient columns != basis size");
  const int r = static_cast<int>(coef.rows());
  const int n = static_cast<int>(pts.size());
  const int win = basis.degree() + 1;
  if (value) value->resize(r, n);
  if (deriv) deriv->resize(r, n);
  double vbuf[32], dbuf[32];
  int first;
  for (int t = 0; t < n; ++t) {
    basis.eval_local(pts[t], first, value ? vbuf : nullptr, deriv ? dbuf : nullptr);
    if (value)
      value->col(t).noalias() =
          coef.middleCols(first, win) * Eigen::Map<const Vector>(vbuf, win);
    if (deriv)
      deriv->col(t).noalias() =
          coef.middleCols(first, win) * Eigen::Map<const Vector>(dbuf, win);
  }
}

Matrix shared_mean(const ModelState& s, std::span<const double> grid, int which,
                   bool warped) {
  require(which == 1 || which == 2, "shared_mean: which must be 1 or 2");
  const Vector& xi = which == 1 ? s.xi1 : s.xi2;
  Matrix curves;
  if (warped) {
    const Vector m = eval_warp(s.warp, grid);
    factor_curves_at(s.beta_shared, s.basis_shared, m, &curves, nullptr);
  } else {
    curves = factor_curves(s.beta_shared, s.basis_shared, grid);
  }
  return (s.lambda * xi.asDiagonal()) * curves;
}

Matrix individual_mean(const ModelState& s, std::span<const double> grid, int which) {
  require(which == 1 || which == 2, "individual_mean: which must be 1 or 2");
  const Matrix& gamma = which == 1 ? s.gamma1 : s.gamma2;
  const Matrix& beta = which == 1 ? s.beta_ind1 : s.beta_ind2;
  const BSplineBasis& basis = which == 1 ? s.basis_ind1 : s.basis_ind2;
  return projector(s.lambda) * (gamma * factor_curves(beta, basis, grid));
}

double log_likelihood(const ModelState& s, const SeriesPair& data) {
  const Matrix mean1 = individual_mean(s, data.grid_x, 1) +
                       shared_mean(s, data.grid_x, 1, false);
  const Matrix mean2 = individual_mean(s, data.grid_y, 2) +
                       shared_mean(s, data.grid_y, 2, true);
  return gaussian_loglik_term(data.x, mean1, s.sigma1_sq) +
         gaussian_loglik_term(data.y, mean2, s.sigma2_sq);
}

double log_likelihood_products(const Matrix& loading1, const Matrix& loading2,
                               const Matrix& eta_coef, const ModelState& base,
                               const SeriesPair& data) {
  Matrix mean1 = individual_mean(base, data.grid_x, 1);
  mean1.noalias() += loading1 * factor_curves(eta_coef, base.basis_shared, data.grid_x);
  Matrix mean2 = individual_mean(base, data.grid_y, 2);
  const Vector m = eval_warp(base.warp, data.grid_y);
  Matrix curves;
  factor_curves_at(eta_coef, base.basis_shared, m, &curves, nullptr);
  mean2.noalias() += loading2 * curves;
  return gaussian_loglik_term(data.x, mean1, base.sigma1_sq) +
         gaussian_loglik_term(data.y, mean2, base.sigma2_sq);
}

/*========================== kappa objective ==========================*/

KappaObjective::KappaObjective(const ModelState& s, const SeriesPair& data,
                               double omega)
    : basis_shared_(s.basis_shared), omega_(omega) {
  require(omega > 0.0, "KappaObjective: omega must be positive");
  const Matrix ind2 = individual_mean(s, data.grid_y, 2);
  resid_base_ = data.y - ind2;
  loading2_ = s.lambda * s.xi2.asDiagonal();
  w2_ = s.sigma2_sq.cwiseInverse();
  warp_basis_ = s.warp.basis.eval_matrix(data.grid_y);
  const int J = s.warp.J();
  const int T2 = static_cast<int>(data.grid_y.size());
  warp_suffix_.resize(T2, J - 1);
  for (int t = 0; t < T2; ++t) {
    double suffix = 0.0;
    for (int q = J - 2; q >= 0; --q) {
      suffix += warp_basis_(t, q + 1);
      warp_suffix_(t, q) = suffix;
    }
  }
  beta_ = s.beta_shared;
}

double KappaObjective::value(const Vector& kappa) const {
  const int p = static_cast<int>(resid_base_.rows());
  const int T2 = static_cast<int>(resid_base_.cols());
  const Vector gamma = gamma_from_kappa(kappa);
  Vector m = warp_basis_ * gamma;
  for (int t = 0; t < T2; ++t) m[t] = std::clamp(m[t], 0.0, 1.0);
  Matrix eta;
  factor_curves_at(beta_, basis_shared_, m, &eta, nullptr);
  const Matrix mean = loading2_ * eta;
  const double ssr =
      kernels::weighted_ssr_block(w2_.data(), p, resid_base_.data(), mean.data(), T2);
  return 0.5 * ssr + 0.5 * kappa.squaredNorm() / omega_;
}

Vector KappaObjective::gradient(const Vector& kappa) const {
  const int p = static_cast<int>(resid_base_.rows());
  const int T2 = static_cast<int>(resid_base_.cols());
  const int Jm1 = static_cast<int>(kappa.size());
  const Vector gamma = gamma_from_kappa(kappa);
  Vector m_raw = warp_basis_ * gamma;
  Vector m = m_raw;
  for (int t = 0; t < T2; ++t) m[t] = std::clamp(m[t], 0.0, 1.0);

  Matrix eta, etad;
  factor_curves_at(beta_, basis_shared_, m, &eta, &etad);
  const Matrix mean = loading2_ * eta;
  const Matrix sens = loading2_ * etad;

  // c_t = sum_i w_i (resid - mean)_it * sens_it
  Vector c(T2);
  for (int t = 0; t < T2; ++t)
    c[t] = kernels::weighted_resid_dot(w2_.data(), resid_base_.col(t).data(),
                                       mean.col(t).data(), sens.col(t).data(), p);

  const double shift = kappa.maxCoeff();
  Vector sm(Jm1);
  double total = 0.0;
  for (int q = 0; q < Jm1; ++q) {
    sm[q] = std::exp(kappa[q] - shift);
    total += sm[q];
  }
  sm /= total;

  const double cm = c.dot(m_raw);
  Vector grad = warp_suffix_.transpose() * c;
  grad.array() -= cm;
  grad.array() *= -sm.array();
  grad += kappa / omega_;
  return grad;
}

/*======================= lambda column objective =======================*/

LambdaColObjective::LambdaColObjective(const ModelState& s, const SeriesPair& data,
                                       int col)
    : x_(&data.x), y_(&data.y) {
  require(col >= 0 && col < s.r(), "LambdaColObjective: column out of range");
  const int p = s.p();
  const int r = s.r();

  Matrix rest(p, r - 1);
  if (r > 1) {
    rest.leftCols(col) = s.lambda.leftCols(col);
    rest.rightCols(r - 1 - col) = s.lambda.rightCols(r - 1 - col);
  }
  g_ = projector(rest);

  c1_ = s.gamma1 * factor_curves(s.beta_ind1, s.basis_ind1, data.grid_x);
  c2_ = s.gamma2 * factor_curves(s.beta_ind2, s.basis_ind2, data.grid_y);
  gc1_ = g_ * c1_;
  gc2_ = g_ * c2_;

  const Matrix eta_x = factor_curves(s.beta_shared, s.basis_shared, data.grid_x);
  const Vector m = eval_warp(s.warp, data.grid_y);
  Matrix eta_w;
  factor_curves_at(s.beta_shared, s.basis_shared, m, &eta_w, nullptr);

  Matrix lambda0 = s.lambda;
  lambda0.col(col).setZero();
  base1_ = (lambda0 * s.xi1.asDiagonal()) * eta_x;
  base2_ = (lambda0 * s.xi2.asDiagonal()) * eta_w;
  eta1_ = eta_x.row(col);
  eta2_ = eta_w.row(col);

  w1_ = s.sigma1_sq.cwiseInverse();
  w2_ = s.sigma2_sq.cwiseInverse();
  prior_prec_ = s.shrink.phi_shared.col(col) * s.shrink.tau_shared[col];
  xi1j_ = s.xi1[col];
  xi2j_ = s.xi2[col];
}

double LambdaColObjective::value(const Vector& u) const {
  const int p = static_cast<int>(g_.rows());
  const Vector v = g_ * u;
  const double d = v.squaredNorm();

  Matrix mean1 = gc1_ + base1_ + (xi1j_ * u) * eta1_.transpose();
  Matrix mean2 = gc2_ + base2_ + (xi2j_ * u) * eta2_.transpose();
  if (d > 0.0) {
    mean1.noalias() -= v * ((v.transpose() * c1_) / d);
    mean2.noalias() -= v * ((v.transpose() * c2_) / d);
  }
  const double ssr1 = kernels::weighted_ssr_block(w1_.data(), p, x_->data(),
                                                  mean1.data(), mean1.cols());
  const double ssr2 = kernels::weighted_ssr_block(w2_.data(), p, y_->data(),
                                                  mean2.data(), mean2.cols());
  return 0.5 * (ssr1 + ssr2) + 0.5 * u.dot(prior_prec_.cwiseProduct(u));
}

Vector LambdaColObjective::gradient(const Vector& u) const {
  const Vector v = g_ * u;
  const double d = v.squaredNorm();

  Matrix mean1 = gc1_ + base1_ + (xi1j_ * u) * eta1_.transpose();
  Matrix mean2 = gc2_ + base2_ + (xi2j_ * u) * eta2_.transpose();
  if (d > 0.0) {
    mean1.noalias() -= v * ((v.transpose() * c1_) / d);
    mean2.noalias() -= v * ((v.transpose() * c2_) / d);
  }
  const Matrix wr1 = w1_.asDiagonal() * (*x_ - mean1);
  const Matrix wr2 = w2_.asDiagonal() * (*y_ - mean2);

  Vector grad = -xi1j_ * (wr1 * eta1_) - xi2j_ * (wr2 * eta2_);
  if (d > 0.0) {
    const Vector sv = c1_ * (wr1.transpose() * v) + c2_ * (wr2.transpose() * v);
    const Vector stv = wr1 * (c1_.transpose() * v) + wr2 * (c2_.transpose() * v);
    const double vsv = v.dot(sv);
    grad.noalias() += (g_ * (sv + stv)) / d;
    grad.noalias() -= (2.0 * vsv / (d * d)) * v;
  }
  grad += prior_prec_.cwiseProduct(u);
  return grad;
}

double neg_loglik_kappa(const ModelState& s, const SeriesPair& data, double omega) {
  return KappaObjective(s, data, omega).value(s.warp.kappa);
}

Vector grad_neg_loglik_kappa(const ModelState& s, const SeriesPair& data,
                             double omega) {
  return KappaObjective(s, data, omega).gradient(s.warp.kappa);
}

double neg_loglik_lambda_col(const ModelState& s, const SeriesPair& data, int col) {
  return LambdaColObjective(s, data, col).value(s.lambda.col(col));
}

Vector grad_neg_loglik_lambda_col(const ModelState& s, const SeriesPair& data,
                                  int col) {
  return LambdaColObjective(s, data, col).gradient(s.lambda.col(col));
}

}  // namespace tacifa
