#include "tacifa/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "tacifa/kernels.hpp"

namespace tacifa {

void McmcConfig::validate() const {
  if (n_iter <= 0) throw std::invalid_argument("McmcConfig: n_iter must be positive");
  if (n_burnin < 0) throw std::invalid_argument("McmcConfig: n_burnin must be nonnegative");
  if (n_burnin >= n_iter)
    throw std::invalid_argument("McmcConfig: n_burnin must be smaller than n_iter");
  if (thin <= 0) throw std::invalid_argument("McmcConfig: thin must be positive");
  if (leapfrog_steps <= 0)
    throw std::invalid_argument("McmcConfig: leapfrog_steps must be positive");
  if (!(step_size_kappa > 0.0) || !(step_size_lambda > 0.0))
    throw std::invalid_argument("McmcConfig: step sizes must be positive");
  if (adapt_interval <= 0)
    throw std::invalid_argument("McmcConfig: adapt_interval must be positive");
  if (!(accept_low > 0.0 && accept_low < accept_high && accept_high < 1.0))
    throw std::invalid_argument(
        "McmcConfig: need 0 < accept_low < accept_high < 1");
  if (!(prune_threshold >= 0.0))
    throw std::invalid_argument("McmcConfig: prune_threshold must be nonnegative");
}

GridCache::GridCache(const SeriesPair& data, const HyperParams& h) {
  const BSplineBasis shared(h.degree, h.K);
  const BSplineBasis ind1(h.degree, h.K1);
  const BSplineBasis ind2(h.degree, h.K2);
  b_shared_x = shared.eval_matrix(data.grid_x);
  b_ind1 = ind1.eval_matrix(data.grid_x);
  b_ind2 = ind2.eval_matrix(data.grid_y);
  bxt_bx = b_shared_x.transpose() * b_shared_x;
  b1t_b1 = b_ind1.transpose() * b_ind1;
  b2t_b2 = b_ind2.transpose() * b_ind2;
}

namespace {

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Vector cumprod(const Vector& d) {
  Vector out(d.size());
  double run = 1.0;
  for (Eigen::Index i = 0; i < d.size(); ++i) {
    run *= d[i];
    out[i] = run;
  }
  return out;
}

const Matrix& observed(const SeriesPair& data, int which) {
  return which == 1 ? data.x : data.y;
}

std::span<const double> observed_grid(const SeriesPair& data, int which) {
  return which == 1 ? std::span<const double>(data.grid_x)
                    : std::span<const double>(data.grid_y);
}

Vector noise_weights(const ModelState& s, int which) {
  const Vector& v = which == 1 ? s.sigma1_sq : s.sigma2_sq;
  return v.cwiseInverse();
}

void require_which(int which, const char* where) {
  if (which != 1 && which != 2)
    throw std::invalid_argument(std::string(where) + ": series selector must be 1 or 2");
}

/// Shared factor curves over the series' own grid (warped for series 2).
Matrix eta_matrix(const ModelState& s, const SeriesPair& data,
                  const GridCache& cache, int which) {
  if (which == 1) return s.beta_shared * cache.b_shared_x.transpose();
  const Vector m = eval_warp(s.warp, data.grid_y);
  Matrix value;
  factor_curves_at(s.beta_shared, s.basis_shared, m, &value, nullptr);
  return value;
}

void fill_normal(Matrix& a, Rng& rng) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) a(i, j) = rng.normal();
}

void fill_normal(Vector& v, Rng& rng) {
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = rng.normal();
}

Vector row_sample_variances(const Matrix& a) {
  Vector out(a.rows());
  const double n = static_cast<double>(a.cols());
  for (Eigen::Index l = 0; l < a.rows(); ++l) {
    const double mean = a.row(l).mean();
    const double ssd = (a.row(l).array() - mean).square().sum();
    const double var = n > 1.0 ? ssd / (n - 1.0) : 1.0;
    // a constant feature would otherwise zero the variance and blow up the
    // likelihood weights
    out[l] = std::max(var, 1e-8);
  }
  return out;
}

Matrix select_cols(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(a.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out.col(k) = a.col(idx[k]);
  return out;
}

Matrix select_rows(const Matrix& a, const std::vector<int>& idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), a.cols());
  for (std::size_t k = 0; k < idx.size(); ++k) out.row(k) = a.row(idx[k]);
  return out;
}

Vector select_entries(const Vector& v, const std::vector<int>& idx) {
  Vector out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) out[k] = v[idx[k]];
  return out;
}

/// Indices with contribution not strictly below the threshold; if everything
/// falls below, the single largest contributor survives.
std::vector<int> surviving_columns(const Vector& contrib, double threshold) {
  std::vector<int> keep;
  for (Eigen::Index j = 0; j < contrib.size(); ++j)
    if (!(contrib[j] < threshold)) keep.push_back(static_cast<int>(j));
  if (keep.empty()) {
    Eigen::Index best = 0;
    contrib.maxCoeff(&best);
    keep.push_back(static_cast<int>(best));
  }
  return keep;
}

/// One HMC trajectory on a generic negative-log-density objective. The
/// momentum refresh and the acceptance uniform are always consumed so the
/// random stream advances identically whatever the trajectory does.
template <class Objective>
bool hmc_trajectory(const Objective& obj, Vector& position, double step,
                    int leapfrog_steps, Rng& rng) {
  const Eigen::Index n = position.size();
  Vector q = position;
  Vector mom(n);
  fill_normal(mom, rng);
  const double h0 = obj.value(q) + 0.5 * mom.squaredNorm();
  bool finite = std::isfinite(h0);
  if (finite && step != 0.0 && leapfrog_steps > 0) {
    Vector g = obj.gradient(q);
    finite = g.allFinite();
    if (finite) {
      kernels::axpy(-0.5 * step, g.data(), mom.data(), static_cast<std::size_t>(n));
      for (int l = 0; l < leapfrog_steps && finite; ++l) {
        kernels::axpy(step, mom.data(), q.data(), static_cast<std::size_t>(n));
        if (!q.allFinite()) {
          finite = false;
          break;
        }
        g = obj.gradient(q);
        if (!g.allFinite()) {
          finite = false;
          break;
        }
        const double kick = (l + 1 == leapfrog_steps) ? 0.5 : 1.0;
        kernels::axpy(-kick * step, g.data(), mom.data(),
                      static_cast<std::size_t>(n));
      }
    }
  }
  double h1 = std::numeric_limits<double>::infinity();
  if (finite) h1 = obj.value(q) + 0.5 * mom.squaredNorm();
  const double u = rng.uniform();
  if (std::isfinite(h1) && std::log(u) < h0 - h1) {
    position = std::move(q);
    return true;
  }
  return false;
}

/// Gamma draws for one loading block's local precisions and column scales.
void update_shrinkage_block(const Matrix& loading, Matrix& phi, Vector& delta,
                            Vector& tau, const HyperParams& h, Rng& rng) {
  const Eigen::Index p = loading.rows();
  const Eigen::Index r = loading.cols();
  for (Eigen::Index k = 0; k < r; ++k)
    for (Eigen::Index l = 0; l < p; ++l)
      phi(l, k) = rng.gamma(h.nu1 + 0.5,
                            h.nu1 + 0.5 * tau[k] * loading(l, k) * loading(l, k));
  for (Eigen::Index hi = 0; hi < r; ++hi) {
    const double shape =
        (hi == 0 ? h.a1 : h.a2) + 0.5 * static_cast<double>(p) * static_cast<double>(r - hi);
    double rate = 1.0;
    for (Eigen::Index k = hi; k < r; ++k) {
      double tau_without = 1.0;
      for (Eigen::Index i = 0; i <= k; ++i)
        if (i != hi) tau_without *= delta[i];
      double quad = 0.0;
      for (Eigen::Index l = 0; l < p; ++l)
        quad += phi(l, k) * loading(l, k) * loading(l, k);
      rate += 0.5 * tau_without * quad;
    }
    delta[hi] = rng.gamma(shape, rate);
    tau = cumprod(delta);
  }
}

}  // namespace

namespace detail {

GaussianBlock gamma_block(const ModelState& s, const SeriesPair& data,
                          const GridCache& cache, int which) {
  require_which(which, "gamma_block");
  const Matrix& obs = observed(data, which);
  const auto grid = observed_grid(data, which);
  const Matrix psi = projector(s.lambda);
  const Vector w = noise_weights(s, which);
  const Matrix& beta = which == 1 ? s.beta_ind1 : s.beta_ind2;
  const Matrix& basis = which == 1 ? cache.b_ind1 : cache.b_ind2;
  const Matrix zeta = beta * basis.transpose();  // r_w x T_w
  const Matrix resid = obs - shared_mean(s, grid, which, which == 2);
  const Matrix psi_w_psi = psi * w.asDiagonal() * psi;
  const Matrix& phi = which == 1 ? s.shrink.phi_ind1 : s.shrink.phi_ind2;
  const Vector& tau = which == 1 ? s.shrink.tau_ind1 : s.shrink.tau_ind2;

  GaussianBlock block;
  block.precision = kron(zeta * zeta.transpose(), psi_w_psi);
  const Eigen::Index p = obs.rows();
  for (Eigen::Index k = 0; k < phi.cols(); ++k)
    for (Eigen::Index l = 0; l < p; ++l)
      block.precision(k * p + l, k * p + l) += phi(l, k) * tau[k];
  const Matrix rhs_mat = psi * (w.asDiagonal() * resid) * zeta.transpose();
  block.rhs = Eigen::Map<const Vector>(rhs_mat.data(), rhs_mat.size());
  return block;
}

GaussianBlock xi_block(const ModelState& s, const SeriesPair& data,
                       const GridCache& cache, int which, double omega) {
  require_which(which, "xi_block");
  if (!(omega > 0.0)) throw std::invalid_argument("xi_block: omega must be positive");
  const Matrix& obs = observed(data, which);
  const auto grid = observed_grid(data, which);
  const Matrix eta = eta_matrix(s, data, cache, which);  // r x T_w
  const Vector w = noise_weights(s, which);
  const Matrix resid = obs - individual_mean(s, grid, which);
  const Matrix lam_w_lam = s.lambda.transpose() * w.asDiagonal() * s.lambda;

  GaussianBlock block;
  block.precision = lam_w_lam.cwiseProduct(eta * eta.transpose());
  block.precision.diagonal().array() += 1.0 / omega;
  block.rhs = (s.lambda.transpose() * (w.asDiagonal() * resid))
                  .cwiseProduct(eta)
                  .rowwise()
                  .sum();
  return block;
}

GaussianBlock beta_shared_block(const ModelState& s, const SeriesPair& data,
                                const GridCache& cache, double omega) {
  if (!(omega > 0.0))
    throw std::invalid_argument("beta_shared_block: omega must be positive");
  const Matrix a1 = s.lambda * s.xi1.asDiagonal();
  const Matrix a2 = s.lambda * s.xi2.asDiagonal();
  const Vector w1 = noise_weights(s, 1);
  const Vector w2 = noise_weights(s, 2);
  const Matrix r1 = data.x - individual_mean(s, data.grid_x, 1);
  const Matrix r2 = data.y - individual_mean(s, data.grid_y, 2);
  const Vector m = eval_warp(s.warp, data.grid_y);
  const Matrix bm = s.basis_shared.eval_matrix(
      std::span<const double>(m.data(), static_cast<std::size_t>(m.size())));

  GaussianBlock block;
  block.precision = kron(cache.bxt_bx, a1.transpose() * w1.asDiagonal() * a1) +
                    kron(bm.transpose() * bm, a2.transpose() * w2.asDiagonal() * a2);
  block.precision.diagonal().array() += 1.0 / omega;
  const Matrix rhs_mat = a1.transpose() * (w1.asDiagonal() * r1) * cache.b_shared_x +
                         a2.transpose() * (w2.asDiagonal() * r2) * bm;
  block.rhs = Eigen::Map<const Vector>(rhs_mat.data(), rhs_mat.size());
  return block;
}

GaussianBlock beta_ind_block(const ModelState& s, const SeriesPair& data,
                             const GridCache& cache, int which, double omega) {
  require_which(which, "beta_ind_block");
  if (!(omega > 0.0))
    throw std::invalid_argument("beta_ind_block: omega must be positive");
  const Matrix& obs = observed(data, which);
  const auto grid = observed_grid(data, which);
  const Matrix psi = projector(s.lambda);
  const Matrix g = psi * (which == 1 ? s.gamma1 : s.gamma2);
  const Vector w = noise_weights(s, which);
  const Matrix resid = obs - shared_mean(s, grid, which, which == 2);
  const Matrix& basis = which == 1 ? cache.b_ind1 : cache.b_ind2;
  const Matrix& btb = which == 1 ? cache.b1t_b1 : cache.b2t_b2;

  GaussianBlock block;
  block.precision = kron(btb, g.transpose() * w.asDiagonal() * g);
  block.precision.diagonal().array() += 1.0 / omega;
  const Matrix rhs_mat = g.transpose() * (w.asDiagonal() * resid) * basis;
  block.rhs = Eigen::Map<const Vector>(rhs_mat.data(), rhs_mat.size());
  return block;
}

Vector mvn_from_precision(const GaussianBlock& block, Rng& rng, const char* what) {
  const Eigen::Index n = block.precision.rows();
  Eigen::LLT<Matrix> llt(block.precision);
  if (llt.info() != Eigen::Success) {
    const double lo = block.precision.diagonal().minCoeff();
    const double hi = block.precision.diagonal().maxCoeff();
    throw std::runtime_error(
        std::string(what) + ": conditional precision of dimension " +
        std::to_string(n) + " is not positive definite (diagonal range [" +
        std::to_string(lo) + ", " + std::to_string(hi) + "])");
  }
  const Vector mean = llt.solve(block.rhs);
  Vector z(n);
  fill_normal(z, rng);
  // precision = L L^T, so U^{-1} z with U = L^T has the wanted covariance
  return mean + llt.matrixU().solve(z);
}

}  // namespace detail

ModelState init_state(const SeriesPair& data, const HyperParams& h, Rng& rng) {
  data.validate();
  h.validate();
  const int p = data.p();
  int r = h.r_init > 0 ? h.r_init : std::min(p, 15);
  r = std::min(r, p);  // the orthogonal projector needs full column rank
  const int r1 = h.r1_init > 0 ? h.r1_init : std::min(p, 8);
  const int r2 = h.r2_init > 0 ? h.r2_init : std::min(p, 8);

  Matrix lambda(p, r), gamma1(p, r1), gamma2(p, r2);
  fill_normal(lambda, rng);
  fill_normal(gamma1, rng);
  fill_normal(gamma2, rng);

  ShrinkageState shrink;
  shrink.phi_shared = Matrix::Ones(p, r);
  shrink.phi_ind1 = Matrix::Ones(p, r1);
  shrink.phi_ind2 = Matrix::Ones(p, r2);
  auto prior_mean_delta = [&](int n) {
    Vector d = Vector::Constant(n, h.a2);
    d[0] = h.a1;
    return d;
  };
  shrink.delta_shared = prior_mean_delta(r);
  shrink.delta_ind1 = prior_mean_delta(r1);
  shrink.delta_ind2 = prior_mean_delta(r2);
  shrink.tau_shared = cumprod(shrink.delta_shared);
  shrink.tau_ind1 = cumprod(shrink.delta_ind1);
  shrink.tau_ind2 = cumprod(shrink.delta_ind2);

  ModelState s{std::move(lambda),
               std::move(gamma1),
               std::move(gamma2),
               Vector::Ones(r),
               Vector::Ones(r),
               Matrix::Zero(r, h.K),
               Matrix::Zero(r1, h.K1),
               Matrix::Zero(r2, h.K2),
               row_sample_variances(data.x),
               row_sample_variances(data.y),
               WarpParams(BSplineBasis(h.warp_degree, h.J), Vector::Zero(h.J - 1)),
               std::move(shrink),
               BSplineBasis(h.degree, h.K),
               BSplineBasis(h.degree, h.K1),
               BSplineBasis(h.degree, h.K2)};
  s.validate();
  return s;
}

void gibbs_update_beta(ModelState& s, const SeriesPair& data, const GridCache& cache,
                       const HyperParams& h, int block, Rng& rng) {
  if (block == 0) {
    const auto b = detail::beta_shared_block(s, data, cache, h.omega);
    const Vector draw = detail::mvn_from_precision(b, rng, "beta_shared");
    s.beta_shared = Eigen::Map<const Matrix>(draw.data(), s.r(), s.beta_shared.cols());
  } else if (block == 1) {
    const auto b = detail::beta_ind_block(s, data, cache, 1, h.omega);
    const Vector draw = detail::mvn_from_precision(b, rng, "beta_ind1");
    s.beta_ind1 = Eigen::Map<const Matrix>(draw.data(), s.r1(), s.beta_ind1.cols());
  } else if (block == 2) {
    const auto b = detail::beta_ind_block(s, data, cache, 2, h.omega);
    const Vector draw = detail::mvn_from_precision(b, rng, "beta_ind2");
    s.beta_ind2 = Eigen::Map<const Matrix>(draw.data(), s.r2(), s.beta_ind2.cols());
  } else {
    throw std::invalid_argument("gibbs_update_beta: block must be 0, 1, or 2");
  }
}

void gibbs_update_gamma(ModelState& s, const SeriesPair& data, const GridCache& cache,
                        int which, Rng& rng) {
  const auto b = detail::gamma_block(s, data, cache, which);
  const Vector draw =
      detail::mvn_from_precision(b, rng, which == 1 ? "gamma1" : "gamma2");
  Matrix& gamma = which == 1 ? s.gamma1 : s.gamma2;
  gamma = Eigen::Map<const Matrix>(draw.data(), s.p(), gamma.cols());
}

void gibbs_update_xi(ModelState& s, const SeriesPair& data, const GridCache& cache,
                     const HyperParams& h, int which, Rng& rng) {
  const auto b = detail::xi_block(s, data, cache, which, h.omega);
  Vector& xi = which == 1 ? s.xi1 : s.xi2;
  xi = detail::mvn_from_precision(b, rng, which == 1 ? "xi1" : "xi2");
}

void gibbs_update_sigma(ModelState& s, const SeriesPair& data, const HyperParams& h,
                        Rng& rng) {
  for (int which : {1, 2}) {
    const Matrix& obs = observed(data, which);
    const auto grid = observed_grid(data, which);
    const Matrix resid =
        obs - shared_mean(s, grid, which, which == 2) - individual_mean(s, grid, which);
    Vector& sigma_sq = which == 1 ? s.sigma1_sq : s.sigma2_sq;
    const double t = static_cast<double>(obs.cols());
    for (Eigen::Index l = 0; l < obs.rows(); ++l) {
      const double ssr = resid.row(l).squaredNorm();
      sigma_sq[l] = 1.0 / rng.gamma(h.sigma_prior_shape + 0.5 * t,
                                    h.sigma_prior_rate + 0.5 * ssr);
    }
  }
}

void gibbs_update_shrinkage(ModelState& s, const HyperParams& h, Rng& rng) {
  update_shrinkage_block(s.lambda, s.shrink.phi_shared, s.shrink.delta_shared,
                         s.shrink.tau_shared, h, rng);
  update_shrinkage_block(s.gamma1, s.shrink.phi_ind1, s.shrink.delta_ind1,
                         s.shrink.tau_ind1, h, rng);
  update_shrinkage_block(s.gamma2, s.shrink.phi_ind2, s.shrink.delta_ind2,
                         s.shrink.tau_ind2, h, rng);
}

bool hmc_update_kappa(ModelState& s, const SeriesPair& data, const HyperParams& h,
                      double step, int leapfrog_steps, Rng& rng) {
  const KappaObjective obj(s, data, h.omega);
  Vector kappa = s.warp.kappa;
  const bool accepted = hmc_trajectory(obj, kappa, step, leapfrog_steps, rng);
  if (accepted) s.warp = WarpParams(s.warp.basis, std::move(kappa));
  return accepted;
}

bool hmc_update_lambda_col(ModelState& s, const SeriesPair& data, int col,
                           double step, int leapfrog_steps, Rng& rng) {
  const LambdaColObjective obj(s, data, col);
  Vector u = s.lambda.col(col);
  const bool accepted = hmc_trajectory(obj, u, step, leapfrog_steps, rng);
  if (accepted) s.lambda.col(col) = u;
  return accepted;
}

double adapted_step(double step, double acceptance, const McmcConfig& cfg) {
  if (acceptance < cfg.accept_low) return step * 0.8;
  if (acceptance > cfg.accept_high) return step * 1.25;
  return step;
}

PruneCounts prune_columns(ModelState& s, const SeriesPair& data,
                          const GridCache& cache, double threshold) {
  PruneCounts counts;
  const double p = static_cast<double>(s.p());

  if (s.r() > 1) {
    const Matrix eta_x = s.beta_shared * cache.b_shared_x.transpose();
    const Vector m = eval_warp(s.warp, data.grid_y);
    Matrix eta_m;
    factor_curves_at(s.beta_shared, s.basis_shared, m, &eta_m, nullptr);
    const double denom = p * static_cast<double>(data.t1() + data.t2());
    Vector contrib(s.r());
    for (int j = 0; j < s.r(); ++j) {
      const double loading_l1 = s.lambda.col(j).cwiseAbs().sum();
      contrib[j] = loading_l1 *
                   (std::abs(s.xi1[j]) * eta_x.row(j).cwiseAbs().sum() +
                    std::abs(s.xi2[j]) * eta_m.row(j).cwiseAbs().sum()) /
                   denom;
    }
    const auto keep = surviving_columns(contrib, threshold);
    if (static_cast<int>(keep.size()) < s.r()) {
      counts.shared = s.r() - static_cast<int>(keep.size());
      s.lambda = select_cols(s.lambda, keep);
      s.beta_shared = select_rows(s.beta_shared, keep);
      s.xi1 = select_entries(s.xi1, keep);
      s.xi2 = select_entries(s.xi2, keep);
      s.shrink.phi_shared = select_cols(s.shrink.phi_shared, keep);
      s.shrink.delta_shared = select_entries(s.shrink.delta_shared, keep);
      s.shrink.tau_shared = cumprod(s.shrink.delta_shared);
    }
  }

  const Matrix psi = projector(s.lambda);
  for (int which : {1, 2}) {
    Matrix& gamma = which == 1 ? s.gamma1 : s.gamma2;
    const int r_w = static_cast<int>(gamma.cols());
    if (r_w <= 1) continue;
    Matrix& beta = which == 1 ? s.beta_ind1 : s.beta_ind2;
    const Matrix& basis = which == 1 ? cache.b_ind1 : cache.b_ind2;
    const Matrix g = psi * gamma;
    const Matrix zeta = beta * basis.transpose();
    const double denom = p * static_cast<double>(basis.rows());
    Vector contrib(r_w);
    for (int j = 0; j < r_w; ++j)
      contrib[j] =
          g.col(j).cwiseAbs().sum() * zeta.row(j).cwiseAbs().sum() / denom;
    const auto keep = surviving_columns(contrib, threshold);
    if (static_cast<int>(keep.size()) == r_w) continue;
    (which == 1 ? counts.ind1 : counts.ind2) = r_w - static_cast<int>(keep.size());
    gamma = select_cols(gamma, keep);
    beta = select_rows(beta, keep);
    Matrix& phi = which == 1 ? s.shrink.phi_ind1 : s.shrink.phi_ind2;
    Vector& delta = which == 1 ? s.shrink.delta_ind1 : s.shrink.delta_ind2;
    Vector& tau = which == 1 ? s.shrink.tau_ind1 : s.shrink.tau_ind2;
    phi = select_cols(phi, keep);
    delta = select_entries(delta, keep);
    tau = cumprod(delta);
  }

  if (counts.shared + counts.ind1 + counts.ind2 > 0) s.validate();
  return counts;
}

SweepStats sweep_once(ModelState& s, const SeriesPair& data, const GridCache& cache,
                      const HyperParams& h, double step_lambda, double step_kappa,
                      int leapfrog_steps, Rng& rng) {
  SweepStats stats;
  gibbs_update_beta(s, data, cache, h, 0, rng);
  gibbs_update_beta(s, data, cache, h, 1, rng);
  gibbs_update_beta(s, data, cache, h, 2, rng);
  gibbs_update_gamma(s, data, cache, 1, rng);
  gibbs_update_gamma(s, data, cache, 2, rng);
  gibbs_update_xi(s, data, cache, h, 1, rng);
  gibbs_update_xi(s, data, cache, h, 2, rng);
  int accepted = 0;
  for (int j = 0; j < s.r(); ++j)
    accepted += hmc_update_lambda_col(s, data, j, step_lambda, leapfrog_steps, rng)
                    ? 1
                    : 0;
  stats.accept_lambda = static_cast<double>(accepted) / static_cast<double>(s.r());
  stats.accept_kappa =
      hmc_update_kappa(s, data, h, step_kappa, leapfrog_steps, rng) ? 1.0 : 0.0;
  gibbs_update_sigma(s, data, h, rng);
  gibbs_update_shrinkage(s, h, rng);
  return stats;
}

Chain run_chain(const SeriesPair& data, const HyperParams& h, const McmcConfig& cfg) {
  data.validate();
  h.validate();
  cfg.validate();

  Rng rng(cfg.seed);
  ModelState s = init_state(data, h, rng);
  const GridCache cache(data, h);

  Chain chain;
  double step_lambda = cfg.step_size_lambda;
  double step_kappa = cfg.step_size_kappa;
  double sum_lambda = 0.0, sum_kappa = 0.0;
  int window = 0;

  for (int iter = 1; iter <= cfg.n_iter; ++iter) {
    const bool in_burnin = iter <= cfg.n_burnin;
    try {
      const SweepStats stats = sweep_once(s, data, cache, h, step_lambda, step_kappa,
                                          cfg.leapfrog_steps, rng);
      chain.diagnostics.accept_lambda.push_back(stats.accept_lambda);
      chain.diagnostics.accept_kappa.push_back(stats.accept_kappa);
      chain.diagnostics.step_lambda.push_back(step_lambda);
      chain.diagnostics.step_kappa.push_back(step_kappa);
      sum_lambda += stats.accept_lambda;
      sum_kappa += stats.accept_kappa;
      ++window;

      if (in_burnin && iter % cfg.adapt_interval == 0) {
        step_lambda = adapted_step(step_lambda, sum_lambda / window, cfg);
        step_kappa = adapted_step(step_kappa, sum_kappa / window, cfg);
        sum_lambda = sum_kappa = 0.0;
        window = 0;
        prune_columns(s, data, cache, cfg.prune_threshold);
      }

      chain.diagnostics.rank_shared.push_back(s.r());
      chain.diagnostics.rank_ind1.push_back(s.r1());
      chain.diagnostics.rank_ind2.push_back(s.r2());
      chain.diagnostics.log_lik.push_back(log_likelihood(s, data));
    } catch (const std::exception& e) {
      throw std::runtime_error("iteration " + std::to_string(iter) + ": " + e.what());
    }

    if (!in_burnin && (iter - cfg.n_burnin - 1) % cfg.thin == 0)
      chain.samples.push_back(s);
  }
  return chain;
}

ModelState draw_state_from_prior(const HyperParams& h, int p, int r, int r1, int r2,
                                 Rng& rng) {
  h.validate();
  if (p <= 0 || r <= 0 || r1 <= 0 || r2 <= 0)
    throw std::invalid_argument("draw_state_from_prior: dimensions must be positive");
  if (r > p)
    throw std::invalid_argument(
        "draw_state_from_prior: shared rank cannot exceed the feature count");

  ShrinkageState shrink;
  auto draw_block_precisions = [&](int rows, int cols, Matrix& phi, Vector& delta,
                                   Vector& tau) {
    delta.resize(cols);
    for (int i = 0; i < cols; ++i)
      delta[i] = rng.gamma(i == 0 ? h.a1 : h.a2, 1.0);
    tau = cumprod(delta);
    phi.resize(rows, cols);
    for (int k = 0; k < cols; ++k)
      for (int l = 0; l < rows; ++l) phi(l, k) = rng.gamma(h.nu1, h.nu1);
  };
  draw_block_precisions(p, r, shrink.phi_shared, shrink.delta_shared,
                        shrink.tau_shared);
  draw_block_precisions(p, r1, shrink.phi_ind1, shrink.delta_ind1, shrink.tau_ind1);
  draw_block_precisions(p, r2, shrink.phi_ind2, shrink.delta_ind2, shrink.tau_ind2);

  auto draw_loading = [&](int rows, const Matrix& phi, const Vector& tau) {
    Matrix a(rows, phi.cols());
    for (Eigen::Index k = 0; k < a.cols(); ++k)
      for (Eigen::Index l = 0; l < rows; ++l)
        a(l, k) = rng.normal() / std::sqrt(phi(l, k) * tau[k]);
    return a;
  };
  Matrix lambda = draw_loading(p, shrink.phi_shared, shrink.tau_shared);
  Matrix gamma1 = draw_loading(p, shrink.phi_ind1, shrink.tau_ind1);
  Matrix gamma2 = draw_loading(p, shrink.phi_ind2, shrink.tau_ind2);

  const double sd = std::sqrt(h.omega);
  auto draw_vector = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal() * sd;
    return v;
  };
  auto draw_matrix = [&](int rows, int cols) {
    Matrix a(rows, cols);
    for (int k = 0; k < cols; ++k)
      for (int l = 0; l < rows; ++l) a(l, k) = rng.normal() * sd;
    return a;
  };
  Vector xi1 = draw_vector(r), xi2 = draw_vector(r);
  Matrix beta_shared = draw_matrix(r, h.K);
  Matrix beta_ind1 = draw_matrix(r1, h.K1);
  Matrix beta_ind2 = draw_matrix(r2, h.K2);

  auto draw_sigma = [&](int n) {
    Vector v(n);
    for (int i = 0; i < n; ++i)
      v[i] = 1.0 / rng.gamma(h.sigma_prior_shape, h.sigma_prior_rate);
    return v;
  };
  Vector sigma1 = draw_sigma(p), sigma2 = draw_sigma(p);
  Vector kappa = draw_vector(h.J - 1);

  ModelState s{std::move(lambda),
               std::move(gamma1),
               std::move(gamma2),
               std::move(xi1),
               std::move(xi2),
               std::move(beta_shared),
               std::move(beta_ind1),
               std::move(beta_ind2),
               std::move(sigma1),
               std::move(sigma2),
               WarpParams(BSplineBasis(h.warp_degree, h.J), std::move(kappa)),
               std::move(shrink),
               BSplineBasis(h.degree, h.K),
               BSplineBasis(h.degree, h.K1),
               BSplineBasis(h.degree, h.K2)};
  s.validate();
  return s;
}

SeriesPair simulate_from_state(const ModelState& s, std::span<const double> grid_x,
                               std::span<const double> grid_y, Rng& rng) {
  SeriesPair out;
  out.grid_x.assign(grid_x.begin(), grid_x.end());
  out.grid_y.assign(grid_y.begin(), grid_y.end());
  out.x = shared_mean(s, grid_x, 1, false) + individual_mean(s, grid_x, 1);
  out.y = shared_mean(s, grid_y, 2, true) + individual_mean(s, grid_y, 2);
  const Vector sd1 = s.sigma1_sq.cwiseSqrt();
  const Vector sd2 = s.sigma2_sq.cwiseSqrt();
  for (Eigen::Index t = 0; t < out.x.cols(); ++t)
    for (Eigen::Index l = 0; l < out.x.rows(); ++l)
      out.x(l, t) += sd1[l] * rng.normal();
  for (Eigen::Index t = 0; t < out.y.cols(); ++t)
    for (Eigen::Index l = 0; l < out.y.rows(); ++l)
      out.y(l, t) += sd2[l] * rng.normal();
  out.validate();
  return out;
}

}  // namespace tacifa
