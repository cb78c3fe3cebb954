#pragma once

#include <cstdint>
#include <vector>

#include "tacifa/model.hpp"
#include "tacifa/rng.hpp"

namespace tacifa {

struct McmcConfig {
  int n_iter = 6000;
  int n_burnin = 3000;
  int thin = 1;
  int leapfrog_steps = 30;
  double step_size_lambda = 0.01;
  double step_size_kappa = 0.02;
  int adapt_interval = 100;   // iterations between step adjustments / pruning
  double accept_low = 0.6;    // acceptance band for step adaptation
  double accept_high = 0.8;
  double prune_threshold = 1e-4;  // mean-absolute-contribution cutoff
  std::uint64_t seed = 1;

  void validate() const;
};

struct ChainDiagnostics {
  // one entry per iteration
  std::vector<double> accept_lambda;  // fraction of accepted column updates
  std::vector<double> accept_kappa;   // 0/1
  std::vector<double> step_lambda;
  std::vector<double> step_kappa;
  std::vector<int> rank_shared;
  std::vector<int> rank_ind1;
  std::vector<int> rank_ind2;
  std::vector<double> log_lik;
};

struct Chain {
  std::vector<ModelState> samples;  // post burn-in, thinned
  ChainDiagnostics diagnostics;
};

/// Grid-dependent basis matrices; these never change over a run.
struct GridCache {
  GridCache(const SeriesPair& data, const HyperParams& h);

  Matrix b_shared_x;  // T1 x K, shared basis over grid_x
  Matrix b_ind1;      // T1 x K1
  Matrix b_ind2;      // T2 x K2
  Matrix bxt_bx;      // K x K
  Matrix b1t_b1;      // K1 x K1
  Matrix b2t_b2;      // K2 x K2
};

/// Loadings from N(0,1), unit scales, zero curves, per-feature sample
/// variances as noise, identity-like warp, shrinkage at prior means.
/// The shared rank is capped at p (the projector needs full column rank).
ModelState init_state(const SeriesPair& data, const HyperParams& h, Rng& rng);

namespace detail {

/// A conditional Gaussian block in precision form: the draw is
/// N(precision^-1 rhs, precision^-1).
struct GaussianBlock {
  Matrix precision;
  Vector rhs;
};

GaussianBlock gamma_block(const ModelState& s, const SeriesPair& data,
                          const GridCache& cache, int which);
GaussianBlock xi_block(const ModelState& s, const SeriesPair& data,
                       const GridCache& cache, int which, double omega);
GaussianBlock beta_shared_block(const ModelState& s, const SeriesPair& data,
                                const GridCache& cache, double omega);
GaussianBlock beta_ind_block(const ModelState& s, const SeriesPair& data,
                             const GridCache& cache, int which, double omega);

/// Cholesky draw from the block; `what` names the block in error messages.
Vector mvn_from_precision(const GaussianBlock& block, Rng& rng, const char* what);

}  // namespace detail

// Conjugate updates. `which` selects the series (1 or 2); beta blocks are
// 0 = shared, 1 = individual series 1, 2 = individual series 2.
void gibbs_update_beta(ModelState& s, const SeriesPair& data, const GridCache& cache,
                       const HyperParams& h, int block, Rng& rng);
void gibbs_update_gamma(ModelState& s, const SeriesPair& data, const GridCache& cache,
                        int which, Rng& rng);
void gibbs_update_xi(ModelState& s, const SeriesPair& data, const GridCache& cache,
                     const HyperParams& h, int which, Rng& rng);
void gibbs_update_sigma(ModelState& s, const SeriesPair& data, const HyperParams& h,
                        Rng& rng);
void gibbs_update_shrinkage(ModelState& s, const HyperParams& h, Rng& rng);

// Hamiltonian updates; return whether the proposal was accepted.
bool hmc_update_kappa(ModelState& s, const SeriesPair& data, const HyperParams& h,
                      double step, int leapfrog_steps, Rng& rng);
bool hmc_update_lambda_col(ModelState& s, const SeriesPair& data, int col,
                           double step, int leapfrog_steps, Rng& rng);

/// Step-size rule: below the band shrink by 0.8, above it grow by 1.25.
double adapted_step(double step, double acceptance, const McmcConfig& cfg);

struct PruneCounts {
  int shared = 0, ind1 = 0, ind2 = 0;
};

/// Drop factor columns whose mean absolute contribution to their mean matrix
/// falls strictly below the threshold (shared columns assessed jointly over
/// both series); never drops below rank 1 per block.
PruneCounts prune_columns(ModelState& s, const SeriesPair& data,
                          const GridCache& cache, double threshold);

struct SweepStats {
  double accept_lambda = 0.0;
  double accept_kappa = 0.0;
};

/// One full sweep in fixed order: beta (shared, ind1, ind2) -> Gamma1,
/// Gamma2 -> Xi1, Xi2 -> HMC Lambda columns -> HMC kappa -> sigma ->
/// shrinkage.
SweepStats sweep_once(ModelState& s, const SeriesPair& data, const GridCache& cache,
                      const HyperParams& h, double step_lambda, double step_kappa,
                      int leapfrog_steps, Rng& rng);

/// Full MCMC run: adaptation and pruning at every adapt_interval during
/// burn-in only; post-burn-in states recorded with thinning. Deterministic
/// given cfg.seed.
Chain run_chain(const SeriesPair& data, const HyperParams& h, const McmcConfig& cfg);

/// An exact draw from the prior (loadings conditioned on their drawn
/// shrinkage precisions), sized from the hyperparameters' basis dimensions.
ModelState draw_state_from_prior(const HyperParams& h, int p, int r, int r1, int r2,
                                 Rng& rng);

/// Data simulated from the model at the given state (column-major fill).
SeriesPair simulate_from_state(const ModelState& s, std::span<const double> grid_x,
                               std::span<const double> grid_y, Rng& rng);

}  // namespace tacifa
