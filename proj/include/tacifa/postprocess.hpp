#pragma once

#include <span>
#include <vector>

#include "tacifa/model.hpp"
#include "tacifa/rng.hpp"
#include "tacifa/sampler.hpp"

namespace tacifa {

/// Orthogonal Procrustes solution: the orthonormal R minimizing
/// ||A - B R||_F, namely R = Q2 Q1' where Q1 D Q2' is the SVD of A'B.
/// Throws on dimension mismatch.
Matrix procrustes_rotation(const Matrix& a, const Matrix& b);

/// Shared-block chain after rotation alignment. Sample k holds the two
/// loading products Lambda Xi_w and the factor-curve coefficients, jointly
/// rotated so that every sample's likelihood is unchanged but successive
/// samples are as close as possible in Frobenius norm.
struct AlignedShared {
  std::vector<Matrix> loading1;  // p x r, series-1 shared loading product
  std::vector<Matrix> loading2;  // p x r
  std::vector<Matrix> eta_coef;  // r x K, rotated factor-curve coefficients
  int rank = 0;                  // modal shared rank across the chain
  int dropped = 0;               // samples excluded for having another rank
};

/// Aligns the shared block of a chain. Only samples whose shared rank equals
/// the chain's modal rank take part (ties resolved toward the smaller rank);
/// the rest are counted in `dropped`. The first retained sample is rotated by
/// the right factor of the SVD of (X - individual mean)' (Lambda Xi_1), which
/// orders its columns by explained variation; each later sample is rotated
/// toward its aligned predecessor with procrustes_rotation. The same rotation
/// multiplies both loading products on the right and the curve coefficients
/// on the left (transposed), so the fitted means are untouched.
/// Throws if no usable sample remains.
AlignedShared align_chain(const Chain& chain, const SeriesPair& data);

/// Individual-block analogue for series `which` (1 or 2): aligns the samples
/// of Psi Gamma_w together with the series' own curve coefficients. The
/// initial ordering rotation uses the residual (data_w - shared mean_w).
struct AlignedIndividual {
  std::vector<Matrix> loading;    // p x r_w
  std::vector<Matrix> zeta_coef;  // r_w x K_w
  int rank = 0;
  int dropped = 0;
};
AlignedIndividual align_individual(const Chain& chain, const SeriesPair& data,
                                   int which);

/// Sign-stability score per loading entry: |0.5 - P(A[i,j] > 0)| / 0.5, the
/// positive-sign probability estimated as the empirical fraction over the
/// (aligned) samples. Requires at least two samples of one shape.
Matrix sp_importance(std::span<const Matrix> samples);

/// Per-sample similarity of the two series' shared spaces on an evaluation
/// grid, plus its posterior mean, equal-tailed 95% interval, and the value
/// recomputed from the posterior-mean variance fractions.
struct SynResult {
  std::vector<double> per_sample;
  double mean = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  double of_mean_fractions = 0.0;
};

/// For each sample, each feature l and grid time t, the shared-space variance
/// fraction of series w is shared^2 / (individual^2 + shared^2 + sigma_wl^2),
/// where shared and individual are that feature's mean contributions; series
/// 2 evaluates its factor curves at the warped time M(t) while its individual
/// curves stay on t. The per-sample score is
///   1 - (1/(p T)) sum_l | sum_t (fraction_1,lt - fraction_2,lt) |,
/// which lies in [0, 1]. Rotating any sample's shared block does not change
/// it, so the raw chain may be passed directly.
SynResult syn_similarity(const Chain& chain, std::span<const double> grid);

/// A held-out time column: series is 1 or 2, col indexes that series' grid.
struct HeldoutIndex {
  int series = 1;
  int col = 0;
};

/// Draws `fraction` of each series' time columns (rounded to nearest, at
/// least 0, at most T_w - 2) uniformly without replacement; deterministic in
/// the seed. Results are sorted by series then column.
std::vector<HeldoutIndex> choose_heldout(int t1, int t2, double fraction,
                                         std::uint64_t seed);

/// Copy of `data` with the held-out columns removed (the training set).
SeriesPair drop_columns(const SeriesPair& data, std::span<const HeldoutIndex> heldout);

/// Posterior predictive summaries at held-out columns of the full data. Per
/// chain sample one predictive draw (model mean plus observation noise) is
/// made for every held-out entry; entries report the pointwise draw mean and
/// equal-tailed 95% band. `mse_w` is the mean squared error of the predictive
/// mean against the stored truth over series w's held-out entries, and
/// `coverage_w` the fraction of those entries whose truth falls inside the
/// band. Throws on an out-of-range held-out index or an empty chain.
struct PredictiveSummary {
  std::vector<HeldoutIndex> index;  // m entries, sorted
  Matrix mean, lo, hi;              // p x m
  Matrix truth;                     // p x m
  double mse1 = 0.0, mse2 = 0.0;
  double coverage1 = 0.0, coverage2 = 0.0;
};
PredictiveSummary predict(const Chain& chain, const SeriesPair& data,
                          std::span<const HeldoutIndex> heldout, Rng& rng);

/// Pointwise posterior mean and equal-tailed 95% band of the time
/// transformation over an evaluation grid.
struct WarpSummary {
  Vector mean, lo, hi;
};
WarpSummary warp_summary(const Chain& chain, std::span<const double> grid);

/// Equal-tailed sample quantile with linear interpolation between order
/// statistics (the common "type 7" rule). alpha in [0, 1]; xs nonempty.
double quantile(std::vector<double> xs, double alpha);

/// Everything the reporting layer writes, computed from one chain.
struct PosteriorSummary {
  Matrix sp_shared1, sp_shared2;  // p x modal shared rank
  Matrix sp_ind1, sp_ind2;        // p x modal individual ranks
  int rank_shared = 0, rank_ind1 = 0, rank_ind2 = 0;
  int dropped_shared = 0, dropped_ind1 = 0, dropped_ind2 = 0;
  Vector warp_grid, warp_mean, warp_lo, warp_hi;
  SynResult syn;
  PredictiveSummary pred;  // empty index if nothing was held out
};

/// Runs the full post-processing pass: shared and individual alignment, SP
/// scores, similarity, warp band on `eval_grid`, and (when `heldout` is
/// nonempty) predictive summaries against the full data.
PosteriorSummary summarize_chain(const Chain& chain, const SeriesPair& full_data,
                                 std::span<const HeldoutIndex> heldout,
                                 std::span<const double> eval_grid, Rng& rng);

}  // namespace tacifa
