#include "tacifa/postprocess.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace tacifa {

namespace {

// Flip paired singular-vector signs so that each column of the right factor
// has a positive largest-magnitude entry (first such entry on ties). The SVD
// is only unique up to these joint sign flips; fixing them keeps the initial
// ordering rotation reproducible across platforms.
void canonicalize_signs(Matrix& u2) {
  for (int k = 0; k < u2.cols(); ++k) {
    int imax = 0;
    for (int i = 1; i < u2.rows(); ++i) {
      if (std::abs(u2(i, k)) > std::abs(u2(imax, k))) imax = i;
    }
    if (u2(imax, k) < 0.0) u2.col(k) = -u2.col(k);
  }
}

// Most frequent value; ties go to the smaller one so the result is
// deterministic whatever order the samples arrive in.
int modal_value(const std::vector<int>& xs) {
  std::map<int, int> counts;
  for (int x : xs) ++counts[x];
  int best = xs.front(), best_count = 0;
  for (const auto& [value, count] : counts) {
    if (count > best_count) {
      best = value;
      best_count = count;
    }
  }
  return best;
}

// Right factor of the SVD of resid' * loading, columns ordered by decreasing
// singular value and sign-canonicalized: the rotation that orders the
// loading's columns by how much observed variation they explain.
Matrix ordering_rotation(const Matrix& resid, const Matrix& loading) {
  Eigen::JacobiSVD<Matrix> svd(resid.transpose() * loading,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  Matrix u2 = svd.matrixV();
  canonicalize_signs(u2);
  return u2;
}

std::vector<double> to_vector(std::span<const double> grid) {
  return std::vector<double>(grid.begin(), grid.end());
}

}  // namespace

Matrix procrustes_rotation(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw std::invalid_argument(
        "procrustes_rotation: shapes " + std::to_string(a.rows()) + "x" +
        std::to_string(a.cols()) + " and " + std::to_string(b.rows()) + "x" +
        std::to_string(b.cols()) + " do not match");
  }
  Eigen::JacobiSVD<Matrix> svd(a.transpose() * b,
                               Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixV() * svd.matrixU().transpose();
}

AlignedShared align_chain(const Chain& chain, const SeriesPair& data) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("align_chain: chain has no samples");
  }
  std::vector<int> ranks;
  ranks.reserve(chain.samples.size());
  for (const ModelState& s : chain.samples) ranks.push_back(s.r());
  AlignedShared out;
  out.rank = modal_value(ranks);

  for (const ModelState& s : chain.samples) {
    if (s.r() != out.rank) {
      ++out.dropped;
      continue;
    }
    Matrix l1 = s.lambda * s.xi1.asDiagonal();
    Matrix l2 = s.lambda * s.xi2.asDiagonal();
    Matrix rot;
    if (out.loading1.empty()) {
      Matrix resid = data.x - individual_mean(s, data.grid_x, 1);
      rot = ordering_rotation(resid, l1);
    } else {
      rot = procrustes_rotation(out.loading1.back(), l1);
    }
    out.loading1.push_back(l1 * rot);
    out.loading2.push_back(l2 * rot);
    out.eta_coef.push_back(rot.transpose() * s.beta_shared);
  }
  return out;
}

AlignedIndividual align_individual(const Chain& chain, const SeriesPair& data,
                                   int which) {
  if (which != 1 && which != 2) {
    throw std::invalid_argument("align_individual: series must be 1 or 2, got " +
                                std::to_string(which));
  }
  if (chain.samples.empty()) {
    throw std::invalid_argument("align_individual: chain has no samples");
  }
  std::vector<int> ranks;
  ranks.reserve(chain.samples.size());
  for (const ModelState& s : chain.samples) {
    ranks.push_back(which == 1 ? s.r1() : s.r2());
  }
  AlignedIndividual out;
  out.rank = modal_value(ranks);

  const Matrix& obs = which == 1 ? data.x : data.y;
  const std::vector<double>& grid = which == 1 ? data.grid_x : data.grid_y;
  for (const ModelState& s : chain.samples) {
    if ((which == 1 ? s.r1() : s.r2()) != out.rank) {
      ++out.dropped;
      continue;
    }
    Matrix loading = projector(s.lambda) * (which == 1 ? s.gamma1 : s.gamma2);
    const Matrix& coef = which == 1 ? s.beta_ind1 : s.beta_ind2;
    Matrix rot;
    if (out.loading.empty()) {
      Matrix resid = obs - shared_mean(s, grid, which, /*warped=*/which == 2);
      rot = ordering_rotation(resid, loading);
    } else {
      rot = procrustes_rotation(out.loading.back(), loading);
    }
    out.loading.push_back(loading * rot);
    out.zeta_coef.push_back(rot.transpose() * coef);
  }
  return out;
}

Matrix sp_importance(std::span<const Matrix> samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument(
        "sp_importance: needs at least 2 samples, got " +
        std::to_string(samples.size()));
  }
  const Eigen::Index rows = samples[0].rows(), cols = samples[0].cols();
  Matrix positive = Matrix::Zero(rows, cols);
  for (const Matrix& a : samples) {
    if (a.rows() != rows || a.cols() != cols) {
      throw std::invalid_argument("sp_importance: samples differ in shape");
    }
    positive += (a.array() > 0.0).cast<double>().matrix();
  }
  const double m = static_cast<double>(samples.size());
  return ((positive.array() / m - 0.5).abs() / 0.5).matrix();
}

SynResult syn_similarity(const Chain& chain, std::span<const double> grid) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("syn_similarity: chain has no samples");
  }
  if (grid.empty()) {
    throw std::invalid_argument("syn_similarity: empty evaluation grid");
  }
  const std::vector<double> pts = to_vector(grid);
  const int p = chain.samples.front().p();
  const int t = static_cast<int>(pts.size());

  SynResult out;
  out.per_sample.reserve(chain.samples.size());
  Matrix rho1_total = Matrix::Zero(p, t), rho2_total = Matrix::Zero(p, t);
  auto syn_of = [&](const Matrix& rho1, const Matrix& rho2) {
    const double total = (rho1 - rho2).rowwise().sum().cwiseAbs().sum();
    return 1.0 - total / (static_cast<double>(p) * t);
  };

  for (const ModelState& s : chain.samples) {
    Eigen::ArrayXXd sh1 = shared_mean(s, pts, 1, false).array().square();
    Eigen::ArrayXXd sh2 = shared_mean(s, pts, 2, true).array().square();
    Eigen::ArrayXXd in1 = individual_mean(s, pts, 1).array().square();
    Eigen::ArrayXXd in2 = individual_mean(s, pts, 2).array().square();
    Matrix rho1 =
        (sh1 / (in1 + sh1 + s.sigma1_sq.array().replicate(1, t))).matrix();
    Matrix rho2 =
        (sh2 / (in2 + sh2 + s.sigma2_sq.array().replicate(1, t))).matrix();
    rho1_total += rho1;
    rho2_total += rho2;
    out.per_sample.push_back(syn_of(rho1, rho2));
  }

  const double m = static_cast<double>(out.per_sample.size());
  double sum = 0.0;
  for (double v : out.per_sample) sum += v;
  out.mean = sum / m;
  out.lo = quantile(out.per_sample, 0.025);
  out.hi = quantile(out.per_sample, 0.975);
  out.of_mean_fractions = syn_of(rho1_total / m, rho2_total / m);
  return out;
}

std::vector<HeldoutIndex> choose_heldout(int t1, int t2, double fraction,
                                         std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw std::invalid_argument("choose_heldout: fraction must be in [0, 1), got " +
                                std::to_string(fraction));
  }
  Rng rng(seed);
  std::vector<HeldoutIndex> out;
  for (int series = 1; series <= 2; ++series) {
    const int t = series == 1 ? t1 : t2;
    const int want = static_cast<int>(std::lround(fraction * t));
    const int m = std::clamp(want, 0, std::max(0, t - 2));
    std::vector<int> idx(t);
    for (int i = 0; i < t; ++i) idx[i] = i;
    for (int i = 0; i < m; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(t - i)));
      std::swap(idx[i], idx[j]);
    }
    std::sort(idx.begin(), idx.begin() + m);
    for (int i = 0; i < m; ++i) out.push_back({series, idx[i]});
  }
  return out;
}

SeriesPair drop_columns(const SeriesPair& data,
                        std::span<const HeldoutIndex> heldout) {
  std::vector<bool> drop1(data.t1(), false), drop2(data.t2(), false);
  for (const HeldoutIndex& h : heldout) {
    std::vector<bool>& drop = h.series == 1 ? drop1 : drop2;
    if (h.series != 1 && h.series != 2) {
      throw std::invalid_argument("drop_columns: series must be 1 or 2, got " +
                                  std::to_string(h.series));
    }
    if (h.col < 0 || h.col >= static_cast<int>(drop.size())) {
      throw std::out_of_range("drop_columns: column " + std::to_string(h.col) +
                              " out of range for series " + std::to_string(h.series));
    }
    drop[h.col] = true;
  }
  SeriesPair out;
  out.feature_names = data.feature_names;
  auto keep = [](const Matrix& m, const std::vector<double>& grid,
                 const std::vector<bool>& drop, Matrix& mo,
                 std::vector<double>& go) {
    const int kept = static_cast<int>(std::count(drop.begin(), drop.end(), false));
    mo.resize(m.rows(), kept);
    go.clear();
    go.reserve(kept);
    int j = 0;
    for (int c = 0; c < m.cols(); ++c) {
      if (drop[c]) continue;
      mo.col(j++) = m.col(c);
      go.push_back(grid[c]);
    }
  };
  keep(data.x, data.grid_x, drop1, out.x, out.grid_x);
  keep(data.y, data.grid_y, drop2, out.y, out.grid_y);
  out.validate();
  return out;
}

PredictiveSummary predict(const Chain& chain, const SeriesPair& data,
                          std::span<const HeldoutIndex> heldout, Rng& rng) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("predict: chain has no samples");
  }
  PredictiveSummary out;
  out.index.assign(heldout.begin(), heldout.end());
  std::sort(out.index.begin(), out.index.end(),
            [](const HeldoutIndex& a, const HeldoutIndex& b) {
              return a.series != b.series ? a.series < b.series : a.col < b.col;
            });
  const int p = data.p();
  const int m = static_cast<int>(out.index.size());
  std::vector<double> times1, times2;
  for (const HeldoutIndex& h : out.index) {
    if (h.series == 1) {
      if (h.col < 0 || h.col >= data.t1()) {
        throw std::out_of_range("predict: column " + std::to_string(h.col) +
                                " out of range for series 1");
      }
      times1.push_back(data.grid_x[h.col]);
    } else if (h.series == 2) {
      if (h.col < 0 || h.col >= data.t2()) {
        throw std::out_of_range("predict: column " + std::to_string(h.col) +
                                " out of range for series 2");
      }
      times2.push_back(data.grid_y[h.col]);
    } else {
      throw std::invalid_argument("predict: series must be 1 or 2, got " +
                                  std::to_string(h.series));
    }
  }
  const int m1 = static_cast<int>(times1.size());

  out.truth.resize(p, m);
  for (int j = 0; j < m; ++j) {
    const HeldoutIndex& h = out.index[j];
    out.truth.col(j) = h.series == 1 ? data.x.col(h.col) : data.y.col(h.col);
  }
  out.mean = Matrix::Zero(p, m);
  out.lo = Matrix::Zero(p, m);
  out.hi = Matrix::Zero(p, m);
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  out.mse1 = out.mse2 = out.coverage1 = out.coverage2 = kNaN;
  if (m == 0) return out;

  const int n_samples = static_cast<int>(chain.samples.size());
  Matrix draws(static_cast<Eigen::Index>(p) * m, n_samples);
  for (int si = 0; si < n_samples; ++si) {
    const ModelState& s = chain.samples[si];
    Matrix mean(p, m);
    if (m1 > 0) {
      mean.leftCols(m1) = shared_mean(s, times1, 1, false) +
                          individual_mean(s, times1, 1);
    }
    if (m - m1 > 0) {
      mean.rightCols(m - m1) = shared_mean(s, times2, 2, true) +
                               individual_mean(s, times2, 2);
    }
    Vector sd1 = s.sigma1_sq.cwiseSqrt(), sd2 = s.sigma2_sq.cwiseSqrt();
    for (int j = 0; j < m; ++j) {
      const Vector& sd = out.index[j].series == 1 ? sd1 : sd2;
      for (int i = 0; i < p; ++i) {
        draws(static_cast<Eigen::Index>(j) * p + i, si) =
            mean(i, j) + sd[i] * rng.normal();
      }
    }
  }

  std::vector<double> entry(n_samples);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < p; ++i) {
      const Eigen::Index row = static_cast<Eigen::Index>(j) * p + i;
      for (int si = 0; si < n_samples; ++si) entry[si] = draws(row, si);
      out.mean(i, j) = draws.row(row).mean();
      out.lo(i, j) = quantile(entry, 0.025);
      out.hi(i, j) = quantile(entry, 0.975);
    }
  }

  for (int series = 1; series <= 2; ++series) {
    double sq = 0.0;
    int covered = 0, n = 0;
    for (int j = 0; j < m; ++j) {
      if (out.index[j].series != series) continue;
      for (int i = 0; i < p; ++i) {
        const double err = out.mean(i, j) - out.truth(i, j);
        sq += err * err;
        covered += out.truth(i, j) >= out.lo(i, j) &&
                   out.truth(i, j) <= out.hi(i, j);
        ++n;
      }
    }
    double& mse = series == 1 ? out.mse1 : out.mse2;
    double& coverage = series == 1 ? out.coverage1 : out.coverage2;
    if (n > 0) {
      mse = sq / n;
      coverage = static_cast<double>(covered) / n;
    }
  }
  return out;
}

WarpSummary warp_summary(const Chain& chain, std::span<const double> grid) {
  if (chain.samples.empty()) {
    throw std::invalid_argument("warp_summary: chain has no samples");
  }
  const int t = static_cast<int>(grid.size());
  const int n_samples = static_cast<int>(chain.samples.size());
  Matrix values(n_samples, t);
  for (int si = 0; si < n_samples; ++si) {
    values.row(si) = eval_warp(chain.samples[si].warp, grid).transpose();
  }
  WarpSummary out;
  out.mean.resize(t);
  out.lo.resize(t);
  out.hi.resize(t);
  std::vector<double> col(n_samples);
  for (int j = 0; j < t; ++j) {
    for (int si = 0; si < n_samples; ++si) col[si] = values(si, j);
    out.mean[j] = values.col(j).mean();
    out.lo[j] = quantile(col, 0.025);
    out.hi[j] = quantile(col, 0.975);
  }
  return out;
}

double quantile(std::vector<double> xs, double alpha) {
  if (xs.empty()) throw std::invalid_argument("quantile: empty sample");
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("quantile: alpha must be in [0, 1], got " +
                                std::to_string(alpha));
  }
  std::sort(xs.begin(), xs.end());
  const double h = alpha * (static_cast<double>(xs.size()) - 1.0);
  const auto j = static_cast<std::size_t>(h);
  if (j + 1 >= xs.size()) return xs.back();
  const double frac = h - static_cast<double>(j);
  return xs[j] + frac * (xs[j + 1] - xs[j]);
}

PosteriorSummary summarize_chain(const Chain& chain, const SeriesPair& full_data,
                                 std::span<const HeldoutIndex> heldout,
                                 std::span<const double> eval_grid, Rng& rng) {
  PosteriorSummary out;

  AlignedShared shared = align_chain(chain, full_data);
  out.rank_shared = shared.rank;
  out.dropped_shared = shared.dropped;
  out.sp_shared1 = sp_importance(shared.loading1);
  out.sp_shared2 = sp_importance(shared.loading2);

  for (int which = 1; which <= 2; ++which) {
    AlignedIndividual ind = align_individual(chain, full_data, which);
    (which == 1 ? out.rank_ind1 : out.rank_ind2) = ind.rank;
    (which == 1 ? out.dropped_ind1 : out.dropped_ind2) = ind.dropped;
    (which == 1 ? out.sp_ind1 : out.sp_ind2) = sp_importance(ind.loading);
  }

  out.warp_grid = Eigen::Map<const Vector>(eval_grid.data(),
                                           static_cast<Eigen::Index>(eval_grid.size()));
  WarpSummary warp = warp_summary(chain, eval_grid);
  out.warp_mean = warp.mean;
  out.warp_lo = warp.lo;
  out.warp_hi = warp.hi;

  out.syn = syn_similarity(chain, eval_grid);
  out.pred = predict(chain, full_data, heldout, rng);
  return out;
}

}  // namespace tacifa
