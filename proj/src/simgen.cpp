#include "tacifa/simgen.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tacifa {

namespace {

constexpr int kEllipseAngles = 12;
constexpr int kEllipseFeatures = 2 * kEllipseAngles;

Matrix fill_normal(Rng& rng, int rows, int cols) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j) {
    for (int i = 0; i < rows; ++i) m(i, j) = rng.normal();
  }
  return m;
}

void add_noise(Matrix& m, double sd, Rng& rng) {
  if (sd == 0.0) return;
  for (int j = 0; j < m.cols(); ++j) {
    for (int i = 0; i < m.rows(); ++i) m(i, j) += sd * rng.normal();
  }
}

std::vector<double> tail_grid(int t) {
  std::vector<double> g(t);
  for (int i = 0; i < t; ++i) g[i] = static_cast<double>(i + 1) / t;
  return g;
}

}  // namespace

void SimSpec::validate() const {
  if (t < 10) {
    throw std::invalid_argument("SimSpec: need at least 10 time points, got " +
                                std::to_string(t));
  }
  if (p < 1 || r_true < 1) {
    throw std::invalid_argument("SimSpec: p and r_true must be positive");
  }
  if (!(noise_sd >= 0.0)) {
    throw std::invalid_argument("SimSpec: noise_sd must be nonnegative");
  }
}

double zeta1_value(Zeta1Family family, int k, double t) {
  const double kt = k * t;
  switch (family) {
    case Zeta1Family::sin:
      return std::sin(kt);
    case Zeta1Family::linear:
      return kt;
    case Zeta1Family::square:
      return kt * kt;
    case Zeta1Family::cube:
      return kt * kt * kt;
  }
  throw std::invalid_argument("zeta1_value: unknown family");
}

double ellipse_axis_a(double s) { return 2.0 * (s + 1.0); }
double ellipse_axis_b(double s) { return 2.0 / (s + 1.0); }

Vector ellipse_features(double s) {
  const double a = ellipse_axis_a(s), b = ellipse_axis_b(s);
  Vector f(kEllipseFeatures);
  for (int i = 0; i < kEllipseAngles; ++i) {
    const double theta = 2.0 * std::numbers::pi * i / kEllipseAngles;
    f[2 * i] = a * std::sin(theta);
    f[2 * i + 1] = b * std::cos(theta);
  }
  return f;
}

SimOutput gen_case1(const SimSpec& spec, Rng& rng) {
  spec.validate();
  if (spec.kind != SimCase::sinusoid) {
    throw std::invalid_argument("gen_case1: spec.kind must be sinusoid");
  }
  const int p = spec.p, r = spec.r_true, t = spec.t;

  SimOutput out;
  SimTruth& truth = out.truth;
  truth.lambda = fill_normal(rng, p, r);
  truth.gamma1 = fill_normal(rng, p, r);
  truth.gamma2 = fill_normal(rng, p, r);

  const std::vector<double> grid = tail_grid(t);
  truth.warp.resize(t);
  truth.zeta1.resize(r, t);
  truth.zeta2.resize(r, t);
  truth.eta.resize(r, t);
  Matrix eta_warped(r, t);
  for (int j = 0; j < t; ++j) {
    const double tj = grid[j];
    const double mj = std::sqrt(tj);
    truth.warp[j] = mj;
    for (int k = 1; k <= r; ++k) {
      truth.zeta1(k - 1, j) = zeta1_value(spec.zeta1_family, k, tj);
      truth.zeta2(k - 1, j) = std::cos(k * tj);
      truth.eta(k - 1, j) = std::cos(k * tj);
      eta_warped(k - 1, j) = std::cos(k * mj);
    }
  }

  const Matrix psi = projector(truth.lambda);
  truth.mean_x = psi * (truth.gamma1 * truth.zeta1) + truth.lambda * truth.eta;
  truth.mean_y = psi * (truth.gamma2 * truth.zeta2) + truth.lambda * eta_warped;

  out.data.x = truth.mean_x;
  out.data.y = truth.mean_y;
  add_noise(out.data.x, spec.noise_sd, rng);
  add_noise(out.data.y, spec.noise_sd, rng);
  out.data.grid_x = grid;
  out.data.grid_y = grid;
  out.data.validate();
  return out;
}

SimOutput gen_case1_variant(const SimSpec& spec, Rng& rng) {
  if (spec.zeta1_family == Zeta1Family::sin) {
    throw std::invalid_argument(
        "gen_case1_variant: pick a perturbed first-series family "
        "(linear, square or cube)");
  }
  return gen_case1(spec, rng);
}

SimOutput gen_case2(const SimSpec& spec) {
  spec.validate();
  if (spec.kind != SimCase::ellipse) {
    throw std::invalid_argument("gen_case2: spec.kind must be ellipse");
  }
  if (spec.p != kEllipseFeatures) {
    throw std::invalid_argument(
        "gen_case2: the ellipse design stacks 12 boundary points into " +
        std::to_string(kEllipseFeatures) + " features; p must be " +
        std::to_string(kEllipseFeatures) + ", got " + std::to_string(spec.p));
  }
  const int t = spec.t;
  SimOutput out;
  const std::vector<double> grid = tail_grid(t);
  out.truth.warp.resize(t);
  out.truth.mean_x.resize(kEllipseFeatures, t);
  out.truth.mean_y.resize(kEllipseFeatures, t);
  for (int j = 0; j < t; ++j) {
    const double mj = std::sqrt(grid[j]);
    out.truth.warp[j] = mj;
    out.truth.mean_x.col(j) = ellipse_features(grid[j]);
    out.truth.mean_y.col(j) = ellipse_features(mj);
  }
  out.data.x = out.truth.mean_x;
  out.data.y = out.truth.mean_y;
  if (spec.noise_sd > 0.0) {
    Rng rng(spec.seed);
    add_noise(out.data.x, spec.noise_sd, rng);
    add_noise(out.data.y, spec.noise_sd, rng);
  }
  out.data.grid_x = grid;
  out.data.grid_y = grid;
  out.data.validate();
  return out;
}

SimOutput generate(const SimSpec& spec) {
  if (spec.kind == SimCase::ellipse) return gen_case2(spec);
  Rng rng(spec.seed);
  return gen_case1(spec, rng);
}

}  // namespace tacifa
