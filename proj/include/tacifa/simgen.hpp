#pragma once

#include <cstdint>
#include <vector>

#include "tacifa/model.hpp"
#include "tacifa/rng.hpp"

namespace tacifa {

enum class SimCase { sinusoid, ellipse };
enum class Zeta1Family { sin, linear, square, cube };

/// Synthetic-data design: a factor-model panel driven by sinusoidal factor
/// curves under a square-root time transformation (`sinusoid`), or a pair of
/// ellipse boundaries whose axes evolve in time (`ellipse`).
struct SimSpec {
  SimCase kind = SimCase::sinusoid;
  int t = 500;            // time points; the grid is 1/T, 2/T, ..., 1
  int p = 20;             // features (the ellipse design requires 24)
  int r_true = 10;        // generating rank of the sinusoid design
  double noise_sd = 1.0;  // observation noise (use 0 for the ellipse design)
  Zeta1Family zeta1_family = Zeta1Family::sin;
  std::uint64_t seed = 1;

  void validate() const;  // t >= 10, p >= 1, r_true >= 1, noise_sd >= 0
};

/// Everything the generator knows that an estimator is asked to recover.
/// Loading and factor matrices are filled by the sinusoid design only.
struct SimTruth {
  Matrix lambda, gamma1, gamma2;  // p x r_true
  Matrix zeta1, zeta2, eta;       // r_true x T, curves on the grid
  std::vector<double> warp;       // true time transformation over the grid
  Matrix mean_x, mean_y;          // noiseless means, p x T
};

struct SimOutput {
  SeriesPair data;
  SimTruth truth;
};

/// First-individual factor curve value: sin(kt), kt, (kt)^2 or (kt)^3.
double zeta1_value(Zeta1Family family, int k, double t);

/// Ellipse axis lengths at shape time s: 2(s+1) and 2/(s+1); their product
/// is the constant 4.
double ellipse_axis_a(double s);
double ellipse_axis_b(double s);

/// The 24 ellipse features at shape time s: twelve boundary points at
/// equidistant angles 2*pi*i/12, stacked as pairs (a sin(theta_i),
/// b cos(theta_i)) for i = 0..11.
Vector ellipse_features(double s);

/// Sinusoid design. Draw order from `rng` (all column-major): the three
/// loading matrices Lambda, Gamma_1, Gamma_2 as iid standard normals, then
/// the X noise panel, then the Y noise panel — replaying the stream
/// reproduces the data bitwise. Series 1 mixes zeta1 curves per
/// spec.zeta1_family with eta_k(t) = cos(kt); series 2 mixes
/// zeta2_k(t) = cos(kt) with eta at the warped times sqrt(t). The
/// individual-factor pathway is projected off Lambda's column space, so the
/// two mean components are exactly orthogonal feature-wise.
SimOutput gen_case1(const SimSpec& spec, Rng& rng);

/// gen_case1 restricted to the perturbed first-series families (anything but
/// `sin`); used for the similarity-ladder comparisons.
SimOutput gen_case1_variant(const SimSpec& spec, Rng& rng);

/// Ellipse design: X stacks the boundary points at shape time t, Y the same
/// boundary at shape time sqrt(t), on the shared grid 1/T..1. Noiseless by
/// default; a positive noise_sd adds Gaussian noise from a stream seeded
/// with spec.seed (X panel then Y panel, column-major).
SimOutput gen_case2(const SimSpec& spec);

/// Seed-deterministic dispatch on spec.kind; the stream is Rng(spec.seed).
SimOutput generate(const SimSpec& spec);

}  // namespace tacifa
