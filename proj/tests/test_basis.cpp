#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "tacifa/basis.hpp"
#include "tacifa/rng.hpp"

namespace {

using tacifa::BSplineBasis;
using tacifa::Rng;

// Independent implementation straight from the recursive definition:
// order-0 indicators on half-open spans (closed at the right end of the
// domain), then the two-term recurrence with 0/0 terms dropped.
double naive_basis(const std::vector<double>& knots, int i, int k, double t) {
  if (k == 0) {
    const bool inside = knots[i] <= t && t < knots[i + 1];
    const bool at_end =
        t == knots.back() && knots[i] < knots[i + 1] && knots[i + 1] == knots.back();
    return (inside || at_end) ? 1.0 : 0.0;
  }
  double left = 0.0, right = 0.0;
  const double dl = knots[i + k] - knots[i];
  if (dl > 0.0) left = (t - knots[i]) / dl * naive_basis(knots, i, k - 1, t);
  const double dr = knots[i + k + 1] - knots[i + 1];
  if (dr > 0.0)
    right = (knots[i + k + 1] - t) / dr * naive_basis(knots, i + 1, k - 1, t);
  return left + right;
}

}  // namespace

TEST_SUITE("basis") {

TEST_CASE("construction validates its arguments") {
  CHECK_THROWS_AS(BSplineBasis(0, 5), std::invalid_argument);
  CHECK_THROWS_AS(BSplineBasis(-1, 5), std::invalid_argument);
  CHECK_THROWS_AS(BSplineBasis(25, 30), std::invalid_argument);
  CHECK_THROWS_AS(BSplineBasis(3, 3), std::invalid_argument);
  const BSplineBasis b(3, 10);
  CHECK(b.degree() == 3);
  CHECK(b.size() == 10);
  CHECK(b.knots().size() == 14);
}

TEST_CASE("knot vector is clamped with equidistant interior knots") {
  const BSplineBasis b(3, 10);
  const auto& k = b.knots();
  for (int i = 0; i <= 3; ++i) {
    CHECK(k[i] == 0.0);
    CHECK(k[k.size() - 1 - i] == 1.0);
  }
  for (int i = 1; i <= 6; ++i) CHECK(k[3 + i] == doctest::Approx(i / 7.0));
}

TEST_CASE("matches the recursive definition") {
  Rng rng(17);
  for (int degree = 1; degree <= 4; ++degree) {
    for (int nb : {degree + 1, degree + 2, 8, 12}) {
      const BSplineBasis b(degree, nb);
      std::vector<double> pts = {0.0, 1.0, 0.5};
      for (int i = 0; i < 25; ++i) pts.push_back(rng.uniform());
      for (double t : pts) {
        const Eigen::VectorXd v = b.eval(t);
        REQUIRE(v.size() == nb);
        for (int j = 0; j < nb; ++j)
          CHECK(v[j] == doctest::Approx(naive_basis(b.knots(), j, degree, t))
                            .epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("partition of unity and nonnegativity") {
  Rng rng(23);
  for (int degree : {1, 2, 3, 5}) {
    for (int nb : {degree + 1, 9, 14}) {
      const BSplineBasis b(degree, nb);
      for (int i = 0; i <= 40; ++i) {
        const double t = i / 40.0;
        const Eigen::VectorXd v = b.eval(t);
        CHECK(v.sum() == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(v.minCoeff() >= 0.0);
        const Eigen::VectorXd d = b.eval_derivative(t);
        CHECK(std::abs(d.sum()) < 1e-9);
      }
    }
  }
}

TEST_CASE("interior cubic values and derivatives take the uniform form") {
  // nb = 10 cubic: spans of width 1/7; t = 0.5 sits mid-span with local
  // coordinate 1/2, where the four active functions take the classical
  // uniform values (1, 23, 23, 1)/48 and derivatives (-7, -35, 35, 7)/8.
  const BSplineBasis b(3, 10);
  int first;
  double val[4], der[4];
  b.eval_local(0.5, first, val, der);
  CHECK(first == 3);
  CHECK(val[0] == doctest::Approx(1.0 / 48).epsilon(1e-13));
  CHECK(val[1] == doctest::Approx(23.0 / 48).epsilon(1e-13));
  CHECK(val[2] == doctest::Approx(23.0 / 48).epsilon(1e-13));
  CHECK(val[3] == doctest::Approx(1.0 / 48).epsilon(1e-13));
  CHECK(der[0] == doctest::Approx(-7.0 / 8).epsilon(1e-13));
  CHECK(der[1] == doctest::Approx(-35.0 / 8).epsilon(1e-13));
  CHECK(der[2] == doctest::Approx(35.0 / 8).epsilon(1e-13));
  CHECK(der[3] == doctest::Approx(7.0 / 8).epsilon(1e-13));
}

TEST_CASE("endpoint interpolation") {
  for (int degree : {1, 2, 3, 4}) {
    const BSplineBasis b(degree, 8);
    const Eigen::VectorXd v0 = b.eval(0.0);
    CHECK(v0[0] == 1.0);
    CHECK(v0.tail(7).cwiseAbs().maxCoeff() == 0.0);
    const Eigen::VectorXd v1 = b.eval(1.0);
    CHECK(v1[7] == 1.0);
    CHECK(v1.head(7).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("locality: only the degree+1 window is nonzero") {
  Rng rng(31);
  const BSplineBasis b(3, 12);
  for (int i = 0; i < 30; ++i) {
    const double t = rng.uniform();
    int first;
    double val[4];
    b.eval_local(t, first, val, nullptr);
    const Eigen::VectorXd dense = b.eval(t);
    for (int j = 0; j < 12; ++j) {
      if (j >= first && j <= first + 3)
        CHECK(dense[j] == val[j - first]);
      else
        CHECK(dense[j] == 0.0);
    }
  }
}

TEST_CASE("derivatives match finite differences") {
  Rng rng(37);
  const double h = 1e-6;
  for (int degree : {1, 2, 3, 4}) {
    for (int nb : {degree + 1, 9, 13}) {
      const BSplineBasis b(degree, nb);
      for (int i = 0; i < 15; ++i) {
        const double t = h + (1.0 - 2.0 * h) * rng.uniform();
        const Eigen::VectorXd fd =
            (b.eval(t + h) - b.eval(t - h)) / (2.0 * h);
        const Eigen::VectorXd an = b.eval_derivative(t);
        for (int j = 0; j < nb; ++j)
          CHECK(an[j] == doctest::Approx(fd[j]).epsilon(5e-6).scale(1.0 + nb));
      }
    }
  }
}

TEST_CASE("matrix evaluation matches pointwise evaluation") {
  const BSplineBasis b(3, 9);
  std::vector<double> grid = {0.0, 0.1, 0.25, 0.5, 0.77, 1.0};
  const Eigen::MatrixXd m = b.eval_matrix(grid);
  const Eigen::MatrixXd md = b.eval_derivative_matrix(grid);
  REQUIRE(m.rows() == 6);
  REQUIRE(m.cols() == 9);
  for (int i = 0; i < 6; ++i) {
    CHECK((m.row(i).transpose() - b.eval(grid[i])).cwiseAbs().maxCoeff() == 0.0);
    CHECK((md.row(i).transpose() - b.eval_derivative(grid[i])).cwiseAbs().maxCoeff() ==
          0.0);
  }
  CHECK_THROWS_AS(b.eval_matrix(std::vector<double>{}), std::invalid_argument);
}

TEST_CASE("evaluation outside the domain throws") {
  const BSplineBasis b(3, 8);
  CHECK_THROWS_AS(b.eval(-0.001), std::domain_error);
  CHECK_THROWS_AS(b.eval(1.001), std::domain_error);
  CHECK_THROWS_AS(b.eval_derivative(2.0), std::domain_error);
}

}  // TEST_SUITE
