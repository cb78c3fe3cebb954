#include <cmath>
#include <cstdint>
#include <vector>

#include "doctest.h"
#include "tacifa/rng.hpp"

namespace {
using tacifa::Rng;
}

TEST_SUITE("rng") {

TEST_CASE("streams are reproducible and seed-dependent") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 1000; ++i) {
    const double ua = a.uniform();
    all_equal = all_equal && (ua == b.uniform());
    any_diff = any_diff || (ua != c.uniform());
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("uniform stays inside the open interval with matching moments") {
  Rng rng(7);
  const int n = 200000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  const double mean = sum / n;
  const double var = sumsq / n - mean * mean;
  // SE(mean) = 1/sqrt(12 n); allow five standard errors.
  CHECK(std::abs(mean - 0.5) < 5.0 / std::sqrt(12.0 * n));
  CHECK(std::abs(var - 1.0 / 12.0) < 5e-4);
}

TEST_CASE("normal moments") {
  Rng rng(11);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s1 += z;
    s2 += z * z;
    s3 += z * z * z;
    s4 += z * z * z * z;
  }
  CHECK(std::abs(s1 / n) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(s2 / n - 1.0) < 0.02);
  CHECK(std::abs(s3 / n) < 0.05);        // skewness ~ 0
  CHECK(std::abs(s4 / n - 3.0) < 0.12);  // kurtosis ~ 3
  Rng rng2(11);
  const double shifted = rng2.normal(2.0, 3.0);
  Rng rng3(11);
  CHECK(shifted == doctest::Approx(2.0 + 3.0 * rng3.normal()));
}

TEST_CASE("gamma moments across shapes including the boosted branch") {
  const int n = 200000;
  for (double shape : {0.5, 1.0, 2.5, 7.0}) {
    for (double rate : {1.0, 2.0}) {
      Rng rng(1234 + static_cast<std::uint64_t>(10 * shape + rate));
      double s1 = 0.0, s2 = 0.0;
      for (int i = 0; i < n; ++i) {
        const double g = rng.gamma(shape, rate);
        REQUIRE(g > 0.0);
        s1 += g;
        s2 += g * g;
      }
      const double mean = s1 / n;
      const double var = s2 / n - mean * mean;
      const double true_mean = shape / rate;
      const double true_var = shape / (rate * rate);
      // SE of the sample mean is sqrt(var/n); the variance estimate is
      // noisier, so give it a wider relative band.
      CHECK(std::abs(mean - true_mean) < 6.0 * std::sqrt(true_var / n));
      CHECK(std::abs(var - true_var) < 0.05 * true_var);
    }
  }
}

TEST_CASE("gamma rejects non-positive parameters") {
  Rng rng(5);
  CHECK_THROWS_AS(rng.gamma(0.0, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gamma(1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(rng.gamma(-1.0, 1.0), std::invalid_argument);
}

TEST_CASE("below covers the range uniformly") {
  Rng rng(99);
  CHECK(rng.below(1) == 0);
  const std::uint64_t n = 7;
  std::vector<int> counts(n, 0);
  const int draws = 70000;
  for (int i = 0; i < draws; ++i) {
    const std::uint64_t v = rng.below(n);
    REQUIRE(v < n);
    ++counts[v];
  }
  const double expect = static_cast<double>(draws) / n;
  for (auto c : counts) CHECK(std::abs(c - expect) < 6.0 * std::sqrt(expect));
  CHECK_THROWS_AS(rng.below(0), std::invalid_argument);
}

}  // TEST_SUITE
