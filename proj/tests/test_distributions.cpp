#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "stabletrees/distributions.hpp"
#include "stabletrees/rng.hpp"

using namespace stabletrees;

namespace {

struct MeanSe {
  double mean;
  double se;
};

template <typename F>
MeanSe sample_mean(int n, F draw) {
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = draw();
    s += x;
    s2 += x * x;
  }
  const double m = s / n;
  const double var = (s2 - n * m * m) / (n - 1);
  return {m, std::sqrt(var / n)};
}

}  // namespace

TEST_CASE("environment overrides with safe fallbacks") {
  unsetenv("STABLETREES_N_TRUNC");
  unsetenv("STABLETREES_MIN_N_TRUNC");
  unsetenv("STABLETREES_ALPHA_LEVEL");
  CHECK(default_n_trunc() == 100000);
  CHECK(min_n_trunc() == 10000);
  CHECK(default_alpha_level() == doctest::Approx(0.01));

  setenv("STABLETREES_N_TRUNC", "2500", 1);
  setenv("STABLETREES_ALPHA_LEVEL", "0.05", 1);
  CHECK(default_n_trunc() == 2500);
  CHECK(default_alpha_level() == doctest::Approx(0.05));

  setenv("STABLETREES_N_TRUNC", "garbage", 1);
  setenv("STABLETREES_ALPHA_LEVEL", "1.5", 1);  // out of range -> fallback
  CHECK(default_n_trunc() == 100000);
  CHECK(default_alpha_level() == doctest::Approx(0.01));

  unsetenv("STABLETREES_N_TRUNC");
  unsetenv("STABLETREES_ALPHA_LEVEL");
}

TEST_CASE("ml_params validates its domain") {
  CHECK_THROWS_AS(ml_params(0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ml_params(1.2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(ml_params(0.5, -0.5), std::invalid_argument);
  CHECK_NOTHROW(ml_params(1.0, 0.0));
  CHECK_NOTHROW(ml_params(0.5, -0.49));
}

TEST_CASE("ml_moment closed forms") {
  // chain marginals M_p ~ ML(1 - 1/alpha, p - 1/alpha)
  const MlParams m1_15 = ml_params(1.0 / 3.0, 1.0 / 3.0);
  CHECK(ml_moment(m1_15, 0) == 1.0);
  CHECK(ml_moment(m1_15, 1) == doctest::Approx(1.9783642596).epsilon(1e-9));
  CHECK(ml_moment(m1_15, 3) == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(ml_moment(m1_15, 6) == doctest::Approx(1620.0).epsilon(1e-12));

  const MlParams m1_2 = ml_params(0.5, 0.5);
  CHECK(ml_moment(m1_2, 1) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(ml_moment(m1_2, 2) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(ml_moment(m1_2, 3) == doctest::Approx(10.6347231054).epsilon(1e-9));
  // M_2 at alpha = 2 is 2 sqrt(Gamma(2)): second moment 4 E[Gamma(2)] = 8
  CHECK(ml_moment(ml_params(0.5, 1.5), 2) == doctest::Approx(8.0).epsilon(1e-12));

  CHECK(ml_moment(ml_params(1.0 / 3.0, 4.0 / 3.0), 1) ==
        doctest::Approx(3.9567285193).epsilon(1e-9));

  CHECK_THROWS_AS(ml_moment(m1_15, -1), std::invalid_argument);
  CHECK_THROWS_AS(ml_moment(ml_params(0.01, 50.0), 10000), std::range_error);
}

TEST_CASE("gamma sampler moments") {
  RngStream rng(11, 0);
  const int n = 200000;
  for (double shape : {0.3, 1.0, 4.2}) {
    const auto [mean, se] = sample_mean(n, [&] { return sample_gamma(shape, rng); });
    CHECK(std::fabs(mean - shape) < 5.0 * se);
  }
  CHECK_THROWS_AS(sample_gamma(0.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_gamma(-1.0, rng), std::invalid_argument);
}

TEST_CASE("beta sampler moments and the b == 0 convention") {
  RngStream rng(12, 0);
  const double a = 2.5, b = 1.7;
  const int n = 200000;
  const auto [mean, se] = sample_mean(n, [&] {
    const double x = sample_beta(a, b, rng);
    CHECK(x > 0.0);
    CHECK(x < 1.0);
    return x;
  });
  CHECK(std::fabs(mean - a / (a + b)) < 5.0 * se);

  // Beta(a, 0) is the point mass at 1 and must consume no randomness
  RngStream r1(99, 0), r2(99, 0);
  CHECK(sample_beta(3.0, 0.0, r1) == 1.0);
  CHECK(r1() == r2());
}

TEST_CASE("dirichlet sampler") {
  RngStream rng(13, 0);
  const std::vector<double> params{0.5, 1.5, 3.0};
  const int n = 100000;
  std::vector<double> mean(params.size(), 0.0);
  for (int i = 0; i < n; ++i) {
    const auto z = sample_dirichlet(params, rng);
    REQUIRE(z.size() == params.size());
    const double total = std::accumulate(z.begin(), z.end(), 0.0);
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    for (std::size_t j = 0; j < z.size(); ++j) {
      CHECK(z[j] > 0.0);
      mean[j] += z[j];
    }
  }
  const double s = std::accumulate(params.begin(), params.end(), 0.0);
  for (std::size_t j = 0; j < params.size(); ++j)
    CHECK(mean[j] / n == doctest::Approx(params[j] / s).epsilon(0.01));
}

TEST_CASE("exact half-index sampler") {
  RngStream rng(14, 0);
  const int n = 200000;
  const auto [mean, se] = sample_mean(n, [&] { return sample_ml_half(1, rng); });
  CHECK(std::fabs(mean - std::sqrt(M_PI)) < 5.0 * se);

  const double e23 = ml_moment(ml_params(0.5, 2.0 / 3.0), 1);
  const auto [mean2, se2] =
      sample_mean(n, [&] { return sample_ml_half_theta(2.0 / 3.0, rng); });
  CHECK(std::fabs(mean2 - e23) < 5.0 * se2);
}

TEST_CASE("truncated product keeps the first moment exact") {
  RngStream rng(15, 0);
  const double alpha = 1.5;
  const long trunc = 2000;
  const int n = 50000;
  const auto [mean, se] = sample_mean(n, [&] {
    const auto r = sample_m1(alpha, trunc, rng);
    CHECK(r.below_min_trunc);  // 2000 < min_n_trunc()
    CHECK(r.value > 0.0);
    return r.value;
  });
  CHECK(std::fabs(mean - 1.9783642596) < 5.0 * se);

  const auto ok = sample_m1(alpha, min_n_trunc(), rng);
  CHECK_FALSE(ok.below_min_trunc);

  // alpha == 2 dispatches to the exact sampler
  const auto [mean2, se2] =
      sample_mean(n, [&] { return sample_m1(2.0, 64, rng).value; });
  CHECK(std::fabs(mean2 - std::sqrt(M_PI)) < 5.0 * se2);
}
