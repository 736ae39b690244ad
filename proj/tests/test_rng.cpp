#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <vector>

#include "stabletrees/rng.hpp"

using namespace stabletrees;

TEST_CASE("splitmix64 fixed points") {
  std::uint64_t x = 0;
  CHECK(splitmix64(x) == 16294208416658607535ULL);
  CHECK(splitmix64(x) == 7960286522194355700ULL);
  CHECK(splitmix64(x) == 487617019471545679ULL);
}

TEST_CASE("stream output is frozen") {
  // pinned so an accidental change to the seeding path cannot go unnoticed
  RngStream r(42, 0);
  CHECK(r() == 10006837701804438423ULL);
  CHECK(r() == 5187931035329688282ULL);
  CHECK(r() == 17161009526861914666ULL);
  RngStream r1(42, 1);
  CHECK(r1() == 6882650757528920944ULL);
}

TEST_CASE("identical keys reproduce, distinct keys decorrelate") {
  RngStream a(123, 7), b(123, 7), c(123, 8), d(124, 7);
  int agree_c = 0, agree_d = 0;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t va = a();
    CHECK(va == b());
    agree_c += va == c();
    agree_d += va == d();
  }
  CHECK(agree_c == 0);
  CHECK(agree_d == 0);
}

TEST_CASE("uniform ranges") {
  RngStream r(7, 3);
  CHECK(r.uniform() == doctest::Approx(0.70234590903368643).epsilon(1e-15));
  for (int i = 0; i < 10000; ++i) {
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  for (int i = 0; i < 10000; ++i) CHECK(r.uniform_pos() > 0.0);
}

TEST_CASE("exponential and normal moments") {
  RngStream r(2024, 0);
  const int n = 200000;
  double se = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < n; ++i) {
    se += r.exponential();
    const double z = r.normal();
    sn += z;
    sn2 += z * z;
  }
  const double mean_e = se / n;
  const double mean_n = sn / n;
  const double var_n = sn2 / n - mean_n * mean_n;
  // 5 sigma windows at this sample size
  CHECK(std::fabs(mean_e - 1.0) < 5.0 / std::sqrt(double(n)));
  CHECK(std::fabs(mean_n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::fabs(var_n - 1.0) < 5.0 * std::sqrt(2.0 / n));
}

TEST_CASE("normal spare cache is per stream") {
  RngStream a(5, 0), b(5, 0);
  (void)a.normal();  // leaves a spare cached in a only
  std::vector<double> rest_a, rest_b;
  (void)b.normal();
  for (int i = 0; i < 8; ++i) {
    rest_a.push_back(a.normal());
    rest_b.push_back(b.normal());
  }
  CHECK(rest_a == rest_b);
}
