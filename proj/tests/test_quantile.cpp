#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "testutil.hpp"
#include "xqgram/quantile.hpp"

using namespace xqgram;

TEST_CASE("check loss values") {
  CHECK(check_loss(0.0, QuantileLevel(0.3)) == 0.0);
  CHECK(check_loss(2.0, QuantileLevel(0.3)) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(check_loss(-2.0, QuantileLevel(0.3)) == doctest::Approx(1.4).epsilon(1e-15));
  Rng rng(1);
  for (int i = 0; i < 200; ++i) {
    double u = rng.normal() * 5.0;
    CHECK(check_loss(u, QuantileLevel(0.25)) >= 0.0);
  }
}

TEST_CASE("psi values and strict indicator at zero") {
  CHECK(psi(-1.0, QuantileLevel(0.5)) == 0.5);
  CHECK(psi(1.0, QuantileLevel(0.5)) == -0.5);
  CHECK(psi(0.0, QuantileLevel(0.1)) == doctest::Approx(-0.1).epsilon(1e-15));
}

TEST_CASE("empirical quantile order-statistic rule") {
  TimeSeries x({1, 2, 3, 4, 5});
  CHECK(empirical_quantile(x, QuantileLevel(0.5)) == 3.0);
  CHECK(empirical_quantile(x, QuantileLevel(0.2)) == 1.0);  // left endpoint
  TimeSeries rev({5, 4, 3, 2, 1});
  CHECK(empirical_quantile(rev, QuantileLevel(0.5)) == 3.0);
  CHECK_THROWS_AS(empirical_quantile(std::span<const double>{}, QuantileLevel(0.5)),
                  InvalidArgument);
}

TEST_CASE("quantile solves the check-loss program and matches the oracle") {
  Rng rng(2);
  for (int trial = 0; trial < 200; ++trial) {
    long T = 5 + rng.uniform_int(0, 35);
    std::vector<double> x = testutil::distinct_lattice_series(rng, T);
    double a = 0.05 * static_cast<double>(rng.uniform_int(1, 19));
    QuantileLevel level(a);
    double q = empirical_quantile(std::span<const double>(x), level);

    CHECK(q == oracle::quantile(x, a));

    double loss_q = 0.0;
    for (double xi : x) loss_q += check_loss(xi - q, level);
    for (double v : x) {
      double loss_v = 0.0;
      for (double xi : x) loss_v += check_loss(xi - v, level);
      CHECK(loss_q <= loss_v + 1e-12);
    }
  }
}

TEST_CASE("monotone-transform equivariance is exact") {
  Rng rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> x = testutil::distinct_lattice_series(rng, 25);
    double a = 0.05 * static_cast<double>(rng.uniform_int(1, 19));
    QuantileLevel level(a);
    double q = empirical_quantile(std::span<const double>(x), level);

    std::vector<double> gx(x.size());
    for (size_t i = 0; i < x.size(); ++i) gx[i] = 2.0 * x[i] + 1.0;
    CHECK(empirical_quantile(std::span<const double>(gx), level) == 2.0 * q + 1.0);

    for (size_t i = 0; i < x.size(); ++i) gx[i] = x[i] * x[i] * x[i];
    CHECK(empirical_quantile(std::span<const double>(gx), level) == q * q * q);
  }
}

TEST_CASE("hit-count bounds for distinct values") {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    long T = 5 + rng.uniform_int(0, 45);
    std::vector<double> x = testutil::distinct_lattice_series(rng, T);
    double a = 0.05 * static_cast<double>(rng.uniform_int(1, 19));
    double q = empirical_quantile(std::span<const double>(x), QuantileLevel(a));
    long below = 0, at_or_below = 0;
    for (double xi : x) {
      below += xi < q;
      at_or_below += xi <= q;
    }
    CHECK(static_cast<double>(below) <= static_cast<double>(T) * a);
    CHECK(at_or_below >= quantile_rank(T, a));
  }
}

TEST_CASE("recursive quantiles: worked prefix example") {
  TimeSeries x({1, 2, 3, 4});
  std::vector<double> rq = recursive_quantiles(x, QuantileLevel(0.5), 0.5);
  REQUIRE(rq.size() == 3);
  CHECK(rq[0] == 1.0);
  CHECK(rq[1] == 2.0);
  CHECK(rq[2] == 2.0);
}

TEST_CASE("recursive quantiles agree with per-prefix estimation") {
  Rng rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    long T = 20 + rng.uniform_int(0, 60);
    std::vector<double> x = testutil::gaussian_series(rng, T);
    double a = 0.05 * static_cast<double>(rng.uniform_int(1, 19));
    double omega = 0.1 + 0.05 * static_cast<double>(rng.uniform_int(0, 8));
    TimeSeries series(x);
    std::vector<double> rq = recursive_quantiles(series, QuantileLevel(a), omega);
    long s_min = trimmed_start(T, omega);
    REQUIRE(static_cast<long>(rq.size()) == T - s_min + 1);
    for (long s = s_min; s <= T; ++s) {
      std::span<const double> prefix(x.data(), static_cast<size_t>(s));
      CHECK(rq[s - s_min] == empirical_quantile(prefix, QuantileLevel(a)));
    }
    CHECK(rq.back() == empirical_quantile(series, QuantileLevel(a)));
  }
}

TEST_CASE("recursive quantiles: constant series and bad omega") {
  TimeSeries c({7, 7, 7, 7, 7, 7});
  for (double v : recursive_quantiles(c, QuantileLevel(0.3), 0.4)) CHECK(v == 7.0);
  CHECK_THROWS_AS(recursive_quantiles(c, QuantileLevel(0.3), 0.0), InvalidArgument);
  CHECK_THROWS_AS(recursive_quantiles(c, QuantileLevel(0.3), 1.0), InvalidArgument);
  CHECK_THROWS_AS(recursive_quantiles(c, QuantileLevel(0.3), -0.2), InvalidArgument);
  // ceil(T*omega) must be at least 2
  CHECK_THROWS_AS(recursive_quantiles(c, QuantileLevel(0.3), 0.05), InvalidArgument);
}

TEST_CASE("quantile rank handles near-integer products") {
  // 100 * 0.3 carries floating-point dust; the rank must treat it as 30.
  CHECK(quantile_rank(100, 0.3) == 30);
  CHECK(quantile_rank(5, 0.2) == 1);
  CHECK(quantile_rank(5, 0.5) == 3);
  CHECK(quantile_rank(2000, 0.1) == 200);
  CHECK(quantile_rank(3, 0.0001) == 1);
}

TEST_CASE("time series validation") {
  CHECK_THROWS_AS(TimeSeries({1.0}), InvalidArgument);
  CHECK_THROWS_AS(TimeSeries({1.0, std::nan("")}), InvalidArgument);
  CHECK_THROWS_AS(TimeSeries({1.0, std::numeric_limits<double>::infinity()}),
                  InvalidArgument);
  CHECK_THROWS_AS(QuantileLevel(0.0), InvalidArgument);
  CHECK_THROWS_AS(QuantileLevel(1.0), InvalidArgument);
}
