#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "testutil.hpp"
#include "xqgram/cqgram.hpp"
#include "xqgram/mc.hpp"

using namespace xqgram;

TEST_CASE("identical series at lag zero give correlation one") {
  Rng rng(10);
  std::vector<double> v = testutil::distinct_lattice_series(rng, 40);
  TimeSeries x(v);
  CHECK(cross_quantilogram(x, x, 0, QuantilePair(0.5, 0.5)) == 1.0);
  CHECK(cross_quantilogram(x, x, 0, QuantilePair(0.3, 0.3)) == 1.0);
}

TEST_CASE("three-point fixture") {
  TimeSeries x1({-1, 0, 1});
  TimeSeries x2({1, 0, -1});
  double rho = cross_quantilogram(x1, x2, 0, QuantilePair(0.5, 0.5));
  CHECK(rho == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("independent white noise has small lag-one correlation") {
  auto [x1, x2] = gen_dgp1(20000, 17);
  double rho = cross_quantilogram(x1, x2, 1, QuantilePair(0.5, 0.5));
  CHECK(std::abs(rho) < 3.0 / std::sqrt(20000.0));
}

TEST_CASE("matches the naive transcription on small series") {
  Rng rng(11);
  for (int trial = 0; trial < 60; ++trial) {
    long T = 8 + rng.uniform_int(0, 4);
    std::vector<double> v1 = testutil::distinct_lattice_series(rng, T);
    std::vector<double> v2 = testutil::distinct_lattice_series(rng, T);
    TimeSeries x1(v1), x2(v2);
    for (long k = 0; k <= 3; ++k) {
      for (double a1 : {0.1, 0.4, 0.7}) {
        for (double a2 : {0.2, 0.5, 0.9}) {
          double mine = cross_quantilogram(x1, x2, k, QuantilePair(a1, a2));
          double ref = oracle::cross_quantilogram(v1, v2, k, a1, a2);
          CHECK(std::abs(mine - ref) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("lag vector consistency and bounds") {
  Rng rng(12);
  std::vector<double> v1 = testutil::gaussian_series(rng, 120);
  std::vector<double> v2 = testutil::gaussian_series(rng, 120);
  TimeSeries x1(v1), x2(v2);
  QuantilePair pair(0.3, 0.6);

  CQResult one = cq_vector(x1, x2, 1, pair);
  CHECK(one.at(1) == cross_quantilogram(x1, x2, 1, pair));

  CQResult five = cq_vector(x1, x2, 5, pair);
  CQResult three = cq_vector(x1, x2, 3, pair);
  for (int k = 1; k <= 3; ++k) CHECK(five.at(k) == three.at(k));

  for (double r : five.rho) {
    CHECK(r >= -1.0);
    CHECK(r <= 1.0);
  }
}

TEST_CASE("portmanteau statistics") {
  CQResult rho;
  rho.T = 100;
  rho.p = 2;
  rho.rho = {0.1, -0.2};
  CHECK(q_box_pierce(rho) == doctest::Approx(5.0).epsilon(1e-14));

  CQResult single;
  single.T = 100;
  single.p = 1;
  single.rho = {0.1};
  CHECK(q_box_ljung(single) ==
        doctest::Approx(100.0 * 102.0 * 0.01 / 99.0).epsilon(1e-14));

  CQResult zero;
  zero.T = 50;
  zero.p = 3;
  zero.rho = {0.0, 0.0, 0.0};
  CHECK(q_box_pierce(zero) == 0.0);
  CHECK(q_box_ljung(zero) == 0.0);

  // Box-Ljung dominates whenever some lag is nonzero.
  Rng rng(13);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v1 = testutil::gaussian_series(rng, 80);
    std::vector<double> v2 = testutil::gaussian_series(rng, 80);
    CQResult r = cq_vector(TimeSeries(v1), TimeSeries(v2), 4, QuantilePair(0.4, 0.4));
    double bp = q_box_pierce(r);
    double lb = q_box_ljung(r);
    CHECK(lb >= bp);
    bool any_nonzero = false;
    for (double x : r.rho) any_nonzero = any_nonzero || x != 0.0;
    if (any_nonzero) CHECK(lb > bp);
  }
}

TEST_CASE("sup over a quantile grid") {
  auto [x1, x2] = gen_dgp1(400, 23);
  std::vector<QuantilePair> pairs;
  for (double a1 : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double a2 : {0.1, 0.3, 0.5, 0.7, 0.9}) pairs.emplace_back(a1, a2);
  }
  QuantileGrid grid(pairs);
  SupQResult sup = sup_q(x1, x2, 3, grid, StatVariant::BoxLjung);
  CHECK(std::isfinite(sup.value));
  for (const QuantilePair& pair : pairs) {
    double q = q_box_ljung(cq_vector(x1, x2, 3, pair));
    CHECK(sup.value >= q);
  }
  QuantileGrid singleton(std::vector<QuantilePair>{QuantilePair(0.3, 0.7)});
  SupQResult single = sup_q(x1, x2, 3, singleton, StatVariant::BoxLjung);
  CHECK(single.value == q_box_ljung(cq_vector(x1, x2, 3, QuantilePair(0.3, 0.7))));
  CHECK(single.argmax == QuantilePair(0.3, 0.7));
}

TEST_CASE("monotone-transform invariance is bit-exact") {
  Rng rng(14);
  for (int trial = 0; trial < 40; ++trial) {
    long T = 30 + rng.uniform_int(0, 30);
    std::vector<double> v1 = testutil::distinct_lattice_series(rng, T);
    std::vector<double> v2 = testutil::distinct_lattice_series(rng, T);
    QuantilePair pair(0.05 * rng.uniform_int(2, 18), 0.05 * rng.uniform_int(2, 18));

    std::vector<double> g1(v1.size()), g2(v2.size());
    for (size_t i = 0; i < v1.size(); ++i) g1[i] = std::exp(v1[i]);
    for (size_t i = 0; i < v2.size(); ++i) g2[i] = 3.0 * v2[i] - 2.0;

    CQResult base = cq_vector(TimeSeries(v1), TimeSeries(v2), 3, pair);
    CQResult transformed = cq_vector(TimeSeries(g1), TimeSeries(g2), 3, pair);
    for (int k = 1; k <= 3; ++k) CHECK(base.at(k) == transformed.at(k));
  }
}

TEST_CASE("input validation") {
  TimeSeries x({1, 2, 3, 4});
  TimeSeries y({1, 2, 3});
  CHECK_THROWS_AS(cross_quantilogram(x, y, 1, QuantilePair(0.5, 0.5)),
                  InvalidArgument);
  CHECK_THROWS_AS(cross_quantilogram(x, x, 3, QuantilePair(0.5, 0.5)),
                  InvalidArgument);
  CHECK_THROWS_AS(cross_quantilogram(x, x, -1, QuantilePair(0.5, 0.5)),
                  InvalidArgument);
  CHECK_THROWS_AS(cq_vector(x, x, 0, QuantilePair(0.5, 0.5)), InvalidArgument);
  CHECK_THROWS_AS(QuantileGrid(std::vector<QuantilePair>{}), InvalidArgument);
  CHECK_THROWS_AS(QuantileGrid(std::vector<QuantilePair>{QuantilePair(0.5, 0.5),
                                                         QuantilePair(0.5, 0.5)}),
                  InvalidArgument);
}
