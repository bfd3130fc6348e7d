#include <doctest.h>

#include <cmath>
#include <limits>

#include "oracles.hpp"
#include "testutil.hpp"
#include "xqgram/mc.hpp"
#include "xqgram/parallel.hpp"
#include "xqgram/partial.hpp"

using namespace xqgram;

namespace {

ControlPanel one_control(std::vector<double> z, double beta) {
  ControlPanel panel;
  panel.z.emplace_back(std::move(z));
  panel.beta.emplace_back(beta);
  return panel;
}

}  // namespace

TEST_CASE("hit vectors: count, range, constant control") {
  Rng rng(60);
  long T = 80;
  TimeSeries x1(testutil::distinct_lattice_series(rng, T));
  TimeSeries x2(testutil::distinct_lattice_series(rng, T));
  ControlPanel z = one_control(std::vector<double>(T, 3.14), 0.4);
  QuantilePair pair(0.3, 0.6);

  HitPanel hits = hit_vectors(x1, x2, z, 5, pair);
  CHECK(hits.rows() == T - 5);
  CHECK(hits.dim == 3);
  for (long t = 0; t < hits.rows(); ++t) {
    const double* row = hits.row(t);
    CHECK((row[0] == doctest::Approx(-0.3) || row[0] == doctest::Approx(0.7)));
    CHECK((row[1] == doctest::Approx(-0.6) || row[1] == doctest::Approx(0.4)));
    // A constant control never falls strictly below its own quantile.
    CHECK(row[2] == doctest::Approx(-0.4));
  }
}

TEST_CASE("hit correlation: diagonal level, symmetry, inverse contract") {
  Rng rng(61);
  long T = 2000;
  TimeSeries x1(testutil::gaussian_series(rng, T));
  TimeSeries x2(testutil::gaussian_series(rng, T));
  ControlPanel z = one_control(testutil::gaussian_series(rng, T), 0.5);
  QuantilePair pair(0.3, 0.3);
  long k = 2;

  HitPanel hits = hit_vectors(x1, x2, z, k, pair);
  HitMatrix m = hit_correlation(hits);

  double expect = 0.3 * 0.7 * static_cast<double>(T - k) / static_cast<double>(T);
  CHECK(m.r_hat(0, 0) == doctest::Approx(expect).epsilon(0.05));

  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) CHECK(m.r_hat(i, j) == m.r_hat(j, i));
  }

  REQUIRE(m.p_hat.has_value());
  const SquareMatrix& p = *m.p_hat;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double prod = 0.0;
      for (int l = 0; l < 3; ++l) prod += p(i, l) * m.r_hat(l, j);
      CHECK(prod == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("fixture matrix: inversion route equals the closed form") {
  double r[3][3] = {{0.25, 0.05, 0.1}, {0.05, 0.25, 0.1}, {0.1, 0.1, 0.25}};
  HitMatrix m;
  m.r_hat = SquareMatrix(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) m.r_hat(i, j) = r[i][j];
  }
  double inv[3][3];
  REQUIRE(oracle::invert3(r, inv));
  SquareMatrix p(3);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) p(i, j) = inv[i][j];
  }
  m.p_hat = p;

  double via_inverse = partial_from_hit_matrix(m);
  double via_formula = oracle::partial_corr_3(r);
  CHECK(std::abs(via_inverse - via_formula) < 1e-12);
  CHECK(via_formula == doctest::Approx(0.04 / 0.84).epsilon(1e-12));
}

TEST_CASE("orthogonal control hits reduce to the plain ratio") {
  // Hand-built hit rows whose control column is orthogonal, in sample, to
  // both x columns.
  HitPanel hits;
  hits.dim = 3;
  hits.T = 8;
  hits.k = 0;
  // Sign patterns with sum(h1*hz) = sum(h2*hz) = 0 but sum(h1*h2) != 0.
  double h1[8] = {.5, -.5, .5, -.5, .5, -.5, .5, -.5};
  double h2[8] = {-.5, -.5, -.5, -.5, .5, -.5, .5, -.5};
  double hz[8] = {.5, -.5, -.5, .5, .5, -.5, -.5, .5};
  double s1 = 0, s2 = 0;
  for (int i = 0; i < 8; ++i) {
    s1 += h1[i] * hz[i];
    s2 += h2[i] * hz[i];
  }
  REQUIRE(s1 == 0.0);
  REQUIRE(s2 == 0.0);
  for (int i = 0; i < 8; ++i) {
    hits.data.push_back(h1[i]);
    hits.data.push_back(h2[i]);
    hits.data.push_back(hz[i]);
  }
  HitMatrix m = hit_correlation(hits);
  double partial = partial_from_hit_matrix(m);
  double plain = m.r_hat(0, 1) / std::sqrt(m.r_hat(0, 0) * m.r_hat(1, 1));
  CHECK(partial == doctest::Approx(plain).epsilon(1e-12));
}

TEST_CASE("collinear controls are singular") {
  Rng rng(62);
  long T = 100;
  TimeSeries x1(testutil::distinct_lattice_series(rng, T));
  TimeSeries x2(testutil::distinct_lattice_series(rng, T));
  std::vector<double> zv = testutil::gaussian_series(rng, T);
  ControlPanel z;
  z.z.emplace_back(zv);
  z.z.emplace_back(zv);  // exact duplicate
  z.beta.emplace_back(0.5);
  z.beta.emplace_back(0.5);
  CHECK_THROWS_AS(partial_cq(x1, x2, z, 1, QuantilePair(0.5, 0.5)),
                  SingularHitMatrixError);
}

TEST_CASE("partial value bounded and invariant to monotone transforms") {
  Rng rng(63);
  for (int trial = 0; trial < 25; ++trial) {
    long T = 60 + rng.uniform_int(0, 60);
    std::vector<double> v1 = testutil::distinct_lattice_series(rng, T);
    std::vector<double> v2 = testutil::distinct_lattice_series(rng, T);
    std::vector<double> vz = testutil::distinct_lattice_series(rng, T);
    QuantilePair pair(0.05 * rng.uniform_int(4, 16), 0.05 * rng.uniform_int(4, 16));
    ControlPanel z = one_control(vz, 0.5);
    double rho = partial_cq(TimeSeries(v1), TimeSeries(v2), z, 2, pair);
    CHECK(rho >= -1.0);
    CHECK(rho <= 1.0);

    std::vector<double> g1(v1.size()), g2(v2.size()), gz(vz.size());
    for (size_t i = 0; i < v1.size(); ++i) g1[i] = std::exp(v1[i]);
    for (size_t i = 0; i < v2.size(); ++i) g2[i] = 7.0 * v2[i] + 11.0;
    for (size_t i = 0; i < vz.size(); ++i) gz[i] = vz[i] * vz[i] * vz[i];
    ControlPanel zg = one_control(gz, 0.5);
    double rho_g = partial_cq(TimeSeries(g1), TimeSeries(g2), zg, 2, pair);
    CHECK(rho == rho_g);
  }
}

TEST_CASE("partial identity on random hit matrices") {
  Rng rng(64);
  for (int trial = 0; trial < 100; ++trial) {
    long T = 80 + rng.uniform_int(0, 120);
    TimeSeries x1(testutil::gaussian_series(rng, T));
    TimeSeries x2(testutil::gaussian_series(rng, T));
    ControlPanel z = one_control(testutil::gaussian_series(rng, T), 0.6);
    QuantilePair pair(0.4, 0.5);
    HitMatrix m = hit_correlation(hit_vectors(x1, x2, z, 1, pair));
    if (!m.p_hat.has_value()) continue;
    double r[3][3];
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) r[i][j] = m.r_hat(i, j);
    }
    CHECK(std::abs(partial_from_hit_matrix(m) - oracle::partial_corr_3(r)) < 1e-12);
  }
}

TEST_CASE("partial bootstrap test: report shape, determinism, size") {
  SBConfig cfg;
  cfg.gamma = 0.3;
  cfg.B = 200;
  cfg.seed = 17;
  cfg.tau = 0.05;

  {
    auto [x1, x2] = gen_dgp1(400, 65);
    Rng zrng(66);
    ControlPanel z = one_control(testutil::gaussian_series(zrng, 400), 0.95);
    TestReport rep = partial_sb_test(x1, x2, z, 1, QuantilePair(0.1, 0.1), cfg);
    REQUIRE(rep.intervals.size() == 1);
    CHECK(rep.intervals[0].lo <= rep.statistic);
    CHECK(rep.intervals[0].hi >= rep.statistic);
    TestReport rep2 = partial_sb_test(x1, x2, z, 1, QuantilePair(0.1, 0.1), cfg);
    CHECK(rep.statistic == rep2.statistic);
    CHECK(rep.intervals[0].lo == rep2.intervals[0].lo);
    CHECK(rep.intervals[0].hi == rep2.intervals[0].hi);
  }

  // Desk-scale size under independence.
  const int reps = 300;
  std::vector<char> rejected(reps, 0);
  parallel_for(reps, [&](long r) {
    std::uint64_t s = 6700 + static_cast<std::uint64_t>(r);
    auto [x1, x2] = gen_dgp1(500, s);
    Rng zrng(s ^ 0xabcdef);
    ControlPanel z = one_control(testutil::gaussian_series(zrng, 500), 0.95);
    SBConfig c = cfg;
    c.seed = s;
    TestReport rep = partial_sb_test(x1, x2, z, 1, QuantilePair(0.5, 0.5), c,
                                     /*threads=*/1);
    rejected[r] = rep.reject;
  });
  double rate = 0.0;
  for (char c : rejected) rate += c;
  rate /= reps;
  CHECK(rate >= 0.02);
  CHECK(rate <= 0.08);
}

TEST_CASE("partial self-normalized test: degenerate branch and size") {
  // Degenerate normalizer: recursive estimates constant in s.
  std::vector<double> constant_rho(50, 0.2);
  CHECK_THROWS_AS(detail::scalar_self_normalized_stat(constant_rho, 30, 79, 0.2),
                  DegenerateNormalizerError);

  std::vector<double> with_gaps(50, std::numeric_limits<double>::quiet_NaN());
  with_gaps[10] = 0.1;
  with_gaps[49] = 0.3;
  double stat = detail::scalar_self_normalized_stat(with_gaps, 30, 79, 0.3);
  CHECK(std::isfinite(stat));

  std::vector<double> taus{0.05};
  auto entries = simulate_sn_critical_values(1, 0.1, taus, 500, 10000, 68);
  CriticalValueTable table;
  for (const auto& e : entries) table.add(e);
  SNConfig cfg;
  cfg.omega = 0.1;
  cfg.tau = 0.05;
  cfg.table = &table;

  const int reps = 300;
  std::vector<char> rejected(reps, 0);
  parallel_for(reps, [&](long r) {
    std::uint64_t s = 6900 + static_cast<std::uint64_t>(r);
    auto [x1, x2] = gen_dgp1(500, s);
    Rng zrng(s ^ 0x123457);
    ControlPanel z = one_control(testutil::gaussian_series(zrng, 500), 0.95);
    TestReport rep = partial_sn_test(x1, x2, z, 1, QuantilePair(0.5, 0.5), cfg);
    rejected[r] = rep.reject;
  });
  double rate = 0.0;
  for (char c : rejected) rate += c;
  rate /= reps;
  CHECK(rate >= 0.01);
  CHECK(rate <= 0.08);
}

TEST_CASE("partial self-normalized statistic is invariant to monotone transforms") {
  Rng rng(70);
  std::vector<double> v1 = testutil::distinct_lattice_series(rng, 200);
  std::vector<double> v2 = testutil::distinct_lattice_series(rng, 200);
  std::vector<double> vz = testutil::distinct_lattice_series(rng, 200);

  std::vector<double> taus{0.05};
  auto entries = simulate_sn_critical_values(1, 0.2, taus, 500, 10000, 71);
  CriticalValueTable table;
  for (const auto& e : entries) table.add(e);
  SNConfig cfg;
  cfg.omega = 0.2;
  cfg.tau = 0.05;
  cfg.table = &table;
  QuantilePair pair(0.4, 0.4);

  ControlPanel z = one_control(vz, 0.5);
  TestReport base = partial_sn_test(TimeSeries(v1), TimeSeries(v2), z, 1, pair, cfg);

  std::vector<double> g1(v1.size()), g2(v2.size()), gz(vz.size());
  for (size_t i = 0; i < v1.size(); ++i) g1[i] = std::atan(v1[i]);
  for (size_t i = 0; i < v2.size(); ++i) g2[i] = 2.0 * v2[i] + 1.0;
  for (size_t i = 0; i < vz.size(); ++i) gz[i] = std::exp(vz[i]);
  ControlPanel zg = one_control(gz, 0.5);
  TestReport transformed =
      partial_sn_test(TimeSeries(g1), TimeSeries(g2), zg, 1, pair, cfg);
  CHECK(base.statistic == transformed.statistic);
}
