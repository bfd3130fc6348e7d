#include "xqgram/partial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "xqgram/parallel.hpp"
#include "xqgram/quantile.hpp"

namespace xqgram {

namespace {

constexpr std::uint64_t kStreamPartialBoot = 0x50515f424f4f54ULL;  // "PQ_BOOT"
constexpr double kMaxCondition = 1e12;

struct InverseResult {
  Eigen::MatrixXd inverse;
  double condition = 0.0;
  bool ok = false;
};

InverseResult invert_spd(const Eigen::MatrixXd& m) {
  InverseResult out;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  out.condition = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
  if (!(lo > 0.0) || out.condition > kMaxCondition) return out;
  Eigen::VectorXd inv_eig = eig.eigenvalues().cwiseInverse();
  out.inverse = eig.eigenvectors() * inv_eig.asDiagonal() *
                eig.eigenvectors().transpose();
  out.ok = true;
  return out;
}

double partial_from_inverse(const Eigen::MatrixXd& p_hat) {
  return -p_hat(0, 1) / std::sqrt(p_hat(0, 0) * p_hat(1, 1));
}

// Partial cross-quantilogram from raw component columns (x1 window, x2
// lagged window, control windows), re-estimating every quantile from the
// supplied values. Shared by the bootstrap replicates.
double partial_from_columns(const std::vector<std::vector<double>>& cols,
                            const std::vector<double>& levels) {
  int dim = static_cast<int>(cols.size());
  long n = static_cast<long>(cols[0].size());
  std::vector<double> q(static_cast<size_t>(dim));
  for (int d = 0; d < dim; ++d) {
    q[d] = empirical_quantile(std::span<const double>(cols[d]),
                              QuantileLevel(levels[d]));
  }
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(dim, dim);
  Eigen::VectorXd h(dim);
  for (long t = 0; t < n; ++t) {
    for (int d = 0; d < dim; ++d) {
      h(d) = (cols[d][t] < q[d] ? 1.0 : 0.0) - levels[d];
    }
    r.selfadjointView<Eigen::Lower>().rankUpdate(h);
  }
  r = r.selfadjointView<Eigen::Lower>();
  r /= static_cast<double>(n);
  InverseResult inv = invert_spd(r);
  if (!inv.ok) {
    throw SingularHitMatrixError(
        "hit matrix singular on resample (condition " +
        std::to_string(inv.condition) + ")");
  }
  return partial_from_inverse(inv.inverse);
}

}  // namespace

HitPanel hit_vectors(const TimeSeries& x1, const TimeSeries& x2,
                     const ControlPanel& z, long k, const QuantilePair& pair) {
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("hit_vectors: series lengths differ");
  }
  z.validate(T);
  if (k < 1 || k > T - 2) {
    throw InvalidArgument("hit_vectors: lag must satisfy 1 <= k <= T-2");
  }
  int l = z.dim();
  double q1 = empirical_quantile(x1, pair.a1);
  double q2 = empirical_quantile(x2, pair.a2);
  std::vector<double> qz(static_cast<size_t>(l));
  for (int i = 0; i < l; ++i) {
    qz[i] = empirical_quantile(z.z[static_cast<size_t>(i)], z.beta[static_cast<size_t>(i)]);
  }

  HitPanel out;
  out.dim = 2 + l;
  out.T = T;
  out.k = k;
  out.data.reserve(static_cast<size_t>((T - k) * out.dim));
  for (long t = k; t < T; ++t) {
    out.data.push_back((x1[t] < q1 ? 1.0 : 0.0) - pair.a1.value());
    out.data.push_back((x2[t - k] < q2 ? 1.0 : 0.0) - pair.a2.value());
    for (int i = 0; i < l; ++i) {
      out.data.push_back((z.z[static_cast<size_t>(i)][t] < qz[i] ? 1.0 : 0.0) -
                         z.beta[static_cast<size_t>(i)].value());
    }
  }
  return out;
}

HitMatrix hit_correlation(const HitPanel& hits) {
  if (hits.rows() < 1) throw InvalidArgument("hit_correlation: empty hits");
  int d = hits.dim;
  Eigen::MatrixXd r = Eigen::MatrixXd::Zero(d, d);
  for (long t = 0; t < hits.rows(); ++t) {
    Eigen::Map<const Eigen::VectorXd> h(hits.row(t), d);
    r.selfadjointView<Eigen::Lower>().rankUpdate(h);
  }
  r = r.selfadjointView<Eigen::Lower>();
  r /= static_cast<double>(hits.T);  // divisor T, not T-k

  HitMatrix out;
  out.r_hat = SquareMatrix(d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out.r_hat(i, j) = r(i, j);
  }
  InverseResult inv = invert_spd(r);
  out.condition = inv.condition;
  if (inv.ok) {
    SquareMatrix p(d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) p(i, j) = inv.inverse(i, j);
    }
    out.p_hat = std::move(p);
  }
  return out;
}

double partial_from_hit_matrix(const HitMatrix& m) {
  if (!m.p_hat.has_value()) {
    throw SingularHitMatrixError(
        "hit matrix singular (condition " + std::to_string(m.condition) +
        "); collinear controls or degenerate hits");
  }
  const SquareMatrix& p = *m.p_hat;
  return -p(0, 1) / std::sqrt(p(0, 0) * p(1, 1));
}

double partial_cq(const TimeSeries& x1, const TimeSeries& x2,
                  const ControlPanel& z, long k, const QuantilePair& pair) {
  return partial_from_hit_matrix(hit_correlation(hit_vectors(x1, x2, z, k, pair)));
}

TestReport partial_sb_test(const TimeSeries& x1, const TimeSeries& x2,
                           const ControlPanel& z, long k,
                           const QuantilePair& pair, const SBConfig& cfg,
                           int threads) {
  long T = x1.size();
  SBConfig used = cfg;
  bool auto_gamma = !(cfg.gamma > 0.0);
  GammaChoice choice;
  if (auto_gamma) {
    choice = choose_gamma_detail(x1, x2);
    used.gamma = choice.gamma;
  }
  used.validate();

  double rho_hat = partial_cq(x1, x2, z, k, pair);

  // Panel of rows (x1_t, x2_{t-k}, z_t), t = k+1..T, stored column-wise.
  int l = z.dim();
  int dim = 2 + l;
  long n = T - k;
  std::vector<std::vector<double>> panel(static_cast<size_t>(dim),
                                         std::vector<double>(static_cast<size_t>(n)));
  std::vector<double> levels(static_cast<size_t>(dim));
  levels[0] = pair.a1.value();
  levels[1] = pair.a2.value();
  for (int i = 0; i < l; ++i) levels[2 + i] = z.beta[static_cast<size_t>(i)].value();
  for (long t = k; t < T; ++t) {
    panel[0][t - k] = x1[t];
    panel[1][t - k] = x2[t - k];
    for (int i = 0; i < l; ++i) panel[2 + i][t - k] = z.z[static_cast<size_t>(i)][t];
  }

  std::vector<double> rho_star(static_cast<size_t>(used.B), 0.0);
  std::vector<long> retries(static_cast<size_t>(used.B), 0);
  parallel_for(
      used.B,
      [&](long b) {
        std::vector<std::vector<double>> cols(
            static_cast<size_t>(dim), std::vector<double>(static_cast<size_t>(n)));
        for (int attempt = 0;; ++attempt) {
          if (attempt > 10) {
            throw SingularHitMatrixError("partial bootstrap replicate " +
                                         std::to_string(b) +
                                         " degenerate after 10 redraws");
          }
          Rng rng = Rng::substream(used.seed, static_cast<std::uint64_t>(b),
                                   static_cast<std::uint64_t>(attempt),
                                   kStreamPartialBoot);
          std::vector<long> idx = sb_resample_indices(n, used.gamma, rng);
          for (int d = 0; d < dim; ++d) {
            for (long i = 0; i < n; ++i) cols[d][i] = panel[d][idx[i]];
          }
          try {
            rho_star[b] = partial_from_columns(cols, levels);
          } catch (const SingularHitMatrixError&) {
            retries[b]++;
            continue;
          } catch (const ZeroDenominatorError&) {
            retries[b]++;
            continue;
          }
          break;
        }
      },
      threads);

  double root_t = std::sqrt(static_cast<double>(T));
  std::vector<double> draws(rho_star.size());
  for (size_t b = 0; b < rho_star.size(); ++b) {
    draws[b] = root_t * (rho_star[b] - rho_hat);
  }
  double c_lo = percentile(draws, used.tau / 2.0);
  double c_hi = percentile(draws, 1.0 - used.tau / 2.0);
  double lo = rho_hat + c_lo / root_t;
  double hi = rho_hat + c_hi / root_t;

  TestReport report;
  report.method = "sb";
  report.statistic_name = "partial_cq";
  report.statistic = rho_hat;
  report.critical_value = 0.0;  // decision is interval-based
  report.reject = lo > 0.0 || hi < 0.0;
  report.tau = used.tau;
  report.T = T;
  report.p = static_cast<int>(k);
  report.alpha1 = pair.a1.value();
  report.alpha2 = pair.a2.value();
  report.intervals.push_back({static_cast<int>(k), rho_hat, lo, hi});
  report.echo("gamma", std::to_string(used.gamma));
  report.echo("gamma_auto", auto_gamma ? "true" : "false");
  report.echo("B", std::to_string(used.B));
  report.echo("seed", std::to_string(used.seed));
  report.echo("decision", "two-sided percentile interval around zero");
  long total_retries = 0;
  for (long r : retries) total_retries += r;
  if (total_retries > 0) {
    report.warnings.push_back(std::to_string(total_retries) +
                              " degenerate bootstrap replicates redrawn");
  }
  return report;
}

namespace detail {

double scalar_self_normalizer(std::span<const double> rho_s, long s_min,
                              long T, double rho_full) {
  double t2 = static_cast<double>(T) * static_cast<double>(T);
  double a = 0.0;
  for (size_t i = 0; i < rho_s.size(); ++i) {
    if (std::isnan(rho_s[i])) continue;  // dropped subsample row
    double s = static_cast<double>(s_min + static_cast<long>(i));
    double dev = rho_s[i] - rho_full;
    a += s * s * dev * dev / t2;
  }
  if (!(a > 0.0)) {
    throw DegenerateNormalizerError(
        "recursive estimates constant in the subsample index; "
        "self-normalizer is zero");
  }
  return a;
}

double scalar_self_normalized_stat(std::span<const double> rho_s, long s_min,
                                   long T, double rho_full) {
  double a = scalar_self_normalizer(rho_s, s_min, T, rho_full);
  return std::sqrt(static_cast<double>(T)) * rho_full / std::sqrt(a);
}

}  // namespace detail

TestReport partial_sn_test(const TimeSeries& x1, const TimeSeries& x2,
                           const ControlPanel& z, long k,
                           const QuantilePair& pair, const SNConfig& cfg) {
  if (cfg.table == nullptr) {
    throw InvalidArgument("partial_sn_test: no critical-value table configured");
  }
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("partial_sn_test: series lengths differ");
  }
  z.validate(T);
  if (!(cfg.omega > 0.0 && cfg.omega < 1.0)) {
    throw InvalidArgument("partial_sn_test: omega must lie in (0,1)");
  }
  long s_min = trimmed_start(T, cfg.omega);
  if (s_min <= k + 2) {
    throw InvalidArgument(
        "partial_sn_test: ceil(T*omega) must exceed k + 2; increase omega or T");
  }
  // The scalar limit is the square root of the p = 1 omnibus quadratic form,
  // so the two-sided cutoff comes from the p = 1 table entry.
  const CriticalValueEntry& cv = cfg.table->find(1, cfg.omega, cfg.tau);
  double scalar_cv = std::sqrt(cv.value);

  int l = z.dim();
  int dim = 2 + l;
  std::vector<double> levels(static_cast<size_t>(dim));
  levels[0] = pair.a1.value();
  levels[1] = pair.a2.value();
  for (int i = 0; i < l; ++i) levels[2 + i] = z.beta[static_cast<size_t>(i)].value();

  std::vector<RecursiveQuantile> trackers;
  trackers.reserve(static_cast<size_t>(dim));
  trackers.emplace_back(pair.a1);
  trackers.emplace_back(pair.a2);
  for (int i = 0; i < l; ++i) trackers.emplace_back(z.beta[static_cast<size_t>(i)]);

  std::vector<double> rho_s(static_cast<size_t>(T - s_min + 1),
                            std::numeric_limits<double>::quiet_NaN());
  long dropped = 0;
  std::vector<double> q(static_cast<size_t>(dim));
  Eigen::MatrixXd r(dim, dim);
  Eigen::VectorXd h(dim);
  for (long s = 1; s <= T; ++s) {
    trackers[0].push(x1[s - 1]);
    trackers[1].push(x2[s - 1]);
    for (int i = 0; i < l; ++i) trackers[2 + i].push(z.z[static_cast<size_t>(i)][s - 1]);
    if (s < s_min) continue;
    for (int d = 0; d < dim; ++d) q[d] = trackers[d].value();
    r.setZero();
    for (long t = k; t < s; ++t) {
      h(0) = (x1[t] < q[0] ? 1.0 : 0.0) - levels[0];
      h(1) = (x2[t - k] < q[1] ? 1.0 : 0.0) - levels[1];
      for (int i = 0; i < l; ++i) {
        h(2 + i) = (z.z[static_cast<size_t>(i)][t] < q[2 + i] ? 1.0 : 0.0) -
                   levels[2 + i];
      }
      r.selfadjointView<Eigen::Lower>().rankUpdate(h);
    }
    Eigen::MatrixXd rs = r.selfadjointView<Eigen::Lower>();
    rs /= static_cast<double>(s);
    InverseResult inv = invert_spd(rs);
    if (!inv.ok) {
      if (s == T) {
        throw SingularHitMatrixError(
            "full-sample hit matrix singular (condition " +
            std::to_string(inv.condition) + ")");
      }
      dropped++;
      continue;
    }
    rho_s[s - s_min] = partial_from_inverse(inv.inverse);
  }

  double rho_full = rho_s.back();
  double normalizer = detail::scalar_self_normalizer(rho_s, s_min, T, rho_full);
  double stat =
      std::sqrt(static_cast<double>(T)) * rho_full / std::sqrt(normalizer);
  // |stat| > cv is equivalent to rho_full lying outside a band of halfwidth
  // cv * sqrt(A) / sqrt(T) around zero; report the band around the estimate.
  double halfwidth = scalar_cv * std::sqrt(normalizer) /
                     std::sqrt(static_cast<double>(T));

  TestReport report;
  report.method = "sn";
  report.statistic_name = "partial_self_normalized";
  report.statistic = stat;
  report.critical_value = scalar_cv;
  report.reject = std::abs(stat) > scalar_cv;
  report.tau = cfg.tau;
  report.T = T;
  report.p = static_cast<int>(k);
  report.alpha1 = pair.a1.value();
  report.alpha2 = pair.a2.value();
  report.intervals.push_back({static_cast<int>(k), rho_full,
                              rho_full - halfwidth, rho_full + halfwidth});
  report.echo("omega", std::to_string(cfg.omega));
  report.echo("partial_cq", std::to_string(rho_full));
  report.echo("table_n_grid", std::to_string(cv.n_grid));
  report.echo("table_n_rep", std::to_string(cv.n_rep));
  report.echo("table_seed", std::to_string(cv.seed));
  if (dropped > 0) {
    report.warnings.push_back(std::to_string(dropped) +
                              " degenerate subsample rows dropped");
  }
  return report;
}

}  // namespace xqgram
