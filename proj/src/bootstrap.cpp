#include "xqgram/bootstrap.hpp"

#include <algorithm>
#include <cmath>

#include "xqgram/parallel.hpp"

namespace xqgram {

namespace {

// Stream context tags keep substreams from different call sites apart.
constexpr std::uint64_t kStreamBootstrap = 0x53425f424f4f54ULL;  // "SB_BOOT"

// Flat-top lag window of Politis-Romano: 1 on [0, 1/2], linear down to 0 at 1.
double flat_top(double s) {
  double a = std::abs(s);
  if (a <= 0.5) return 1.0;
  if (a <= 1.0) return 2.0 * (1.0 - a);
  return 0.0;
}

std::vector<double> autocovariances(std::span<const double> x, long max_lag) {
  long n = static_cast<long>(x.size());
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(n);
  std::vector<double> r(static_cast<size_t>(max_lag) + 1, 0.0);
  for (long k = 0; k <= max_lag; ++k) {
    double acc = 0.0;
    for (long t = 0; t + k < n; ++t) {
      acc += (x[t] - mean) * (x[t + k] - mean);
    }
    r[k] = acc / static_cast<double>(n);
  }
  return r;
}

// rho*(k) for k = 1..p on one resample, with quantiles re-estimated from
// the resampled columns.
std::vector<double> panel_rho(const AlignedPanel& panel,
                              const QuantilePair& pair,
                              const std::vector<long>& idx) {
  long n = panel.rows();
  int p = panel.lags();
  std::vector<double> col(static_cast<size_t>(n));
  std::vector<char> h1(static_cast<size_t>(n));

  for (long i = 0; i < n; ++i) col[i] = panel.x1[idx[i]];
  double q1 = empirical_quantile(std::span<const double>(col), pair.a1);
  long c1 = 0;
  for (long i = 0; i < n; ++i) {
    h1[i] = col[i] < q1;
    c1 += h1[i];
  }

  std::vector<double> rho(static_cast<size_t>(p));
  for (int k = 1; k <= p; ++k) {
    const std::vector<double>& source = panel.x2_lag[static_cast<size_t>(k - 1)];
    for (long i = 0; i < n; ++i) col[i] = source[idx[i]];
    double q2 = empirical_quantile(std::span<const double>(col), pair.a2);
    long c2 = 0, c11 = 0;
    for (long i = 0; i < n; ++i) {
      bool h2 = col[i] < q2;
      c2 += h2;
      c11 += h2 && h1[i];
    }
    rho[static_cast<size_t>(k - 1)] = detail::rho_from_hit_counts(
        c11, c1, c2, n, pair.a1.value(), pair.a2.value(), k);
  }
  return rho;
}

}  // namespace

AlignedPanel make_aligned_panel(const TimeSeries& x1, const TimeSeries& x2,
                                int p) {
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("make_aligned_panel: series lengths differ");
  }
  if (p < 1 || p > T - 2) {
    throw InvalidArgument("make_aligned_panel: need 1 <= p <= T-2");
  }
  AlignedPanel panel;
  long n = T - p;
  panel.x1.resize(static_cast<size_t>(n));
  panel.x2_lag.assign(static_cast<size_t>(p),
                      std::vector<double>(static_cast<size_t>(n)));
  for (long i = 0; i < n; ++i) {
    long t = p + i;  // 0-based time index of row i
    panel.x1[i] = x1[t];
    for (int k = 1; k <= p; ++k) {
      panel.x2_lag[static_cast<size_t>(k - 1)][i] = x2[t - k];
    }
  }
  return panel;
}

std::vector<long> sb_block_lengths(Rng& rng, long needed_total, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw InvalidArgument("sb_block_lengths: gamma must lie in (0,1)");
  }
  std::vector<long> lengths;
  long total = 0;
  while (total < needed_total) {
    long l = rng.geometric(gamma);
    lengths.push_back(l);
    total += l;
  }
  return lengths;
}

std::vector<long> sb_resample_indices(long rows, double gamma, Rng& rng) {
  if (rows < 1) throw InvalidArgument("sb_resample_indices: empty panel");
  std::vector<long> idx(static_cast<size_t>(rows));
  long filled = 0;
  while (filled < rows) {
    long start = rng.uniform_int(0, rows - 1);
    long len = rng.geometric(gamma);
    for (long j = 0; j < len && filled < rows; ++j) {
      idx[filled++] = (start + j) % rows;  // circular read past the end
    }
  }
  return idx;
}

AlignedPanel sb_resample(const AlignedPanel& panel, double gamma, Rng& rng) {
  std::vector<long> idx = sb_resample_indices(panel.rows(), gamma, rng);
  AlignedPanel out;
  long n = panel.rows();
  out.x1.resize(static_cast<size_t>(n));
  out.x2_lag.assign(panel.x2_lag.size(),
                    std::vector<double>(static_cast<size_t>(n)));
  for (long i = 0; i < n; ++i) {
    out.x1[i] = panel.x1[idx[i]];
    for (size_t k = 0; k < panel.x2_lag.size(); ++k) {
      out.x2_lag[k][i] = panel.x2_lag[k][idx[i]];
    }
  }
  return out;
}

double politis_white_block_length(std::span<const double> x) {
  long n = static_cast<long>(x.size());
  if (n < 20) return 0.0;

  long kn = std::max<long>(5, static_cast<long>(std::ceil(std::log10(
                                  static_cast<double>(n)))));
  long mmax =
      static_cast<long>(std::ceil(std::sqrt(static_cast<double>(n)))) + kn;
  mmax = std::min(mmax, n - 1);
  double bmax = std::ceil(std::min(3.0 * std::sqrt(static_cast<double>(n)),
                                   static_cast<double>(n) / 3.0));

  std::vector<double> r = autocovariances(x, mmax);
  if (!(r[0] > 0.0)) return 0.0;

  // Smallest lag after which a full window of Kn autocorrelations is
  // insignificant; if none, the largest significant lag.
  double crit = 1.959964 * std::sqrt(std::log10(static_cast<double>(n)) /
                                     static_cast<double>(n));
  long m_hat = -1;
  for (long j = 1; j + kn - 1 <= mmax; ++j) {
    bool all_small = true;
    for (long i = 0; i < kn; ++i) {
      if (std::abs(r[j + i] / r[0]) >= crit) {
        all_small = false;
        break;
      }
    }
    if (all_small) {
      m_hat = j;
      break;
    }
  }
  if (m_hat < 0) {
    long last_sig = 0;
    for (long k = 1; k <= mmax; ++k) {
      if (std::abs(r[k] / r[0]) >= crit) last_sig = k;
    }
    m_hat = last_sig > 0 ? last_sig : 1;
  }
  long window = std::min(2 * m_hat, mmax);

  double g_spectral = r[0];
  double g_derivative = 0.0;
  for (long k = 1; k <= window; ++k) {
    double lam = flat_top(static_cast<double>(k) / static_cast<double>(window));
    g_spectral += 2.0 * lam * r[k];
    g_derivative += 2.0 * lam * static_cast<double>(k) * r[k];
  }
  double d_sb = 2.0 * g_spectral * g_spectral;
  if (!(d_sb > 0.0) || !std::isfinite(g_derivative)) return 0.0;

  double b = std::cbrt(2.0 * g_derivative * g_derivative / d_sb) *
             std::cbrt(static_cast<double>(n));
  if (!std::isfinite(b)) return 0.0;
  return std::clamp(b, 1.0, bmax);
}

GammaChoice choose_gamma_detail(const TimeSeries& x1, const TimeSeries& x2) {
  long T = x1.size();
  if (T < 20 || x2.size() < 20) {
    throw InvalidArgument("choose_gamma: both series need length >= 20");
  }
  GammaChoice out;
  out.block_length_1 = politis_white_block_length(x1.span());
  out.block_length_2 = politis_white_block_length(x2.span());
  double gamma;
  if (out.block_length_1 > 0.0 && out.block_length_2 > 0.0) {
    gamma = 0.5 * (1.0 / out.block_length_1 + 1.0 / out.block_length_2);
  } else {
    gamma = 1.0 / std::ceil(std::cbrt(static_cast<double>(T)));
    out.fallback = true;
  }
  out.gamma = std::clamp(gamma, 1.0 / static_cast<double>(T), 0.5);
  return out;
}

double choose_gamma(const TimeSeries& x1, const TimeSeries& x2) {
  return choose_gamma_detail(x1, x2).gamma;
}

BootstrapDistribution bootstrap_distribution(const TimeSeries& x1,
                                             const TimeSeries& x2, int p,
                                             const QuantilePair& pair,
                                             const SBConfig& cfg,
                                             StatVariant variant,
                                             int threads) {
  cfg.validate();
  long T = x1.size();
  AlignedPanel panel = make_aligned_panel(x1, x2, p);
  CQResult rho_hat = cq_vector(x1, x2, p, pair);

  BootstrapDistribution dist;
  dist.config = cfg;
  dist.variant = variant;
  dist.T = T;
  dist.p = p;
  dist.rho_star.assign(static_cast<size_t>(cfg.B),
                       std::vector<double>(static_cast<size_t>(p)));
  dist.q_star.assign(static_cast<size_t>(cfg.B), 0.0);
  std::vector<long> retries(static_cast<size_t>(cfg.B), 0);

  parallel_for(
      cfg.B,
      [&](long b) {
        for (int attempt = 0;; ++attempt) {
          if (attempt > 10) {
            throw ZeroDenominatorError(
                0, "bootstrap replicate " + std::to_string(b) +
                       " degenerate after 10 redraws");
          }
          Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(b),
                                   static_cast<std::uint64_t>(attempt),
                                   kStreamBootstrap);
          std::vector<long> idx =
              sb_resample_indices(panel.rows(), cfg.gamma, rng);
          try {
            dist.rho_star[b] = panel_rho(panel, pair, idx);
          } catch (const ZeroDenominatorError&) {
            retries[b]++;
            continue;
          }
          break;
        }
        double q = 0.0;
        for (int k = 1; k <= p; ++k) {
          double d = dist.rho_star[b][static_cast<size_t>(k - 1)] -
                     rho_hat.at(k);
          double w = variant == StatVariant::BoxPierce
                         ? static_cast<double>(T)
                         : static_cast<double>(T) * (static_cast<double>(T) + 2.0) /
                               (static_cast<double>(T) - static_cast<double>(k));
          q += w * d * d;
        }
        dist.q_star[b] = q;
      },
      threads);

  for (long r : retries) dist.total_retries += r;
  return dist;
}

double percentile(std::span<const double> draws, double level) {
  if (draws.empty()) throw InvalidArgument("percentile: no draws");
  std::vector<double> sorted(draws.begin(), draws.end());
  std::sort(sorted.begin(), sorted.end());
  long B = static_cast<long>(sorted.size());
  long rank = static_cast<long>(std::ceil(level * static_cast<double>(B)));
  rank = std::clamp(rank, 1L, B);
  return sorted[rank - 1];
}

std::vector<ConfidenceInterval> bootstrap_ci(const BootstrapDistribution& dist,
                                             const CQResult& rho_hat,
                                             double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("bootstrap_ci: tau must lie in (0,1)");
  }
  long B = static_cast<long>(dist.rho_star.size());
  if (static_cast<double>(B) < 2.0 / tau) {
    throw InvalidArgument(
        "bootstrap_ci: too few replicates for the requested tau");
  }
  if (rho_hat.p != dist.p || rho_hat.T != dist.T) {
    throw InvalidArgument("bootstrap_ci: distribution/estimate mismatch");
  }
  double root_t = std::sqrt(static_cast<double>(dist.T));
  std::vector<ConfidenceInterval> out(static_cast<size_t>(dist.p));
  std::vector<double> draws(static_cast<size_t>(B));
  for (int k = 1; k <= dist.p; ++k) {
    for (long b = 0; b < B; ++b) {
      draws[b] = root_t * (dist.rho_star[b][static_cast<size_t>(k - 1)] -
                           rho_hat.at(k));
    }
    double c_lo = percentile(draws, tau / 2.0);
    double c_hi = percentile(draws, 1.0 - tau / 2.0);
    out[static_cast<size_t>(k - 1)] = {k, rho_hat.at(k) + c_lo / root_t,
                                       rho_hat.at(k) + c_hi / root_t};
  }
  return out;
}

double bootstrap_critical_value(std::span<const double> draws, double tau) {
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("bootstrap_critical_value: tau must lie in (0,1)");
  }
  if (static_cast<double>(draws.size()) < 1.0 / tau) {
    throw InvalidArgument(
        "bootstrap_critical_value: need at least 1/tau draws");
  }
  return percentile(draws, 1.0 - tau);
}

TestReport sb_test(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair, const SBConfig& cfg,
                   StatVariant variant, int threads) {
  SBConfig used = cfg;
  bool auto_gamma = !(cfg.gamma > 0.0);
  GammaChoice choice;
  if (auto_gamma) {
    choice = choose_gamma_detail(x1, x2);
    used.gamma = choice.gamma;
  }

  CQResult rho_hat = cq_vector(x1, x2, p, pair);
  BootstrapDistribution dist =
      bootstrap_distribution(x1, x2, p, pair, used, variant, threads);

  TestReport report;
  report.method = "sb";
  report.statistic_name =
      variant == StatVariant::BoxPierce ? "q_box_pierce" : "q_box_ljung";
  report.statistic = q_statistic(rho_hat, variant);
  report.critical_value = bootstrap_critical_value(dist.q_star, used.tau);
  report.reject = report.statistic > report.critical_value;
  report.tau = used.tau;
  report.T = x1.size();
  report.p = p;
  report.alpha1 = pair.a1.value();
  report.alpha2 = pair.a2.value();
  for (const ConfidenceInterval& ci : bootstrap_ci(dist, rho_hat, used.tau)) {
    report.intervals.push_back({ci.k, rho_hat.at(ci.k), ci.lo, ci.hi});
  }
  report.echo("gamma", std::to_string(used.gamma));
  report.echo("gamma_auto", auto_gamma ? "true" : "false");
  if (auto_gamma && choice.fallback) {
    report.warnings.push_back(
        "automatic block length degenerated; fell back to 1/ceil(T^(1/3))");
  }
  report.echo("B", std::to_string(used.B));
  report.echo("seed", std::to_string(used.seed));
  if (dist.total_retries > 0) {
    report.warnings.push_back(std::to_string(dist.total_retries) +
                              " degenerate bootstrap replicates redrawn");
  }
  return report;
}

}  // namespace xqgram
