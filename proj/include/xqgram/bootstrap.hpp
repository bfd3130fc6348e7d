#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "xqgram/cqgram.hpp"
#include "xqgram/report.hpp"
#include "xqgram/rng.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

// Stationary-bootstrap configuration. Blocks have iid geometric lengths
// with mean 1/gamma; B replicates; tau is the test significance level.
struct SBConfig {
  double gamma = 0.0;  // <= 0 means: choose automatically
  int B = 1000;
  std::uint64_t seed = 0;
  double tau = 0.05;

  void validate() const {
    if (!(gamma > 0.0 && gamma < 1.0)) {
      throw InvalidArgument("SBConfig: gamma must lie in (0,1)");
    }
    if (B < 1) throw InvalidArgument("SBConfig: B must be positive");
    if (!(tau > 0.0 && tau < 1.0)) {
      throw InvalidArgument("SBConfig: tau must lie in (0,1)");
    }
  }
};

// Lag-aligned observation tuples: row t holds (x1_t, x2_{t-1}, ..,
// x2_{t-p}) for t = p+1..T, stored column-wise. Resampling whole rows keeps
// all p lag alignments coherent within one resample.
struct AlignedPanel {
  std::vector<double> x1;                    // length T - p
  std::vector<std::vector<double>> x2_lag;   // x2_lag[k-1][i] = x2_{t-k}

  long rows() const { return static_cast<long>(x1.size()); }
  int lags() const { return static_cast<int>(x2_lag.size()); }
};

AlignedPanel make_aligned_panel(const TimeSeries& x1, const TimeSeries& x2,
                                int p);

// Geometric block lengths drawn until their sum first reaches
// needed_total. Deterministic given the stream state.
std::vector<long> sb_block_lengths(Rng& rng, long needed_total, double gamma);

// One stationary-bootstrap resample of the panel: uniform block starts,
// geometric block lengths, circular row reads, truncated at rows() rows.
AlignedPanel sb_resample(const AlignedPanel& panel, double gamma, Rng& rng);

// Row indices of one resample (the cheap core of sb_resample; both the
// plain and partial bootstrap gather their columns through this).
std::vector<long> sb_resample_indices(long rows, double gamma, Rng& rng);

struct GammaChoice {
  double gamma = 0.0;
  double block_length_1 = 0.0;  // automatic expected block length, series 1
  double block_length_2 = 0.0;
  bool fallback = false;        // true if the spectral estimate degenerated
};

// Automatic gamma: the flat-top lag-window optimal expected block length of
// Politis-White (with the Patton et al. correction) applied to each series,
// gamma_i = 1/b_i, averaged, clamped to [1/T, 0.5]. Falls back to
// 1/ceil(T^(1/3)) if the estimate degenerates.
GammaChoice choose_gamma_detail(const TimeSeries& x1, const TimeSeries& x2);
double choose_gamma(const TimeSeries& x1, const TimeSeries& x2);

// Optimal stationary-bootstrap expected block length for one series
// (exposed for tests of the selection rule).
double politis_white_block_length(std::span<const double> x);

// B replicate draws of the bootstrap cross-quantilogram vector and the
// derived portmanteau deviations.
struct BootstrapDistribution {
  std::vector<std::vector<double>> rho_star;  // B x p
  std::vector<double> q_star;                 // B
  SBConfig config;
  StatVariant variant = StatVariant::BoxLjung;
  long T = 0;
  int p = 0;
  long total_retries = 0;  // degenerate replicates redrawn (diagnostic)
};

// Runs B stationary-bootstrap replicates: resample the panel, re-estimate
// both quantiles on the resample, recompute rho*(k) for k = 1..p, and form
// the portmanteau deviation Q* from (rho* - rho_hat) with the chosen
// variant's lag weights. Replicate b depends only on (seed, b); replicates
// run in parallel and are stored by index. threads = 1 forces a serial run
// (used when the caller is itself parallel).
BootstrapDistribution bootstrap_distribution(const TimeSeries& x1,
                                             const TimeSeries& x2, int p,
                                             const QuantilePair& pair,
                                             const SBConfig& cfg,
                                             StatVariant variant =
                                                 StatVariant::BoxLjung,
                                             int threads = 0);

struct ConfidenceInterval {
  int k = 0;
  double lo = 0.0;
  double hi = 0.0;
};

// Equal-tailed percentile interval per lag: percentiles (tau/2, 1-tau/2) of
// sqrt(T)(rho*_b(k) - rho_hat(k)) mapped back around rho_hat(k).
std::vector<ConfidenceInterval> bootstrap_ci(const BootstrapDistribution& dist,
                                             const CQResult& rho_hat,
                                             double tau);

// inf{c : #(draws <= c)/B >= 1-tau}, i.e. the ceil((1-tau)B)-th order
// statistic of the draws.
double bootstrap_critical_value(std::span<const double> draws, double tau);

// Convenience order-statistic percentile with the same convention.
double percentile(std::span<const double> draws, double level);

// Full stationary-bootstrap portmanteau test for one quantile pair:
// statistic, bootstrap critical value, reject flag, and the per-lag
// confidence band.
TestReport sb_test(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair, const SBConfig& cfg,
                   StatVariant variant = StatVariant::BoxLjung,
                   int threads = 0);

}  // namespace xqgram
