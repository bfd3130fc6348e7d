#pragma once

#include <string>
#include <vector>

#include "xqgram/quantile.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

// Portmanteau statistic flavor.
enum class StatVariant { BoxPierce, BoxLjung };

// Sample cross-quantilogram values for one quantile pair over lags 1..p,
// plus the hit counts behind them (per-lag window counts of marginal and
// joint hits).
struct CQResult {
  QuantilePair pair{0.5, 0.5};
  long T = 0;
  int p = 0;
  std::vector<double> rho;   // rho[k-1] = value at lag k
  std::vector<long> hits1;   // #{t in window : x1_t below its quantile}
  std::vector<long> hits2;   // #{t in window : x2_{t-k} below its quantile}
  std::vector<long> joint_hits;

  double at(int k) const { return rho[static_cast<size_t>(k - 1)]; }
};

// Sample cross-quantilogram at lag k: the hit-process correlation of
// x1_t against x2_{t-k}, with full-sample quantiles and all sums running
// over t = k+1..T. Requires equal lengths and 0 <= k <= T-2.
double cross_quantilogram(const TimeSeries& x1, const TimeSeries& x2, long k,
                          const QuantilePair& pair);

// Cross-quantilograms for all lags k = 1..p. Quantiles are estimated once
// from the full sample; hit sequences are cached across lags.
CQResult cq_vector(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair);

// Box-Pierce portmanteau: T * sum_k rho(k)^2.
double q_box_pierce(const CQResult& rho);

// Box-Ljung portmanteau: T(T+2) * sum_k rho(k)^2 / (T-k). Dominates the
// Box-Pierce value whenever some rho(k) is nonzero.
double q_box_ljung(const CQResult& rho);

double q_statistic(const CQResult& rho, StatVariant variant);

struct SupQResult {
  double value = 0.0;
  QuantilePair argmax{0.5, 0.5};
  // Pairs skipped because of a degenerate denominator, with the reason.
  std::vector<std::string> warnings;
};

// Maximum of the chosen portmanteau statistic over a quantile grid, with
// the pair attaining it (ties broken by grid order). Degenerate pairs are
// excluded with a warning; raises if every pair is excluded.
SupQResult sup_q(const TimeSeries& x1, const TimeSeries& x2, int p,
                 const QuantileGrid& grid, StatVariant variant);

namespace detail {

// Hit-count form of the correlation ratio. With C1 = #{marginal hits of
// series 1}, C2 = likewise for series 2, C11 = #{joint hits}, and n window
// observations:
//   numerator   = C11 - a1*C2 - a2*C1 + n*a1*a2
//   denominator = sqrt(C1(1-a1)^2 + (n-C1)a1^2) * sqrt(...)
// which is exactly sum psi1 psi2 / sqrt(sum psi1^2) sqrt(sum psi2^2) but
// with integer accumulation, so the result is independent of summation
// order.
double rho_from_hit_counts(long c11, long c1, long c2, long n, double a1,
                           double a2, int lag);

}  // namespace detail

}  // namespace xqgram
