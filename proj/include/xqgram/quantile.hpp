#pragma once

#include <set>
#include <span>
#include <vector>

#include "xqgram/types.hpp"

namespace xqgram {

// Check loss pi_a(u) = u * (a - 1[u < 0]). Nonnegative for every u.
inline double check_loss(double u, QuantileLevel a) {
  return u * (a.value() - (u < 0.0 ? 1.0 : 0.0));
}

// Quantile-hit score psi_a(u) = 1[u < 0] - a. The indicator is strict, so
// psi_a(0) = -a: an observation equal to its own sample quantile is a
// non-hit.
inline double psi(double u, QuantileLevel a) {
  return (u < 0.0 ? 1.0 : 0.0) - a.value();
}

// Unconditional empirical quantile: the smallest minimizer of
// sum_t pi_a(x_t - v). Equals the order statistic of rank quantile_rank(),
// i.e. the left endpoint when the minimizer is an interval. No
// interpolation, which keeps monotone-transform equivariance exact.
double empirical_quantile(std::span<const double> x, QuantileLevel a);

inline double empirical_quantile(const TimeSeries& x, QuantileLevel a) {
  return empirical_quantile(x.span(), a);
}

// Incremental order-statistic tracker: push observations one at a time and
// read the current a-quantile in amortized O(log n). Backs the recursive
// subsample pass.
class RecursiveQuantile {
 public:
  explicit RecursiveQuantile(QuantileLevel a) : a_(a.value()) {}

  void push(double x);
  long count() const { return n_; }
  // Current empirical quantile; requires at least one observation.
  double value() const;

 private:
  double a_;
  long n_ = 0;
  // lower_ holds the m smallest observations, m = quantile_rank(n_, a_);
  // the quantile is max(lower_).
  std::multiset<double> lower_;
  std::multiset<double> upper_;
};

// Quantiles of the growing prefixes x[1..s] for s = trimmed_start(T, omega)
// .. T. The last element is the full-sample quantile.
std::vector<double> recursive_quantiles(const TimeSeries& x, QuantileLevel a,
                                        double omega);

}  // namespace xqgram
