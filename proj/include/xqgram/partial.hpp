#pragma once

#include <optional>
#include <span>
#include <vector>

#include "xqgram/bootstrap.hpp"
#include "xqgram/report.hpp"
#include "xqgram/selfnorm.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

// Control series aligned with x1 at time t, each with its own hit quantile
// level beta_i.
struct ControlPanel {
  std::vector<TimeSeries> z;
  std::vector<QuantileLevel> beta;

  int dim() const { return static_cast<int>(z.size()); }
  void validate(long T) const {
    if (z.empty()) throw InvalidArgument("ControlPanel: need l >= 1 controls");
    if (beta.size() != z.size()) {
      throw InvalidArgument("ControlPanel: one beta level per control");
    }
    for (const TimeSeries& s : z) {
      if (s.size() != T) {
        throw InvalidArgument("ControlPanel: control length differs from x1");
      }
    }
  }
};

// Hit-score vectors [psi_a1(x1_t - q1), psi_a2(x2_{t-k} - q2),
// Psi_beta(z_t - q_z)] for t = k+1..T, all at full-sample quantiles.
// Stored row-major with dim = 2 + l.
struct HitPanel {
  std::vector<double> data;  // (T-k) x dim, row-major
  int dim = 0;
  long T = 0;
  long k = 0;

  long rows() const { return dim == 0 ? 0 : static_cast<long>(data.size()) / dim; }
  const double* row(long t) const { return data.data() + t * dim; }
};

HitPanel hit_vectors(const TimeSeries& x1, const TimeSeries& x2,
                     const ControlPanel& z, long k, const QuantilePair& pair);

// Second-moment matrix of the hit vectors with the 1/T normalization
// (divisor T even though the sum has T-k terms), and its inverse when the
// condition number allows one.
struct HitMatrix {
  SquareMatrix r_hat{1};
  std::optional<SquareMatrix> p_hat;
  double condition = 0.0;
};

HitMatrix hit_correlation(const HitPanel& hits);

// Partial cross-quantilogram from an already-formed hit matrix:
// -P[0,1] / sqrt(P[0,0] * P[1,1]). Raises SingularHitMatrixError if the
// inverse is unavailable.
double partial_from_hit_matrix(const HitMatrix& m);

// Sample partial cross-quantilogram of (x1_t, x2_{t-k}) given the control
// hits.
double partial_cq(const TimeSeries& x1, const TimeSeries& x2,
                  const ControlPanel& z, long k, const QuantilePair& pair);

// Stationary-bootstrap test of zero partial cross-quantilogram at lag k:
// resamples rows (x1_t, x2_{t-k}, z_t), re-estimates every quantile on the
// resample, and forms the equal-tailed percentile interval.
TestReport partial_sb_test(const TimeSeries& x1, const TimeSeries& x2,
                           const ControlPanel& z, long k,
                           const QuantilePair& pair, const SBConfig& cfg,
                           int threads = 0);

// Self-normalized test: recursive subsample partial cross-quantilograms
// (subsample quantiles for every component including controls), scalar
// normalizer T^-2 sum s^2 (rho_s - rho_T)^2, statistic sqrt(T) rho_T /
// sqrt(A), compared two-sided against the simulated scalar limit (the
// square root of the p = 1 omnibus critical value).
TestReport partial_sn_test(const TimeSeries& x1, const TimeSeries& x2,
                           const ControlPanel& z, long k,
                           const QuantilePair& pair, const SNConfig& cfg);

namespace detail {

// Scalar self-normalizer T^-2 sum s^2 (rho_s - rho_full)^2 over the non-NaN
// entries; raises DegenerateNormalizerError when it is zero. Exposed for
// direct testing of the degenerate branch.
double scalar_self_normalizer(std::span<const double> rho_s, long s_min,
                              long T, double rho_full);

// sqrt(T) * rho_full / sqrt(normalizer).
double scalar_self_normalized_stat(std::span<const double> rho_s, long s_min,
                                   long T, double rho_full);

}  // namespace detail

}  // namespace xqgram
