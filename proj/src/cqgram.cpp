#include "xqgram/cqgram.hpp"

#include <cmath>

namespace xqgram {

namespace detail {

double rho_from_hit_counts(long c11, long c1, long c2, long n, double a1,
                           double a2, int lag) {
  // Four-cell decomposition with exact integer counts. When the two hit
  // sequences coincide (identical series, lag 0, equal levels) the numerator
  // reduces to the same expression tree as the denominator, so the
  // correlation is exactly one.
  long both = c11;
  long only1 = c1 - c11;
  long only2 = c2 - c11;
  long neither = n - c1 - c2 + c11;
  double num = static_cast<double>(both) * ((1.0 - a1) * (1.0 - a2)) -
               static_cast<double>(only1) * ((1.0 - a1) * a2) -
               static_cast<double>(only2) * (a1 * (1.0 - a2)) +
               static_cast<double>(neither) * (a1 * a2);
  double d1 = static_cast<double>(c1) * ((1.0 - a1) * (1.0 - a1)) +
              static_cast<double>(n - c1) * (a1 * a1);
  double d2 = static_cast<double>(c2) * ((1.0 - a2) * (1.0 - a2)) +
              static_cast<double>(n - c2) * (a2 * a2);
  if (!(d1 > 0.0) || !(d2 > 0.0)) {
    throw ZeroDenominatorError(
        lag, "cross-quantilogram: zero marginal hit sum of squares at lag " +
                 std::to_string(lag));
  }
  double rho = d1 == d2 ? num / d1 : num / (std::sqrt(d1) * std::sqrt(d2));
  // Cauchy-Schwarz bounds the exact value by 1; rounding can overshoot by
  // an ulp at the boundary.
  if (rho > 1.0) rho = 1.0;
  if (rho < -1.0) rho = -1.0;
  return rho;
}

}  // namespace detail

double cross_quantilogram(const TimeSeries& x1, const TimeSeries& x2, long k,
                          const QuantilePair& pair) {
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("cross_quantilogram: series lengths differ");
  }
  if (k < 0 || k > T - 2) {
    throw InvalidArgument("cross_quantilogram: lag must satisfy 0 <= k <= T-2");
  }
  double q1 = empirical_quantile(x1, pair.a1);
  double q2 = empirical_quantile(x2, pair.a2);
  long c1 = 0, c2 = 0, c11 = 0;
  for (long t = k; t < T; ++t) {
    bool h1 = x1[t] < q1;
    bool h2 = x2[t - k] < q2;
    c1 += h1;
    c2 += h2;
    c11 += h1 && h2;
  }
  return detail::rho_from_hit_counts(c11, c1, c2, T - k, pair.a1.value(),
                                     pair.a2.value(), static_cast<int>(k));
}

CQResult cq_vector(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair) {
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("cq_vector: series lengths differ");
  }
  if (p < 1 || p > T - 2) {
    throw InvalidArgument("cq_vector: need 1 <= p <= T-2");
  }
  double q1 = empirical_quantile(x1, pair.a1);
  double q2 = empirical_quantile(x2, pair.a2);
  std::vector<char> h1(static_cast<size_t>(T)), h2(static_cast<size_t>(T));
  for (long t = 0; t < T; ++t) {
    h1[t] = x1[t] < q1;
    h2[t] = x2[t] < q2;
  }

  CQResult out{pair, T, p, {}, {}, {}, {}};
  out.rho.reserve(p);
  out.hits1.reserve(p);
  out.hits2.reserve(p);
  out.joint_hits.reserve(p);
  for (int k = 1; k <= p; ++k) {
    long c1 = 0, c2 = 0, c11 = 0;
    for (long t = k; t < T; ++t) {
      c1 += h1[t];
      c2 += h2[t - k];
      c11 += h1[t] && h2[t - k];
    }
    out.rho.push_back(detail::rho_from_hit_counts(
        c11, c1, c2, T - k, pair.a1.value(), pair.a2.value(), k));
    out.hits1.push_back(c1);
    out.hits2.push_back(c2);
    out.joint_hits.push_back(c11);
  }
  return out;
}

double q_box_pierce(const CQResult& rho) {
  double sum = 0.0;
  for (double r : rho.rho) sum += r * r;
  return static_cast<double>(rho.T) * sum;
}

double q_box_ljung(const CQResult& rho) {
  double T = static_cast<double>(rho.T);
  double sum = 0.0;
  for (int k = 1; k <= rho.p; ++k) {
    double r = rho.at(k);
    sum += r * r / (T - static_cast<double>(k));
  }
  return T * (T + 2.0) * sum;
}

double q_statistic(const CQResult& rho, StatVariant variant) {
  return variant == StatVariant::BoxPierce ? q_box_pierce(rho)
                                           : q_box_ljung(rho);
}

SupQResult sup_q(const TimeSeries& x1, const TimeSeries& x2, int p,
                 const QuantileGrid& grid, StatVariant variant) {
  SupQResult out;
  bool have = false;
  for (const QuantilePair& pair : grid.pairs()) {
    double q;
    try {
      q = q_statistic(cq_vector(x1, x2, p, pair), variant);
    } catch (const ZeroDenominatorError& e) {
      out.warnings.push_back("pair (" + std::to_string(pair.a1.value()) + "," +
                             std::to_string(pair.a2.value()) +
                             ") excluded: " + e.what());
      continue;
    }
    if (!have || q > out.value) {
      out.value = q;
      out.argmax = pair;
      have = true;
    }
  }
  if (!have) {
    throw ZeroDenominatorError(
        0, "sup_q: every grid pair had a degenerate denominator");
  }
  return out;
}

}  // namespace xqgram
