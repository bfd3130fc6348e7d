#include "xqgram/quantile.hpp"

#include <algorithm>

namespace xqgram {

double empirical_quantile(std::span<const double> x, QuantileLevel a) {
  if (x.empty()) {
    throw InvalidArgument("empirical_quantile: empty series");
  }
  long n = static_cast<long>(x.size());
  long m = quantile_rank(n, a.value());
  std::vector<double> scratch(x.begin(), x.end());
  auto nth = scratch.begin() + (m - 1);
  std::nth_element(scratch.begin(), nth, scratch.end());
  return *nth;
}

void RecursiveQuantile::push(double x) {
  ++n_;
  long m = quantile_rank(n_, a_);
  if (lower_.empty() || x <= *lower_.rbegin()) {
    lower_.insert(x);
  } else {
    upper_.insert(x);
  }
  // m grows by at most one per push, so each loop runs at most once.
  while (static_cast<long>(lower_.size()) > m) {
    auto it = std::prev(lower_.end());
    upper_.insert(*it);
    lower_.erase(it);
  }
  while (static_cast<long>(lower_.size()) < m) {
    auto it = upper_.begin();
    lower_.insert(*it);
    upper_.erase(it);
  }
}

double RecursiveQuantile::value() const {
  if (lower_.empty()) {
    throw InvalidArgument("RecursiveQuantile: no observations");
  }
  return *lower_.rbegin();
}

std::vector<double> recursive_quantiles(const TimeSeries& x, QuantileLevel a,
                                        double omega) {
  if (!(omega > 0.0 && omega < 1.0)) {
    throw InvalidArgument("recursive_quantiles: omega must lie in (0,1)");
  }
  long T = x.size();
  long s_min = trimmed_start(T, omega);
  if (s_min < 2) {
    throw InvalidArgument(
        "recursive_quantiles: ceil(T*omega) must be at least 2");
  }
  RecursiveQuantile rq(a);
  std::vector<double> out;
  out.reserve(static_cast<size_t>(T - s_min + 1));
  for (long s = 1; s <= T; ++s) {
    rq.push(x[s - 1]);
    if (s >= s_min) out.push_back(rq.value());
  }
  return out;
}

}  // namespace xqgram
