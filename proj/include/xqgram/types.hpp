#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "xqgram/errors.hpp"

namespace xqgram {

// A finite-valued observation sequence. Validates on construction: every
// value finite, length at least two.
class TimeSeries {
 public:
  explicit TimeSeries(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) {
      throw InvalidArgument("TimeSeries requires at least 2 observations");
    }
    for (double v : values_) {
      if (!std::isfinite(v)) {
        throw InvalidArgument("TimeSeries values must be finite");
      }
    }
  }

  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }
  long size() const { return static_cast<long>(values_.size()); }
  double operator[](long t) const { return values_[static_cast<size_t>(t)]; }

 private:
  std::vector<double> values_;
};

// A quantile level strictly inside (0,1).
class QuantileLevel {
 public:
  explicit QuantileLevel(double a) : a_(a) {
    if (!(a > 0.0 && a < 1.0)) {
      throw InvalidArgument("quantile level must lie in (0,1)");
    }
  }
  double value() const { return a_; }

 private:
  double a_;
};

// Quantile levels for the predicted series (a1) and the predicting
// series (a2).
struct QuantilePair {
  QuantileLevel a1;
  QuantileLevel a2;

  QuantilePair(QuantileLevel predicted, QuantileLevel predicting)
      : a1(predicted), a2(predicting) {}
  QuantilePair(double predicted, double predicting)
      : a1(predicted), a2(predicting) {}
};

inline bool operator==(const QuantilePair& x, const QuantilePair& y) {
  return x.a1.value() == y.a1.value() && x.a2.value() == y.a2.value();
}

// A finite discretization of the quantile range; pairs must be distinct.
class QuantileGrid {
 public:
  explicit QuantileGrid(std::vector<QuantilePair> pairs)
      : pairs_(std::move(pairs)) {
    if (pairs_.empty()) {
      throw InvalidArgument("quantile grid must be nonempty");
    }
    for (size_t i = 0; i < pairs_.size(); ++i) {
      for (size_t j = i + 1; j < pairs_.size(); ++j) {
        if (pairs_[i] == pairs_[j]) {
          throw InvalidArgument("quantile grid pairs must be distinct");
        }
      }
    }
  }

  const std::vector<QuantilePair>& pairs() const { return pairs_; }
  size_t size() const { return pairs_.size(); }

 private:
  std::vector<QuantilePair> pairs_;
};

// Dense square matrix, row-major. Small sizes only (lag counts, hit
// dimensions); heavy algebra happens behind the implementation.
class SquareMatrix {
 public:
  explicit SquareMatrix(int n) : n_(n), data_(static_cast<size_t>(n) * n, 0.0) {
    if (n <= 0) throw InvalidArgument("matrix dimension must be positive");
  }

  int size() const { return n_; }
  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * n_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * n_ + j]; }
  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

 private:
  int n_;
  std::vector<double> data_;
};

// 1-based rank of the a-quantile order statistic in a sample of size n:
// ceil(n*a), with n*a treated as an integer when it is one up to
// floating-point dust. This is the inf{v : F(v) >= a} convention.
inline long quantile_rank(long n, double a) {
  double na = static_cast<double>(n) * a;
  double nearest = std::round(na);
  long m;
  if (std::abs(na - nearest) < 1e-9 * (1.0 + std::abs(na))) {
    m = static_cast<long>(nearest);
  } else {
    m = static_cast<long>(std::ceil(na));
  }
  if (m < 1) m = 1;
  if (m > n) m = n;
  return m;
}

// Smallest admissible subsample size ceil(T*omega), with the same
// integer-dust handling as quantile_rank.
inline long trimmed_start(long T, double omega) {
  double tw = static_cast<double>(T) * omega;
  double nearest = std::round(tw);
  long s;
  if (std::abs(tw - nearest) < 1e-9 * (1.0 + std::abs(tw))) {
    s = static_cast<long>(nearest);
  } else {
    s = static_cast<long>(std::ceil(tw));
  }
  if (s < 1) s = 1;
  return s;
}

}  // namespace xqgram
