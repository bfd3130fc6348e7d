#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "xqgram/cqgram.hpp"
#include "xqgram/report.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

// Cross-quantilograms of the growing subsamples x[1..s], s =
// trimmed_start(T, omega)..T, each using the subsample's own quantiles.
// The final row coincides with the full-sample cq_vector bit-exactly.
struct RecursiveCQ {
  QuantilePair pair{0.5, 0.5};
  long T = 0;
  long s_min = 0;
  int p = 0;
  std::vector<std::vector<double>> rho_s;  // row i is subsample s = s_min + i
  std::vector<char> valid;                 // degenerate rows marked invalid
  long dropped = 0;
  CQResult full;
};

RecursiveCQ recursive_cq(const TimeSeries& x1, const TimeSeries& x2, int p,
                         const QuantilePair& pair, double omega);

// Self-normalizer: A = T^-2 * sum_s s^2 (rho_s - rho)(rho_s - rho)^T over
// the valid subsample rows. Symmetric positive semidefinite.
SquareMatrix a_hat(const RecursiveCQ& rec);

// Self-normalized omnibus statistic S = T * rho' A^-1 rho. Raises
// SingularNormalizerError when A has condition number above 1e12 or a
// nonpositive eigenvalue.
double s_statistic(const CQResult& rho, const SquareMatrix& a);

struct CriticalValueEntry {
  int p = 0;
  double omega = 0.0;
  double tau = 0.0;
  double value = 0.0;
  int n_grid = 0;
  long n_rep = 0;
  std::uint64_t seed = 0;
};

// Simulated critical values keyed by (p, omega, tau), with the simulation
// provenance that produced them. Serialized as a versioned plain-text
// table.
class CriticalValueTable {
 public:
  void add(const CriticalValueEntry& entry);
  const CriticalValueEntry& find(int p, double omega, double tau) const;
  double lookup(int p, double omega, double tau) const {
    return find(p, omega, tau).value;
  }
  bool contains(int p, double omega, double tau) const;
  const std::vector<CriticalValueEntry>& entries() const { return entries_; }

  // For every (p, omega) group, values must be strictly decreasing in tau.
  void validate() const;

  void save(const std::string& path) const;
  static CriticalValueTable load(const std::string& path);

 private:
  std::vector<CriticalValueEntry> entries_;
};

// Draws of the limiting statistic B(1)' A_p^-1 B(1), where A_p is the
// Riemann approximation of the trimmed integral of the outer product of
// the Brownian bridge B(r) - r B(1) over [omega, 1], from a p-dimensional
// standard Brownian motion on an n_grid-point partition.
std::vector<double> simulate_sn_limit_draws(int p, double omega, int n_grid,
                                            long n_rep, std::uint64_t seed,
                                            int threads = 0);

// Empirical (1-tau) quantiles of the simulated limit for each tau in
// tau_list, with provenance. Requires n_grid >= 500 and n_rep >= 10000.
std::vector<CriticalValueEntry> simulate_sn_critical_values(
    int p, double omega, std::span<const double> tau_list, int n_grid,
    long n_rep, std::uint64_t seed, int threads = 0);

struct SNConfig {
  double omega = 0.1;
  double tau = 0.05;
  const CriticalValueTable* table = nullptr;
};

// Self-normalized omnibus test: S against the tabulated critical value.
TestReport sn_test(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair, const SNConfig& cfg);

}  // namespace xqgram
