#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "xqgram/cqgram.hpp"
#include "xqgram/selfnorm.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

enum class DgpKind { IidNormal, GarchX };  // DGP 1 and 2

struct DGPSpec {
  DgpKind kind = DgpKind::IidNormal;
  long T = 500;
  long burn_in = 500;  // GARCH-X only
  std::uint64_t seed = 0;
};

// Two independent standard normal series.
std::pair<TimeSeries, TimeSeries> gen_dgp1(long T, std::uint64_t seed);

// GARCH-X pair: x2 iid standard normal; x1_t = sigma_t * eps_t with
// sigma_t^2 = 0.1 + 0.2 x1_{t-1}^2 + 0.2 sigma_{t-1}^2 + x2_{t-1}^2.
// sigma_0^2 starts at the constant-only level 0.1/(1-0.2); the first
// burn_in draws are discarded. Requires burn_in >= 200.
std::pair<TimeSeries, TimeSeries> gen_dgp2(long T, long burn_in,
                                           std::uint64_t seed);

// GARCH-X with the conditional variance path retained (for diagnostics).
struct GarchXSample {
  TimeSeries x1;
  TimeSeries x2;
  std::vector<double> sigma2;  // aligned with x1
};
GarchXSample gen_dgp2_full(long T, long burn_in, std::uint64_t seed);

std::pair<TimeSeries, TimeSeries> generate(const DGPSpec& spec);

enum class TestMethod { StationaryBootstrap, SelfNormalized };

// One rejection-frequency experiment: every (T, p, alpha) cell of the grid
// is replicated nrep times; each replication draws fresh data from the DGP
// and runs the chosen test at level tau.
struct ExperimentGrid {
  DgpKind dgp = DgpKind::IidNormal;
  std::vector<double> alphas;  // equal-pair levels alpha1 = alpha2
  std::vector<int> lags;
  std::vector<long> sample_sizes;
  TestMethod method = TestMethod::StationaryBootstrap;
  int nrep = 300;
  // SB settings: B bootstrap replicates, gamma auto-tuned per replication.
  int B = 250;
  // SN settings.
  double omega = 0.1;
  const CriticalValueTable* table = nullptr;
  double tau = 0.05;
  long burn_in = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct CellResult {
  long T = 0;
  int p = 0;
  double alpha = 0.0;
  double reject_freq = 0.0;  // rejections / nrep
  double mc_se = 0.0;        // sqrt(f(1-f)/nrep)
  int nrep = 0;
  int failures = 0;          // replications that raised a degeneracy error
  bool unreliable = false;   // more than 2% failures
};

struct SizePowerTable {
  ExperimentGrid grid;
  std::vector<CellResult> cells;
};

SizePowerTable run_size_power(const ExperimentGrid& grid);

// CSV (columns: dgp, method, T, p, alpha, reject_freq, mc_se, nrep,
// B_or_table, seed) and an aligned human-readable rendering.
std::string size_power_csv(const SizePowerTable& table);
std::string size_power_text(const SizePowerTable& table);

}  // namespace xqgram
