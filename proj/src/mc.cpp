#include "xqgram/mc.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include "xqgram/bootstrap.hpp"
#include "xqgram/parallel.hpp"
#include "xqgram/rng.hpp"

namespace xqgram {

namespace {

constexpr std::uint64_t kStreamDgp = 0x4447505f47454eULL;    // "DGP_GEN"
constexpr std::uint64_t kStreamMcCell = 0x4d435f43454c4cULL;  // "MC_CELL"

}  // namespace

std::pair<TimeSeries, TimeSeries> gen_dgp1(long T, std::uint64_t seed) {
  if (T < 1) throw InvalidArgument("gen_dgp1: T must be positive");
  Rng rng = Rng::substream(seed, 1, 0, kStreamDgp);
  std::vector<double> x1(static_cast<size_t>(T)), x2(static_cast<size_t>(T));
  for (long t = 0; t < T; ++t) {
    x1[t] = rng.normal();
    x2[t] = rng.normal();
  }
  return {TimeSeries(std::move(x1)), TimeSeries(std::move(x2))};
}

GarchXSample gen_dgp2_full(long T, long burn_in, std::uint64_t seed) {
  if (T < 1) throw InvalidArgument("gen_dgp2: T must be positive");
  if (burn_in < 200) throw InvalidArgument("gen_dgp2: burn_in must be >= 200");
  Rng rng = Rng::substream(seed, 2, 0, kStreamDgp);
  std::vector<double> x1(static_cast<size_t>(T)), x2(static_cast<size_t>(T));
  std::vector<double> sig2(static_cast<size_t>(T));
  double sigma2 = 0.1 / (1.0 - 0.2);  // constant-only level; washed out
  double prev_x1 = 0.0, prev_x2 = 0.0;
  for (long t = -burn_in; t < T; ++t) {
    if (t > -burn_in) {
      sigma2 = 0.1 + 0.2 * prev_x1 * prev_x1 + 0.2 * sigma2 +
               prev_x2 * prev_x2;
    }
    double e1 = rng.normal();
    double e2 = rng.normal();
    double v1 = std::sqrt(sigma2) * e1;
    double v2 = e2;
    if (t >= 0) {
      x1[t] = v1;
      x2[t] = v2;
      sig2[t] = sigma2;
    }
    prev_x1 = v1;
    prev_x2 = v2;
  }
  return {TimeSeries(std::move(x1)), TimeSeries(std::move(x2)),
          std::move(sig2)};
}

std::pair<TimeSeries, TimeSeries> gen_dgp2(long T, long burn_in,
                                           std::uint64_t seed) {
  GarchXSample s = gen_dgp2_full(T, burn_in, seed);
  return {std::move(s.x1), std::move(s.x2)};
}

std::pair<TimeSeries, TimeSeries> generate(const DGPSpec& spec) {
  return spec.kind == DgpKind::IidNormal
             ? gen_dgp1(spec.T, spec.seed)
             : gen_dgp2(spec.T, spec.burn_in, spec.seed);
}

void ExperimentGrid::validate() const {
  if (alphas.empty() || lags.empty() || sample_sizes.empty()) {
    throw InvalidArgument("ExperimentGrid: alphas, lags, sample sizes must be nonempty");
  }
  if (nrep < 1) throw InvalidArgument("ExperimentGrid: nrep must be positive");
  for (double a : alphas) {
    if (!(a > 0.0 && a < 1.0)) {
      throw InvalidArgument("ExperimentGrid: alpha levels must lie in (0,1)");
    }
  }
  for (long T : sample_sizes) {
    if (T < 50) throw InvalidArgument("ExperimentGrid: T must be >= 50");
  }
  if (method == TestMethod::StationaryBootstrap) {
    if (B < 20) throw InvalidArgument("ExperimentGrid: B too small");
  } else {
    if (table == nullptr) {
      throw InvalidArgument("ExperimentGrid: SN method needs a critical-value table");
    }
  }
  if (!(tau > 0.0 && tau < 1.0)) {
    throw InvalidArgument("ExperimentGrid: tau must lie in (0,1)");
  }
}

SizePowerTable run_size_power(const ExperimentGrid& grid) {
  grid.validate();
  SizePowerTable out;
  out.grid = grid;

  std::uint64_t cell_index = 0;
  for (long T : grid.sample_sizes) {
    for (int p : grid.lags) {
      for (double alpha : grid.alphas) {
        ++cell_index;
        QuantilePair pair(alpha, alpha);
        // 0 = failure, 1 = accept, 2 = reject, stored by replication index.
        std::vector<char> outcome(static_cast<size_t>(grid.nrep), 0);

        parallel_for(grid.nrep, [&](long rep) {
          std::uint64_t data_seed =
              Rng::substream(grid.seed, cell_index, static_cast<std::uint64_t>(rep),
                             kStreamMcCell)
                  .engine()();
          auto [x1, x2] = grid.dgp == DgpKind::IidNormal
                              ? gen_dgp1(T, data_seed)
                              : gen_dgp2(T, grid.burn_in, data_seed);
          try {
            bool reject;
            if (grid.method == TestMethod::StationaryBootstrap) {
              SBConfig cfg;
              cfg.gamma = choose_gamma(x1, x2);
              cfg.B = grid.B;
              cfg.seed = data_seed ^ 0x626f6f74ULL;  // independent boot stream
              cfg.tau = grid.tau;
              CQResult rho = cq_vector(x1, x2, p, pair);
              BootstrapDistribution dist = bootstrap_distribution(
                  x1, x2, p, pair, cfg, StatVariant::BoxLjung, /*threads=*/1);
              double cv = bootstrap_critical_value(dist.q_star, grid.tau);
              reject = q_box_ljung(rho) > cv;
            } else {
              SNConfig cfg;
              cfg.omega = grid.omega;
              cfg.tau = grid.tau;
              cfg.table = grid.table;
              reject = sn_test(x1, x2, p, pair, cfg).reject;
            }
            outcome[rep] = reject ? 2 : 1;
          } catch (const Error&) {
            outcome[rep] = 0;
          }
        });

        CellResult cell;
        cell.T = T;
        cell.p = p;
        cell.alpha = alpha;
        cell.nrep = grid.nrep;
        long rejections = 0;
        for (char o : outcome) {
          if (o == 0) cell.failures++;
          if (o == 2) rejections++;
        }
        cell.reject_freq =
            static_cast<double>(rejections) / static_cast<double>(grid.nrep);
        cell.mc_se = std::sqrt(cell.reject_freq * (1.0 - cell.reject_freq) /
                               static_cast<double>(grid.nrep));
        cell.unreliable =
            static_cast<double>(cell.failures) > 0.02 * static_cast<double>(grid.nrep);
        out.cells.push_back(cell);
      }
    }
  }
  return out;
}

std::string size_power_csv(const SizePowerTable& table) {
  std::ostringstream out;
  out.precision(10);
  out << "dgp,method,T,p,alpha,reject_freq,mc_se,nrep,B_or_table,seed,failures,unreliable\n";
  std::string dgp = table.grid.dgp == DgpKind::IidNormal ? "1" : "2";
  std::string method =
      table.grid.method == TestMethod::StationaryBootstrap ? "sb" : "sn";
  std::string b_or_table =
      table.grid.method == TestMethod::StationaryBootstrap
          ? std::to_string(table.grid.B)
          : "omega=" + std::to_string(table.grid.omega);
  for (const CellResult& c : table.cells) {
    out << dgp << ',' << method << ',' << c.T << ',' << c.p << ',' << c.alpha
        << ',' << c.reject_freq << ',' << c.mc_se << ',' << c.nrep << ','
        << b_or_table << ',' << table.grid.seed << ',' << c.failures << ','
        << (c.unreliable ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string size_power_text(const SizePowerTable& table) {
  std::ostringstream out;
  out << "rejection frequencies ("
      << (table.grid.method == TestMethod::StationaryBootstrap
              ? "stationary bootstrap"
              : "self-normalized")
      << ", dgp " << (table.grid.dgp == DgpKind::IidNormal ? 1 : 2)
      << ", nominal tau " << table.grid.tau << ", nrep " << table.grid.nrep
      << ")\n";
  out << std::setw(8) << "T" << std::setw(5) << "p";
  for (double a : table.grid.alphas) {
    std::ostringstream head;
    head << "a=" << a;
    out << std::setw(10) << head.str();
  }
  out << '\n';
  size_t idx = 0;
  for (long T : table.grid.sample_sizes) {
    for (int p : table.grid.lags) {
      out << std::setw(8) << T << std::setw(5) << p;
      for (size_t i = 0; i < table.grid.alphas.size(); ++i) {
        const CellResult& c = table.cells[idx++];
        std::ostringstream v;
        v << std::fixed << std::setprecision(3) << c.reject_freq
          << (c.unreliable ? "!" : "");
        out << std::setw(10) << v.str();
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace xqgram
