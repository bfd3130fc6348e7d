#include "xqgram/selfnorm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <Eigen/Dense>

#include "xqgram/parallel.hpp"
#include "xqgram/quantile.hpp"
#include "xqgram/rng.hpp"

namespace xqgram {

namespace {

constexpr std::uint64_t kStreamCritval = 0x534e5f43524954ULL;  // "SN_CRIT"
constexpr double kMaxCondition = 1e12;

long key_round(double v) { return static_cast<long>(std::llround(v * 1e6)); }

Eigen::MatrixXd to_eigen(const SquareMatrix& m) {
  int n = m.size();
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out(i, j) = m(i, j);
  }
  return out;
}

}  // namespace

RecursiveCQ recursive_cq(const TimeSeries& x1, const TimeSeries& x2, int p,
                         const QuantilePair& pair, double omega) {
  long T = x1.size();
  if (x2.size() != T) {
    throw InvalidArgument("recursive_cq: series lengths differ");
  }
  if (!(omega > 0.0 && omega < 1.0)) {
    throw InvalidArgument("recursive_cq: omega must lie in (0,1)");
  }
  long s_min = trimmed_start(T, omega);
  if (s_min <= p + 2) {
    throw InvalidArgument(
        "recursive_cq: ceil(T*omega) must exceed p + 2; increase omega or T");
  }

  RecursiveCQ rec;
  rec.pair = pair;
  rec.T = T;
  rec.s_min = s_min;
  rec.p = p;
  rec.full = cq_vector(x1, x2, p, pair);
  long rows = T - s_min + 1;
  rec.rho_s.assign(static_cast<size_t>(rows),
                   std::vector<double>(static_cast<size_t>(p), 0.0));
  rec.valid.assign(static_cast<size_t>(rows), 1);

  double a1 = pair.a1.value();
  double a2 = pair.a2.value();
  RecursiveQuantile rq1(pair.a1);
  RecursiveQuantile rq2(pair.a2);
  // Prefix hit counts for the current subsample quantiles; rebuilt per s.
  std::vector<long> pre1(static_cast<size_t>(T) + 1, 0);
  std::vector<long> pre2(static_cast<size_t>(T) + 1, 0);
  std::vector<char> h1(static_cast<size_t>(T), 0);
  std::vector<char> h2(static_cast<size_t>(T), 0);

  for (long s = 1; s <= T; ++s) {
    rq1.push(x1[s - 1]);
    rq2.push(x2[s - 1]);
    if (s < s_min) continue;
    double q1 = rq1.value();
    double q2 = rq2.value();
    for (long t = 0; t < s; ++t) {
      h1[t] = x1[t] < q1;
      h2[t] = x2[t] < q2;
      pre1[t + 1] = pre1[t] + h1[t];
      pre2[t + 1] = pre2[t] + h2[t];
    }
    long row = s - s_min;
    for (int k = 1; k <= p; ++k) {
      long n = s - k;
      long c1 = pre1[s] - pre1[k];      // hits of x1_t, t = k+1..s
      long c2 = pre2[s - k];            // hits of x2_{t-k}, same window
      long c11 = 0;
      for (long t = k; t < s; ++t) c11 += h1[t] && h2[t - k];
      try {
        rec.rho_s[row][static_cast<size_t>(k - 1)] =
            detail::rho_from_hit_counts(c11, c1, c2, n, a1, a2, k);
      } catch (const ZeroDenominatorError&) {
        if (s == T) throw;  // full-sample row must be computable
        rec.valid[row] = 0;
        rec.dropped++;
        break;
      }
    }
  }
  return rec;
}

SquareMatrix a_hat(const RecursiveCQ& rec) {
  int p = rec.p;
  SquareMatrix a(p);
  double t2 = static_cast<double>(rec.T) * static_cast<double>(rec.T);
  std::vector<double> dev(static_cast<size_t>(p));
  for (size_t row = 0; row < rec.rho_s.size(); ++row) {
    if (!rec.valid[row]) continue;
    double s = static_cast<double>(rec.s_min + static_cast<long>(row));
    for (int i = 0; i < p; ++i) {
      dev[i] = rec.rho_s[row][static_cast<size_t>(i)] -
               rec.full.rho[static_cast<size_t>(i)];
    }
    double w = s * s / t2;
    for (int i = 0; i < p; ++i) {
      for (int j = i; j < p; ++j) {
        a(i, j) += w * dev[i] * dev[j];
      }
    }
  }
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < i; ++j) a(i, j) = a(j, i);
  }
  return a;
}

double s_statistic(const CQResult& rho, const SquareMatrix& a) {
  if (a.size() != rho.p) {
    throw InvalidArgument("s_statistic: dimension mismatch");
  }
  Eigen::MatrixXd m = to_eigen(a);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  double lo = eig.eigenvalues().minCoeff();
  double hi = eig.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || !(hi > 0.0) || hi / lo > kMaxCondition) {
    throw SingularNormalizerError(
        "self-normalizer numerically singular (condition " +
        std::to_string(lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity()) +
        "); sample too small or hits degenerate");
  }
  Eigen::VectorXd r(rho.p);
  for (int i = 0; i < rho.p; ++i) r(i) = rho.rho[static_cast<size_t>(i)];
  Eigen::VectorXd z = eig.eigenvectors().transpose() * r;
  double quad = 0.0;
  for (int i = 0; i < rho.p; ++i) {
    quad += z(i) * z(i) / eig.eigenvalues()(i);
  }
  return static_cast<double>(rho.T) * quad;
}

void CriticalValueTable::add(const CriticalValueEntry& entry) {
  if (contains(entry.p, entry.omega, entry.tau)) {
    throw InvalidArgument("CriticalValueTable: duplicate entry");
  }
  entries_.push_back(entry);
}

bool CriticalValueTable::contains(int p, double omega, double tau) const {
  for (const auto& e : entries_) {
    if (e.p == p && key_round(e.omega) == key_round(omega) &&
        key_round(e.tau) == key_round(tau)) {
      return true;
    }
  }
  return false;
}

const CriticalValueEntry& CriticalValueTable::find(int p, double omega,
                                                   double tau) const {
  for (const auto& e : entries_) {
    if (e.p == p && key_round(e.omega) == key_round(omega) &&
        key_round(e.tau) == key_round(tau)) {
      return e;
    }
  }
  throw TableEntryMissingError(
      "no critical value for (p=" + std::to_string(p) +
      ", omega=" + std::to_string(omega) + ", tau=" + std::to_string(tau) +
      ")");
}

void CriticalValueTable::validate() const {
  for (const auto& e : entries_) {
    for (const auto& f : entries_) {
      if (e.p == f.p && key_round(e.omega) == key_round(f.omega) &&
          e.tau < f.tau && !(e.value > f.value)) {
        throw InvalidArgument(
            "CriticalValueTable: values must decrease strictly in tau");
      }
    }
  }
}

void CriticalValueTable::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw DataError("cannot open for writing: " + path);
  out << "# xqgram self-normalized critical values v1\n";
  out << "# columns: p omega tau value n_grid n_rep seed\n";
  out.precision(12);
  for (const auto& e : entries_) {
    out << e.p << ' ' << e.omega << ' ' << e.tau << ' ' << e.value << ' '
        << e.n_grid << ' ' << e.n_rep << ' ' << e.seed << '\n';
  }
  if (!out) throw DataError("write failed: " + path);
}

CriticalValueTable CriticalValueTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open critical-value table: " + path);
  CriticalValueTable table;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream row(line);
    CriticalValueEntry e;
    if (!(row >> e.p >> e.omega >> e.tau >> e.value >> e.n_grid >> e.n_rep >>
          e.seed)) {
      throw DataError("malformed critical-value table line " +
                      std::to_string(line_no) + " in " + path);
    }
    table.add(e);
  }
  table.validate();
  return table;
}

std::vector<double> simulate_sn_limit_draws(int p, double omega, int n_grid,
                                            long n_rep, std::uint64_t seed,
                                            int threads) {
  if (p < 1) throw InvalidArgument("simulate_sn_limit_draws: p must be >= 1");
  if (!(omega > 0.0 && omega < 1.0)) {
    throw InvalidArgument("simulate_sn_limit_draws: omega must lie in (0,1)");
  }
  if (n_grid < 500) {
    throw InvalidArgument("simulate_sn_limit_draws: n_grid must be >= 500");
  }
  if (n_rep < 10000) {
    throw InvalidArgument("simulate_sn_limit_draws: n_rep must be >= 10000");
  }
  long j0 = trimmed_start(n_grid, omega);
  double step = 1.0 / static_cast<double>(n_grid);
  double root_step = std::sqrt(step);

  std::vector<double> draws(static_cast<size_t>(n_rep), 0.0);
  parallel_for(
      n_rep,
      [&](long r) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(r), 0,
                                 kStreamCritval);
        // Brownian path at grid points 1..n_grid (starts at 0).
        Eigen::MatrixXd path(p, n_grid);
        Eigen::VectorXd w = Eigen::VectorXd::Zero(p);
        for (int j = 0; j < n_grid; ++j) {
          for (int d = 0; d < p; ++d) w(d) += root_step * rng.normal();
          path.col(j) = w;
        }
        Eigen::VectorXd end = path.col(n_grid - 1);
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(p, p);
        for (long j = j0; j <= n_grid; ++j) {
          double rr = static_cast<double>(j) * step;
          Eigen::VectorXd bridge = path.col(j - 1) - rr * end;
          a.noalias() += step * bridge * bridge.transpose();
        }
        draws[r] = end.dot(a.llt().solve(end));
      },
      threads);
  return draws;
}

std::vector<CriticalValueEntry> simulate_sn_critical_values(
    int p, double omega, std::span<const double> tau_list, int n_grid,
    long n_rep, std::uint64_t seed, int threads) {
  std::vector<double> draws =
      simulate_sn_limit_draws(p, omega, n_grid, n_rep, seed, threads);
  std::sort(draws.begin(), draws.end());
  std::vector<CriticalValueEntry> out;
  for (double tau : tau_list) {
    if (!(tau > 0.0 && tau < 1.0)) {
      throw InvalidArgument("simulate_sn_critical_values: tau not in (0,1)");
    }
    long rank = static_cast<long>(
        std::ceil((1.0 - tau) * static_cast<double>(n_rep)));
    rank = std::clamp(rank, 1L, n_rep);
    out.push_back({p, omega, tau, draws[rank - 1], n_grid, n_rep, seed});
  }
  return out;
}

TestReport sn_test(const TimeSeries& x1, const TimeSeries& x2, int p,
                   const QuantilePair& pair, const SNConfig& cfg) {
  if (cfg.table == nullptr) {
    throw InvalidArgument("sn_test: no critical-value table configured");
  }
  const CriticalValueEntry& cv = cfg.table->find(p, cfg.omega, cfg.tau);

  RecursiveCQ rec = recursive_cq(x1, x2, p, pair, cfg.omega);
  SquareMatrix a = a_hat(rec);
  double s = s_statistic(rec.full, a);

  TestReport report;
  report.method = "sn";
  report.statistic_name = "s_self_normalized";
  report.statistic = s;
  report.critical_value = cv.value;
  report.reject = s > cv.value;
  report.tau = cfg.tau;
  report.T = x1.size();
  report.p = p;
  report.alpha1 = pair.a1.value();
  report.alpha2 = pair.a2.value();
  report.echo("omega", std::to_string(cfg.omega));
  report.echo("table_n_grid", std::to_string(cv.n_grid));
  report.echo("table_n_rep", std::to_string(cv.n_rep));
  report.echo("table_seed", std::to_string(cv.seed));
  if (rec.dropped > 0) {
    report.warnings.push_back(std::to_string(rec.dropped) +
                              " degenerate subsample rows dropped");
  }
  return report;
}

}  // namespace xqgram
