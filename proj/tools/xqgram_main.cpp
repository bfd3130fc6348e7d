#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "xqgram/bootstrap.hpp"
#include "xqgram/cqgram.hpp"
#include "xqgram/io.hpp"
#include "xqgram/mc.hpp"
#include "xqgram/partial.hpp"
#include "xqgram/selfnorm.hpp"

#ifndef XQGRAM_DEFAULT_TABLE
#define XQGRAM_DEFAULT_TABLE "data/sn_critical_values.txt"
#endif

namespace {

using nlohmann::json;
using namespace xqgram;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct CommonOptions {
  std::string input;
  std::string x1_col = "x1";
  std::string x2_col = "x2";
  std::vector<std::string> control_cols;
  std::vector<double> alpha1;
  std::vector<double> alpha2;
  std::vector<double> beta;
  int max_lag = 0;
  std::vector<int> lags;
  int p = 0;
  std::string method = "sb";
  int B = 1000;
  double gamma = 0.0;  // 0 = automatic
  double omega = 0.1;
  double tau = 0.05;
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
  std::string format = "csv";
  std::string table_path;
};

std::vector<int> requested_lags(const CommonOptions& opt) {
  if (!opt.lags.empty()) {
    for (int k : opt.lags) {
      if (k < 1) throw InvalidArgument("lags must be positive");
    }
    return opt.lags;
  }
  if (opt.max_lag < 1) {
    throw InvalidArgument("provide --max-lag or --lags");
  }
  std::vector<int> ks(static_cast<size_t>(opt.max_lag));
  for (int k = 1; k <= opt.max_lag; ++k) ks[static_cast<size_t>(k - 1)] = k;
  return ks;
}

// Table resolution order: --table, XQGRAM_CRITVAL_TABLE, the repository
// default, otherwise simulate the needed entries on the fly.
CriticalValueTable resolve_table(const std::string& flag_path,
                                 const std::vector<int>& p_needed,
                                 double omega, double tau,
                                 std::uint64_t seed) {
  std::string path = flag_path;
  if (path.empty()) {
    if (const char* env = std::getenv("XQGRAM_CRITVAL_TABLE")) path = env;
  }
  if (path.empty() && std::filesystem::exists(XQGRAM_DEFAULT_TABLE)) {
    path = XQGRAM_DEFAULT_TABLE;
  }
  CriticalValueTable table;
  if (!path.empty()) {
    table = CriticalValueTable::load(path);
    std::cerr << "using critical-value table " << path << "\n";
  }
  for (int p : p_needed) {
    if (table.contains(p, omega, tau)) continue;
    std::cerr << "simulating critical value for (p=" << p
              << ", omega=" << omega << ", tau=" << tau << ") ...\n";
    std::vector<double> taus{tau};
    for (const CriticalValueEntry& e :
         simulate_sn_critical_values(p, omega, taus, 1000, 50000, seed)) {
      table.add(e);
    }
  }
  return table;
}

std::string canonical_config(const std::vector<std::pair<std::string, std::string>>& kv) {
  std::ostringstream out;
  for (const auto& [k, v] : kv) out << k << '=' << v << '|';
  return out.str();
}

std::string num(double v) {
  std::ostringstream out;
  out.precision(12);
  out << v;
  return out.str();
}

std::string join_doubles(const std::vector<double>& v) {
  std::ostringstream out;
  for (size_t i = 0; i < v.size(); ++i) out << (i ? "," : "") << num(v[i]);
  return out.str();
}

// Portmanteau deviation statistic of one replicate restricted to lags <= p.
double q_star_restricted(const std::vector<double>& rho_star,
                         const CQResult& rho_hat, int p, StatVariant variant) {
  double T = static_cast<double>(rho_hat.T);
  double q = 0.0;
  for (int k = 1; k <= p; ++k) {
    double d = rho_star[static_cast<size_t>(k - 1)] - rho_hat.at(k);
    double w = variant == StatVariant::BoxPierce
                   ? T
                   : T * (T + 2.0) / (T - static_cast<double>(k));
    q += w * d * d;
  }
  return q;
}

double q_restricted(const CQResult& rho_hat, int p, StatVariant variant) {
  double T = static_cast<double>(rho_hat.T);
  double q = 0.0;
  for (int k = 1; k <= p; ++k) {
    double w = variant == StatVariant::BoxPierce
                   ? T
                   : T * (T + 2.0) / (T - static_cast<double>(k));
    q += w * rho_hat.at(k) * rho_hat.at(k);
  }
  return q;
}

int run_cq(const CommonOptions& opt) {
  if (opt.input.empty()) throw InvalidArgument("cq: --input is required");
  if (opt.alpha1.empty() || opt.alpha2.empty()) {
    throw InvalidArgument("cq: --alpha1 and --alpha2 are required");
  }
  std::vector<int> ks = requested_lags(opt);
  int k_max = *std::max_element(ks.begin(), ks.end());
  int p_max = opt.p > 0 ? opt.p : k_max;
  int need = std::max(k_max, p_max);

  auto cols = read_csv_columns(opt.input, {opt.x1_col, opt.x2_col});
  TimeSeries x1(cols[opt.x1_col]);
  TimeSeries x2(cols[opt.x2_col]);

  std::vector<QuantilePair> pairs;
  for (double a1 : opt.alpha1) {
    for (double a2 : opt.alpha2) pairs.emplace_back(a1, a2);
  }

  std::vector<std::pair<std::string, std::string>> cfg{
      {"cmd", "cq"},           {"input", opt.input},
      {"x1", opt.x1_col},      {"x2", opt.x2_col},
      {"alpha1", join_doubles(opt.alpha1)},
      {"alpha2", join_doubles(opt.alpha2)},
      {"max_lag", std::to_string(k_max)},
      {"p", std::to_string(p_max)},
      {"method", opt.method},  {"B", std::to_string(opt.B)},
      {"gamma", num(opt.gamma)},
      {"omega", num(opt.omega)},
      {"tau", num(opt.tau)},   {"seed", std::to_string(opt.seed)},
      {"format", opt.format}};
  std::string hash = hash_hex(config_hash(canonical_config(cfg)));

  std::vector<RhoRecord> rho_records;
  std::vector<QRecord> q_records;
  json pair_reports = json::array();

  if (opt.method == "sb") {
    SBConfig sb;
    sb.gamma = opt.gamma;
    sb.B = opt.B;
    sb.seed = opt.seed;
    sb.tau = opt.tau;
    bool auto_gamma = !(opt.gamma > 0.0);
    GammaChoice choice;
    if (auto_gamma) {
      choice = choose_gamma_detail(x1, x2);
      sb.gamma = choice.gamma;
    }

    // Same seed for every pair means the resample indices are shared, so
    // the per-replicate sup over pairs is a coherent joint-test draw.
    std::vector<double> sup_star;
    double sup_q_hat = 0.0;
    QuantilePair sup_arg = pairs.front();
    bool sup_first = true;

    for (const QuantilePair& pair : pairs) {
      CQResult rho_hat = cq_vector(x1, x2, need, pair);
      BootstrapDistribution dist = bootstrap_distribution(
          x1, x2, need, pair, sb, StatVariant::BoxLjung);
      std::vector<ConfidenceInterval> cis = bootstrap_ci(dist, rho_hat, opt.tau);
      for (int k : ks) {
        const ConfidenceInterval& ci = cis[static_cast<size_t>(k - 1)];
        rho_records.push_back({pair.a1.value(), pair.a2.value(), k,
                               rho_hat.at(k), ci.lo, ci.hi});
      }
      std::vector<double> draws(dist.rho_star.size());
      for (int p = 1; p <= p_max; ++p) {
        for (size_t b = 0; b < dist.rho_star.size(); ++b) {
          draws[b] = q_star_restricted(dist.rho_star[b], rho_hat, p,
                                       StatVariant::BoxLjung);
        }
        q_records.push_back({pair.a1.value(), pair.a2.value(), p,
                             q_restricted(rho_hat, p, StatVariant::BoxLjung),
                             bootstrap_critical_value(draws, opt.tau)});
      }
      if (sup_star.empty()) sup_star.assign(dist.q_star.size(), 0.0);
      for (size_t b = 0; b < dist.q_star.size(); ++b) {
        double qb = q_star_restricted(dist.rho_star[b], rho_hat, p_max,
                                      StatVariant::BoxLjung);
        if (qb > sup_star[b]) sup_star[b] = qb;
      }
      double q_full = q_restricted(rho_hat, p_max, StatVariant::BoxLjung);
      if (sup_first || q_full > sup_q_hat) {
        sup_q_hat = q_full;
        sup_arg = pair;
        sup_first = false;
      }

      // Peak fields: the largest cross-quantilogram over the lag range.
      int peak_lag = ks.front();
      double peak_value = rho_hat.at(ks.front());
      for (int k : ks) {
        if (rho_hat.at(k) > peak_value) {
          peak_value = rho_hat.at(k);
          peak_lag = k;
        }
      }
      const QRecord& last = q_records.back();
      pair_reports.push_back({{"alpha1", pair.a1.value()},
                              {"alpha2", pair.a2.value()},
                              {"p", p_max},
                              {"Q", last.q},
                              {"critical_value", last.critical_value},
                              {"reject", last.q > last.critical_value},
                              {"peak_lag", peak_lag},
                              {"peak_value", peak_value}});
    }

    double sup_cv = bootstrap_critical_value(sup_star, opt.tau);
    json report;
    report["config"] = json::object();
    for (const auto& [k, v] : cfg) report["config"][k] = v;
    report["config"]["gamma_used"] = sb.gamma;
    report["config"]["gamma_auto"] = auto_gamma;
    report["pairs"] = pair_reports;
    report["sup"] = {{"value", sup_q_hat},
                     {"alpha1", sup_arg.a1.value()},
                     {"alpha2", sup_arg.a2.value()},
                     {"critical_value", sup_cv},
                     {"reject", sup_q_hat > sup_cv}};
    std::filesystem::create_directories(opt.out_dir);
    std::string base = opt.out_dir + "/cq_";
    if (opt.format == "json") {
      atomic_write(base + "rho_" + hash + ".json", rho_records_json(rho_records));
      atomic_write(base + "q_" + hash + ".json", q_records_json(q_records));
    } else {
      atomic_write(base + "rho_" + hash + ".csv", rho_records_csv(rho_records));
      atomic_write(base + "q_" + hash + ".csv", q_records_csv(q_records));
    }
    atomic_write(base + "report_" + hash + ".json", report.dump(2) + "\n");
    std::cout << "wrote " << base << "{rho,q,report}_" << hash << "\n";
    std::cout << "sup-Q = " << sup_q_hat << " (critical " << sup_cv << ", "
              << (sup_q_hat > sup_cv ? "reject" : "no reject") << ")\n";
    return kExitOk;
  }

  if (opt.method != "sn") {
    throw InvalidArgument("method must be sb or sn");
  }

  // Self-normalized route: band per lag from the p = 1 normalizer diagonal,
  // omnibus entries for every tabulated p up to p_max.
  std::vector<int> p_needed{1};
  CriticalValueTable table =
      resolve_table(opt.table_path, p_needed, opt.omega, opt.tau, opt.seed);
  for (int p = 2; p <= p_max; ++p) {
    if (table.contains(p, opt.omega, opt.tau)) p_needed.push_back(p);
  }
  double c1 = table.lookup(1, opt.omega, opt.tau);

  for (const QuantilePair& pair : pairs) {
    RecursiveCQ rec = recursive_cq(x1, x2, need, pair, opt.omega);
    SquareMatrix a = a_hat(rec);
    double root_t = std::sqrt(static_cast<double>(rec.T));
    for (int k : ks) {
      double band = std::sqrt(c1 * a(k - 1, k - 1)) / root_t;
      double r = rec.full.at(k);
      rho_records.push_back(
          {pair.a1.value(), pair.a2.value(), k, r, r - band, r + band});
    }
    json pair_report = {{"alpha1", pair.a1.value()},
                        {"alpha2", pair.a2.value()}};
    int peak_lag = ks.front();
    double peak_value = rec.full.at(ks.front());
    for (int k : ks) {
      if (rec.full.at(k) > peak_value) {
        peak_value = rec.full.at(k);
        peak_lag = k;
      }
    }
    pair_report["peak_lag"] = peak_lag;
    pair_report["peak_value"] = peak_value;
    json s_entries = json::array();
    for (int p : p_needed) {
      if (p > p_max) continue;
      CQResult sub = rec.full;
      sub.p = p;
      sub.rho.resize(static_cast<size_t>(p));
      SquareMatrix ap(p);
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) ap(i, j) = a(i, j);
      }
      double s = s_statistic(sub, ap);
      double cv = table.lookup(p, opt.omega, opt.tau);
      q_records.push_back({pair.a1.value(), pair.a2.value(), p, s, cv});
      s_entries.push_back(
          {{"p", p}, {"S", s}, {"critical_value", cv}, {"reject", s > cv}});
    }
    pair_report["s_statistics"] = s_entries;
    pair_reports.push_back(pair_report);
  }

  json report;
  report["config"] = json::object();
  for (const auto& [k, v] : cfg) report["config"][k] = v;
  report["pairs"] = pair_reports;
  std::filesystem::create_directories(opt.out_dir);
  std::string base = opt.out_dir + "/cq_";
  if (opt.format == "json") {
    atomic_write(base + "rho_" + hash + ".json", rho_records_json(rho_records));
    atomic_write(base + "q_" + hash + ".json", q_records_json(q_records));
  } else {
    atomic_write(base + "rho_" + hash + ".csv", rho_records_csv(rho_records));
    atomic_write(base + "q_" + hash + ".csv", q_records_csv(q_records));
  }
  atomic_write(base + "report_" + hash + ".json", report.dump(2) + "\n");
  std::cout << "wrote " << base << "{rho,q,report}_" << hash << "\n";
  return kExitOk;
}

int run_partial(const CommonOptions& opt) {
  if (opt.input.empty()) throw InvalidArgument("partial: --input is required");
  if (opt.control_cols.empty()) {
    throw InvalidArgument("partial: --controls is required");
  }
  if (opt.alpha1.size() != 1 || opt.alpha2.size() != 1) {
    throw InvalidArgument("partial: provide exactly one --alpha1 and --alpha2");
  }
  std::vector<int> ks = requested_lags(opt);

  std::vector<std::string> wanted{opt.x1_col, opt.x2_col};
  for (const std::string& c : opt.control_cols) wanted.push_back(c);
  auto cols = read_csv_columns(opt.input, wanted);
  TimeSeries x1(cols[opt.x1_col]);
  TimeSeries x2(cols[opt.x2_col]);

  ControlPanel z;
  std::vector<double> betas = opt.beta;
  if (betas.empty()) betas.assign(opt.control_cols.size(), 0.95);
  if (betas.size() == 1 && opt.control_cols.size() > 1) {
    betas.assign(opt.control_cols.size(), betas[0]);
  }
  if (betas.size() != opt.control_cols.size()) {
    throw InvalidArgument("partial: one --beta level per control column");
  }
  for (size_t i = 0; i < opt.control_cols.size(); ++i) {
    z.z.emplace_back(cols[opt.control_cols[i]]);
    z.beta.emplace_back(betas[i]);
  }

  QuantilePair pair(opt.alpha1[0], opt.alpha2[0]);

  std::vector<std::pair<std::string, std::string>> cfg{
      {"cmd", "partial"},      {"input", opt.input},
      {"x1", opt.x1_col},      {"x2", opt.x2_col},
      {"alpha1", num(pair.a1.value())},
      {"alpha2", num(pair.a2.value())},
      {"beta", join_doubles(betas)},
      {"method", opt.method},  {"B", std::to_string(opt.B)},
      {"gamma", num(opt.gamma)},
      {"omega", num(opt.omega)},
      {"tau", num(opt.tau)},   {"seed", std::to_string(opt.seed)},
      {"format", opt.format}};
  for (const std::string& c : opt.control_cols) cfg.emplace_back("control", c);
  std::string hash = hash_hex(config_hash(canonical_config(cfg)));

  std::optional<CriticalValueTable> table;
  SNConfig sn;
  if (opt.method == "sn") {
    table = resolve_table(opt.table_path, {1}, opt.omega, opt.tau, opt.seed);
    sn.omega = opt.omega;
    sn.tau = opt.tau;
    sn.table = &*table;
  } else if (opt.method != "sb") {
    throw InvalidArgument("method must be sb or sn");
  }

  SBConfig sb;
  sb.gamma = opt.gamma;
  sb.B = opt.B;
  sb.seed = opt.seed;
  sb.tau = opt.tau;

  std::vector<PartialRecord> records;
  json k_reports = json::array();
  for (int k : ks) {
    TestReport rep = opt.method == "sb"
                         ? partial_sb_test(x1, x2, z, k, pair, sb)
                         : partial_sn_test(x1, x2, z, k, pair, sn);
    double plain = cross_quantilogram(x1, x2, k, pair);
    const LagInterval& band = rep.intervals.front();
    records.push_back({pair.a1.value(), pair.a2.value(), k, band.rho, plain,
                       band.lo, band.hi});
    json jr = {{"k", k},
               {"rho_partial", band.rho},
               {"rho_plain", plain},
               {"ci_low", band.lo},
               {"ci_high", band.hi},
               {"statistic", rep.statistic},
               {"critical_value", rep.critical_value},
               {"reject", rep.reject}};
    if (!rep.warnings.empty()) jr["warnings"] = rep.warnings;
    k_reports.push_back(jr);
  }

  json report;
  report["config"] = json::object();
  for (const auto& [key, v] : cfg) report["config"][key] = v;
  report["lags"] = k_reports;
  std::filesystem::create_directories(opt.out_dir);
  std::string base = opt.out_dir + "/partial_";
  if (opt.format == "json") {
    atomic_write(base + hash + ".json", partial_records_json(records));
  } else {
    atomic_write(base + hash + ".csv", partial_records_csv(records));
  }
  atomic_write(base + "report_" + hash + ".json", report.dump(2) + "\n");
  std::cout << "wrote " << base << hash << " (+report)\n";
  return kExitOk;
}

struct McOptions {
  int dgp = 1;
  std::string method = "sb";
  std::vector<long> T{500};
  std::vector<int> p{1};
  std::vector<double> alpha{0.5};
  int nrep = 300;
  int B = 250;
  double omega = 0.1;
  double tau = 0.05;
  long burn_in = 500;
  std::uint64_t seed = 12345;
  std::string out_dir = ".";
  std::string table_path;
};

int run_mc(const McOptions& opt) {
  if (opt.dgp != 1 && opt.dgp != 2) {
    throw InvalidArgument("mc: --dgp must be 1 or 2");
  }
  ExperimentGrid grid;
  grid.dgp = opt.dgp == 1 ? DgpKind::IidNormal : DgpKind::GarchX;
  grid.alphas = opt.alpha;
  grid.lags = opt.p;
  grid.sample_sizes = opt.T;
  grid.method = opt.method == "sn" ? TestMethod::SelfNormalized
                                   : TestMethod::StationaryBootstrap;
  if (opt.method != "sb" && opt.method != "sn") {
    throw InvalidArgument("mc: --method must be sb or sn");
  }
  grid.nrep = opt.nrep;
  grid.B = opt.B;
  grid.omega = opt.omega;
  grid.tau = opt.tau;
  grid.burn_in = opt.burn_in;
  grid.seed = opt.seed;

  std::optional<CriticalValueTable> table;
  if (grid.method == TestMethod::SelfNormalized) {
    table = resolve_table(opt.table_path, opt.p, opt.omega, opt.tau, opt.seed);
    grid.table = &*table;
  }

  SizePowerTable result = run_size_power(grid);

  std::vector<std::pair<std::string, std::string>> cfg{
      {"cmd", "mc"},
      {"dgp", std::to_string(opt.dgp)},
      {"method", opt.method},
      {"T", [&] { std::ostringstream o; for (long t : opt.T) o << t << ';'; return o.str(); }()},
      {"p", [&] { std::ostringstream o; for (int p : opt.p) o << p << ';'; return o.str(); }()},
      {"alpha", join_doubles(opt.alpha)},
      {"nrep", std::to_string(opt.nrep)},
      {"B", std::to_string(opt.B)},
      {"omega", num(opt.omega)},
      {"tau", num(opt.tau)},
      {"seed", std::to_string(opt.seed)}};
  std::string hash = hash_hex(config_hash(canonical_config(cfg)));

  std::filesystem::create_directories(opt.out_dir);
  atomic_write(opt.out_dir + "/mc_" + hash + ".csv", size_power_csv(result));
  atomic_write(opt.out_dir + "/mc_" + hash + ".txt", size_power_text(result));
  std::cout << size_power_text(result);
  std::cout << "wrote " << opt.out_dir << "/mc_" << hash << ".{csv,txt}\n";
  return kExitOk;
}

struct CritvalOptions {
  std::vector<int> p{1, 2, 3, 4, 5};
  std::vector<double> omega{0.05, 0.1};
  std::vector<double> tau{0.10, 0.05, 0.01};
  int n_grid = 1000;
  long n_rep = 50000;
  std::uint64_t seed = 20260810;
  std::string out = "sn_critical_values.txt";
};

int run_critvals(const CritvalOptions& opt) {
  CriticalValueTable table;
  for (int p : opt.p) {
    for (double omega : opt.omega) {
      std::cerr << "simulating p=" << p << " omega=" << omega << " ...\n";
      for (const CriticalValueEntry& e : simulate_sn_critical_values(
               p, omega, opt.tau, opt.n_grid, opt.n_rep, opt.seed)) {
        table.add(e);
      }
    }
  }
  table.save(opt.out);
  std::cout << "wrote " << opt.out << " (" << table.entries().size()
            << " entries)\n";
  return kExitOk;
}

void add_common_flags(CLI::App* cmd, CommonOptions& opt, bool with_controls) {
  cmd->add_option("--input", opt.input, "input CSV file (header required)");
  cmd->add_option("--x1", opt.x1_col, "column of the predicted series");
  cmd->add_option("--x2", opt.x2_col, "column of the predicting series");
  if (with_controls) {
    cmd->add_option("--controls", opt.control_cols, "control column names")
        ->delimiter(',');
    cmd->add_option("--beta", opt.beta, "control quantile levels")
        ->delimiter(',');
  }
  cmd->add_option("--alpha1", opt.alpha1, "quantile level(s), predicted series")
      ->delimiter(',');
  cmd->add_option("--alpha2", opt.alpha2, "quantile level(s), predicting series")
      ->delimiter(',');
  cmd->add_option("--max-lag", opt.max_lag, "largest lag k (range 1..k)");
  cmd->add_option("--lags", opt.lags, "explicit lag list")->delimiter(',');
  cmd->add_option("--p", opt.p, "portmanteau lag count (default: max lag)");
  cmd->add_option("--method", opt.method, "sb or sn")
      ->check(CLI::IsMember({"sb", "sn"}));
  cmd->add_option("--B", opt.B, "bootstrap replicates");
  cmd->add_option("--gamma", opt.gamma,
                  "stationary-bootstrap gamma (omit for automatic)");
  cmd->add_option("--omega", opt.omega, "self-normalization trimming");
  cmd->add_option("--tau", opt.tau, "significance level");
  cmd->add_option("--seed", opt.seed, "random seed");
  cmd->add_option("--out", opt.out_dir, "output directory");
  cmd->add_option("--format", opt.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--table", opt.table_path, "critical-value table path");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cross-quantilogram tests for directional predictability"};
  app.require_subcommand(1);

  CommonOptions cq_opt;
  CLI::App* cq = app.add_subcommand(
      "cq", "cross-quantilogram with confidence bands and portmanteau tests");
  add_common_flags(cq, cq_opt, false);

  CommonOptions partial_opt;
  CLI::App* partial = app.add_subcommand(
      "partial", "partial cross-quantilogram under control variables");
  add_common_flags(partial, partial_opt, true);

  McOptions mc_opt;
  CLI::App* mc = app.add_subcommand("mc", "size/power experiment tables");
  mc->add_option("--dgp", mc_opt.dgp, "1 (iid normal) or 2 (GARCH-X)");
  mc->add_option("--method", mc_opt.method, "sb or sn")
      ->check(CLI::IsMember({"sb", "sn"}));
  mc->add_option("--T", mc_opt.T, "sample sizes")->delimiter(',');
  mc->add_option("--p", mc_opt.p, "lag counts")->delimiter(',');
  mc->add_option("--alpha", mc_opt.alpha, "equal-pair quantile levels")
      ->delimiter(',');
  mc->add_option("--nrep", mc_opt.nrep, "Monte Carlo replications");
  mc->add_option("--B", mc_opt.B, "bootstrap replicates per replication");
  mc->add_option("--omega", mc_opt.omega, "trimming (sn)");
  mc->add_option("--tau", mc_opt.tau, "nominal level");
  mc->add_option("--burn-in", mc_opt.burn_in, "GARCH-X burn-in");
  mc->add_option("--seed", mc_opt.seed, "random seed");
  mc->add_option("--out", mc_opt.out_dir, "output directory");
  mc->add_option("--table", mc_opt.table_path, "critical-value table path");

  CritvalOptions cv_opt;
  CLI::App* critvals = app.add_subcommand(
      "critvals", "simulate and write the self-normalized critical values");
  critvals->add_option("--p", cv_opt.p, "lag counts")->delimiter(',');
  critvals->add_option("--omega", cv_opt.omega, "trimming values")
      ->delimiter(',');
  critvals->add_option("--tau", cv_opt.tau, "significance levels")
      ->delimiter(',');
  critvals->add_option("--n-grid", cv_opt.n_grid, "Brownian grid points");
  critvals->add_option("--n-rep", cv_opt.n_rep, "simulation replications");
  critvals->add_option("--seed", cv_opt.seed, "random seed");
  critvals->add_option("--out", cv_opt.out, "output table path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (cq->parsed()) return run_cq(cq_opt);
    if (partial->parsed()) return run_partial(partial_opt);
    if (mc->parsed()) return run_mc(mc_opt);
    if (critvals->parsed()) return run_critvals(cv_opt);
    std::cerr << "no subcommand\n";
    return kExitConfig;
  } catch (const InvalidArgument& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const TableEntryMissingError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const Error& e) {
    std::cerr << "numerical degeneracy: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
