#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "xqgram/report.hpp"
#include "xqgram/types.hpp"

namespace xqgram {

// Named numeric columns pulled from one CSV file. Header row required;
// any missing or non-numeric cell in a selected column is an error (no
// imputation), reported with its row number.
std::map<std::string, std::vector<double>> read_csv_columns(
    const std::string& path, const std::vector<std::string>& columns);

// Long-format cross-quantilogram record with its confidence band.
struct RhoRecord {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int k = 0;
  double rho = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Portmanteau record per accumulated lag count.
struct QRecord {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int p = 0;
  double q = 0.0;
  double critical_value = 0.0;
};

// Partial cross-quantilogram record; the plain value rides along for
// comparison.
struct PartialRecord {
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  int k = 0;
  double rho_partial = 0.0;
  double rho_plain = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

std::string rho_records_csv(const std::vector<RhoRecord>& records);
std::string q_records_csv(const std::vector<QRecord>& records);
std::string partial_records_csv(const std::vector<PartialRecord>& records);
std::string rho_records_json(const std::vector<RhoRecord>& records);
std::string q_records_json(const std::vector<QRecord>& records);
std::string partial_records_json(const std::vector<PartialRecord>& records);

std::vector<RhoRecord> parse_rho_records_csv(const std::string& text);

std::string report_json(const TestReport& report);
std::string report_csv(const TestReport& report);

// FNV-1a hash of a canonical configuration string; names output files so
// identical configurations map to identical paths.
std::uint64_t config_hash(const std::string& canonical);
std::string hash_hex(std::uint64_t h);

// Write-then-rename so partially written outputs never appear under the
// final name.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace xqgram
