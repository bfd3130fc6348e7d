#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xqgram {

// Per-lag confidence interval for the cross-quantilogram.
struct LagInterval {
  int k = 0;
  double rho = 0.0;
  double lo = 0.0;
  double hi = 0.0;
};

// Outcome of one hypothesis test, with enough configuration echo to rerun it.
struct TestReport {
  std::string method;          // "sb" or "sn"
  std::string statistic_name;  // e.g. "q_box_ljung", "s_self_normalized"
  double statistic = 0.0;
  double critical_value = 0.0;
  bool reject = false;
  double tau = 0.0;
  long T = 0;
  int p = 0;
  double alpha1 = 0.0;
  double alpha2 = 0.0;
  std::vector<LagInterval> intervals;  // SB band; empty for SN omnibus
  std::vector<std::string> warnings;
  // Method-specific configuration echo (gamma, B, seed, omega, table
  // provenance, ...), in emission order.
  std::vector<std::pair<std::string, std::string>> config;

  void echo(std::string key, std::string value) {
    config.emplace_back(std::move(key), std::move(value));
  }
};

}  // namespace xqgram
