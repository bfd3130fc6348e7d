#include "xqgram/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "xqgram/errors.hpp"

namespace xqgram {

namespace {

using nlohmann::json;

// Splits one CSV line, honoring double-quoted fields with "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(field);
      field.clear();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  fields.push_back(field);
  return fields;
}

bool parse_double(const std::string& cell, double& out) {
  const char* begin = cell.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  if (end == begin) return false;
  while (*end == ' ' || *end == '\t') ++end;
  return *end == '\0';
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

// Shortest representation that parses back to the same double.
void format_double(std::ostream& out, double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  out.write(buf, res.ptr - buf);
}

}  // namespace

std::map<std::string, std::vector<double>> read_csv_columns(
    const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open input file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty input file: " + path);
  std::vector<std::string> header = split_csv_line(line);
  for (auto& h : header) h = trim(h);

  std::map<std::string, size_t> position;
  for (size_t i = 0; i < header.size(); ++i) position[header[i]] = i;

  // Duplicate requests map to one read of the shared column.
  std::vector<std::string> unique;
  std::vector<size_t> want;
  for (const std::string& name : columns) {
    bool seen = false;
    for (const std::string& u : unique) seen = seen || u == name;
    if (seen) continue;
    auto it = position.find(name);
    if (it == position.end()) throw MissingColumnError(name);
    unique.push_back(name);
    want.push_back(it->second);
  }

  std::map<std::string, std::vector<double>> out;
  for (const std::string& c : unique) out[c];

  long row = 1;  // header was row 1
  while (std::getline(in, line)) {
    ++row;
    if (line.empty() || line == "\r") continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != header.size()) {
      throw LengthMismatchError("row " + std::to_string(row) + " has " +
                                std::to_string(cells.size()) +
                                " cells, header has " +
                                std::to_string(header.size()));
    }
    for (size_t c = 0; c < unique.size(); ++c) {
      double v;
      std::string cell = trim(cells[want[c]]);
      if (cell.empty() || !parse_double(cell, v)) {
        throw NonNumericCellError(row, unique[c]);
      }
      out[unique[c]].push_back(v);
    }
  }
  return out;
}

std::string rho_records_csv(const std::vector<RhoRecord>& records) {
  std::ostringstream out;
  out << "alpha1,alpha2,k,rho_hat,ci_low,ci_high\n";
  for (const RhoRecord& r : records) {
    format_double(out, r.alpha1);
    out << ',';
    format_double(out, r.alpha2);
    out << ',' << r.k << ',';
    format_double(out, r.rho);
    out << ',';
    format_double(out, r.ci_low);
    out << ',';
    format_double(out, r.ci_high);
    out << '\n';
  }
  return out.str();
}

std::string q_records_csv(const std::vector<QRecord>& records) {
  std::ostringstream out;
  out << "alpha1,alpha2,p,Q,critical_value\n";
  for (const QRecord& r : records) {
    format_double(out, r.alpha1);
    out << ',';
    format_double(out, r.alpha2);
    out << ',' << r.p << ',';
    format_double(out, r.q);
    out << ',';
    format_double(out, r.critical_value);
    out << '\n';
  }
  return out.str();
}

std::string partial_records_csv(const std::vector<PartialRecord>& records) {
  std::ostringstream out;
  out << "alpha1,alpha2,k,rho_partial,rho_plain,ci_low,ci_high\n";
  for (const PartialRecord& r : records) {
    format_double(out, r.alpha1);
    out << ',';
    format_double(out, r.alpha2);
    out << ',' << r.k << ',';
    format_double(out, r.rho_partial);
    out << ',';
    format_double(out, r.rho_plain);
    out << ',';
    format_double(out, r.ci_low);
    out << ',';
    format_double(out, r.ci_high);
    out << '\n';
  }
  return out.str();
}

std::string rho_records_json(const std::vector<RhoRecord>& records) {
  json arr = json::array();
  for (const RhoRecord& r : records) {
    arr.push_back({{"alpha1", r.alpha1},
                   {"alpha2", r.alpha2},
                   {"k", r.k},
                   {"rho_hat", r.rho},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high}});
  }
  return arr.dump(2) + "\n";
}

std::string q_records_json(const std::vector<QRecord>& records) {
  json arr = json::array();
  for (const QRecord& r : records) {
    arr.push_back({{"alpha1", r.alpha1},
                   {"alpha2", r.alpha2},
                   {"p", r.p},
                   {"Q", r.q},
                   {"critical_value", r.critical_value}});
  }
  return arr.dump(2) + "\n";
}

std::string partial_records_json(const std::vector<PartialRecord>& records) {
  json arr = json::array();
  for (const PartialRecord& r : records) {
    arr.push_back({{"alpha1", r.alpha1},
                   {"alpha2", r.alpha2},
                   {"k", r.k},
                   {"rho_partial", r.rho_partial},
                   {"rho_plain", r.rho_plain},
                   {"ci_low", r.ci_low},
                   {"ci_high", r.ci_high}});
  }
  return arr.dump(2) + "\n";
}

std::vector<RhoRecord> parse_rho_records_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw DataError("empty rho record text");
  std::vector<RhoRecord> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != 6) throw DataError("malformed rho record line");
    RhoRecord r;
    r.alpha1 = std::stod(cells[0]);
    r.alpha2 = std::stod(cells[1]);
    r.k = std::stoi(cells[2]);
    r.rho = std::stod(cells[3]);
    r.ci_low = std::stod(cells[4]);
    r.ci_high = std::stod(cells[5]);
    out.push_back(r);
  }
  return out;
}

std::string report_json(const TestReport& report) {
  json j;
  j["method"] = report.method;
  j["statistic_name"] = report.statistic_name;
  j["statistic"] = report.statistic;
  j["critical_value"] = report.critical_value;
  j["reject"] = report.reject;
  j["tau"] = report.tau;
  j["T"] = report.T;
  j["p"] = report.p;
  j["alpha1"] = report.alpha1;
  j["alpha2"] = report.alpha2;
  json intervals = json::array();
  for (const LagInterval& i : report.intervals) {
    intervals.push_back(
        {{"k", i.k}, {"rho", i.rho}, {"ci_low", i.lo}, {"ci_high", i.hi}});
  }
  j["intervals"] = intervals;
  j["warnings"] = report.warnings;
  json cfg = json::object();
  for (const auto& [key, value] : report.config) cfg[key] = value;
  j["config"] = cfg;
  return j.dump(2) + "\n";
}

std::string report_csv(const TestReport& report) {
  std::ostringstream out;
  out << "key,value\n";
  auto kv = [&out](const std::string& k, const std::string& v) {
    out << k << ',' << v << '\n';
  };
  kv("method", report.method);
  kv("statistic_name", report.statistic_name);
  {
    std::ostringstream v;
    format_double(v, report.statistic);
    kv("statistic", v.str());
  }
  {
    std::ostringstream v;
    format_double(v, report.critical_value);
    kv("critical_value", v.str());
  }
  kv("reject", report.reject ? "true" : "false");
  {
    std::ostringstream v;
    format_double(v, report.tau);
    kv("tau", v.str());
  }
  kv("T", std::to_string(report.T));
  kv("p", std::to_string(report.p));
  {
    std::ostringstream v;
    format_double(v, report.alpha1);
    kv("alpha1", v.str());
  }
  {
    std::ostringstream v;
    format_double(v, report.alpha2);
    kv("alpha2", v.str());
  }
  for (const auto& [key, value] : report.config) kv(key, value);
  for (size_t i = 0; i < report.warnings.size(); ++i) {
    kv("warning" + std::to_string(i + 1), report.warnings[i]);
  }
  return out.str();
}

std::uint64_t config_hash(const std::string& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hash_hex(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

void atomic_write(const std::string& path, const std::string& content) {
  std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp);
    out << content;
    if (!out) throw DataError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    throw DataError("rename failed: " + tmp + " -> " + path);
  }
}

}  // namespace xqgram
