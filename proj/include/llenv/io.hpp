#pragma once

// CSV emission and flat key=value config files shared by the CLI and the
// experiment reports.  Numeric CSV fields always use 17 significant digits
// so that identical runs produce byte-identical files.

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "llenv/experiments.hpp"

namespace llenv {

inline std::string format_full(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw std::runtime_error("cannot open for writing: " + path);
  }

  void header(const std::vector<std::string>& cols) { row_strings(cols); }

  void row_strings(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out_ << ',';
      if (cells[i].find_first_of(",\"") != std::string::npos) {
        out_ << '"';
        for (char c : cells[i]) {
          if (c == '"') out_ << '"';
          out_ << c;
        }
        out_ << '"';
      } else {
        out_ << cells[i];
      }
    }
    out_ << '\n';
    if (!out_) throw std::runtime_error("CSV write failed");
  }

  // Mixed row: strings pass through, doubles use the full-precision format.
  void row(const std::vector<std::string>& head, const std::vector<double>& nums) {
    std::vector<std::string> cells = head;
    for (double v : nums) cells.push_back(format_full(v));
    row_strings(cells);
  }

 private:
  std::ofstream out_;
};

// Per-trial rows: trial, method, ber, rmse, sensitivity, specificity, cost.
inline void write_trials_csv(const ExperimentReport& rep,
                             const std::string& path) {
  CsvWriter csv(path);
  csv.header({"trial", "method", "ber", "rmse", "sensitivity", "specificity",
              "cost"});
  const std::size_t trials = rep.rows.empty() ? 0 : rep.rows[0].size();
  for (std::size_t t = 0; t < trials; ++t)
    for (std::size_t m = 0; m < rep.methods.size(); ++m) {
      const TrialMetrics& r = rep.rows[m][t];
      csv.row({std::to_string(t), rep.methods[m]},
              {r.ber, r.rmse, r.sensitivity, r.specificity, r.cost});
    }
}

// Flat key=value files; '#' starts a comment, blank lines are skipped.
class Config {
 public:
  Config() = default;

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      const auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r'; };
      std::size_t b = 0, e = line.size();
      while (b < e && is_space(line[b])) ++b;
      while (e > b && is_space(line[e - 1])) --e;
      if (b == e) continue;
      const std::string entry = line.substr(b, e - b);
      const auto eq = entry.find('=');
      if (eq == std::string::npos || eq == 0)
        throw std::runtime_error("config line " + std::to_string(lineno) +
                                 ": expected key=value, got '" + entry + "'");
      std::string key = entry.substr(0, eq);
      std::string val = entry.substr(eq + 1);
      while (!key.empty() && is_space(key.back())) key.pop_back();
      std::size_t vb = 0;
      while (vb < val.size() && is_space(val[vb])) ++vb;
      cfg.values_[key] = val.substr(vb);
    }
    return cfg;
  }

  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& dflt) const {
    auto it = values_.find(key);
    return it == values_.end() ? dflt : it->second;
  }

  double get_double(const std::string& key, double dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    if (it->second == "inf" || it->second == "+inf")
      return std::numeric_limits<double>::infinity();
    try {
      std::size_t pos = 0;
      const double v = std::stod(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "': bad number '" +
                               it->second + "'");
    }
  }

  long long get_int(const std::string& key, long long dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    try {
      std::size_t pos = 0;
      const long long v = std::stoll(it->second, &pos);
      if (pos != it->second.size()) throw std::invalid_argument("trailing");
      return v;
    } catch (const std::exception&) {
      throw std::runtime_error("config key '" + key + "': bad integer '" +
                               it->second + "'");
    }
  }

  // Comma-separated list of doubles.
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& dflt) const {
    auto it = values_.find(key);
    if (it == values_.end()) return dflt;
    std::vector<double> out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      try {
        out.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw std::runtime_error("config key '" + key + "': bad number '" +
                                 tok + "'");
      }
    }
    if (out.empty())
      throw std::runtime_error("config key '" + key + "': empty list");
    return out;
  }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace llenv
