#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ptinterp {

/// Per-level record of a convergence or verification experiment. Rows are
/// kept sorted by decreasing h_x; fitted rates use the last three levels.
struct ExperimentReport {
  std::string command;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<std::string> notes;

  std::vector<std::string> columns;
  struct Row {
    int level = 0;
    double h_t = 0.0;
    double h_x = 0.0;
    std::vector<double> metrics;
  };
  std::vector<Row> rows;
  std::vector<std::pair<std::string, double>> rates;

  bool passed = true;
  std::vector<std::string> failures;

  void add_row(Row row);
  int column_index(const std::string& name) const;
  void fail(const std::string& message);

  void write_csv(const std::string& path) const;
  nlohmann::json to_json() const;
  void write_json(const std::string& path) const;
};

/// Least-squares slope of log(metric) against log(h_x) over the last three
/// levels. Requires >= 3 levels and positive entries.
double fit_rate(const ExperimentReport& report, const std::string& column);

}  // namespace ptinterp
