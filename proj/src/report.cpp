#include "ptinterp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace ptinterp {

void ExperimentReport::add_row(Row row) {
  if (row.metrics.size() != columns.size()) {
    throw std::invalid_argument("report row has wrong number of metrics");
  }
  if (!rows.empty() && row.h_x > rows.back().h_x) {
    throw std::invalid_argument("report rows must have non-increasing h_x");
  }
  rows.push_back(std::move(row));
}

int ExperimentReport::column_index(const std::string& name) const {
  auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw std::invalid_argument("unknown report column " + name);
  return static_cast<int>(it - columns.begin());
}

void ExperimentReport::fail(const std::string& message) {
  passed = false;
  failures.push_back(message);
}

void ExperimentReport::write_csv(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os.precision(17);
  os << "level,h_t,h_x";
  for (const auto& c : columns) os << ',' << c;
  os << '\n';
  for (const auto& r : rows) {
    os << r.level << ',' << r.h_t << ',' << r.h_x;
    for (double m : r.metrics) os << ',' << m;
    os << '\n';
  }
}

nlohmann::json ExperimentReport::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["seed"] = seed;
  j["config_digest"] = config_digest;
  j["notes"] = notes;
  j["columns"] = columns;
  nlohmann::ordered_json rws = nlohmann::json::array();
  for (const auto& r : rows) {
    nlohmann::ordered_json row;
    row["level"] = r.level;
    row["h_t"] = r.h_t;
    row["h_x"] = r.h_x;
    row["metrics"] = r.metrics;
    rws.push_back(row);
  }
  j["rows"] = rws;
  nlohmann::ordered_json rt = nlohmann::json::object();
  for (const auto& [name, value] : rates) rt[name] = value;
  j["rates"] = rt;
  j["passed"] = passed;
  j["failures"] = failures;
  return j;
}

void ExperimentReport::write_json(const std::string& path) const {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  os << to_json().dump(2) << '\n';
}

double fit_rate(const ExperimentReport& report, const std::string& column) {
  if (report.rows.size() < 3) throw std::invalid_argument("rate fit needs >= 3 levels");
  const int col = report.column_index(column);
  const std::size_t n0 = report.rows.size() - 3;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = n0; i < report.rows.size(); ++i) {
    const double e = report.rows[i].metrics[col];
    const double h = report.rows[i].h_x;
    if (!(e > 0.0) || !(h > 0.0)) {
      throw std::invalid_argument("rate fit needs positive entries");
    }
    const double x = std::log(h), y = std::log(e);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = 3.0;
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace ptinterp
