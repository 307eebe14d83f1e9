#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "ptinterp/field.hpp"
#include "ptinterp/report.hpp"

namespace ptinterp::lab {

/// Run configuration shared by the five commands. Parsed from a JSON document
/// (unknown keys rejected); CLI flags override document fields.
struct RunConfig {
  std::string command;
  double T = 1.0;
  double L = 1.0;
  int base_n = 0;  // 0 = command default (commute 4, converge 8,
                   // counterexample 2, localize 8)
  int levels = 4;
  double alpha = 1.0;
  int k = 1;
  int ell = 1;
  std::string op = "ix_tensor";          // ix_tensor | ix_tensor_prime | ix_irregular
  std::string solution = "heat-mode-1";  // heat-mode-1 | heat-mode-3 |
                                         // poly-separable | rough-in-time
  std::uint64_t seed = 20260809;
  std::string out_dir = "out";
  std::string constants_file = "frozen_constants.json";
  bool freeze = false;
  bool fault_inject = false;
  int period = 4;
  int refine = 8;
  int dump_field_res = 0;    // > 0: write field snapshots on an n x n grid
  std::string mesh_file;     // commute only: tensor mesh JSON to verify on

  static RunConfig from_json(const nlohmann::json& doc);
  nlohmann::json to_json() const;
  std::string digest() const;
};

/// Regression bounds measured on a reference run and committed with the
/// repository; regenerated only behind --freeze.
struct FrozenConstants {
  double poincare_cpp = -1.0;
  double poincare_sharpness = -1.0;
  double counterexample_r0 = -1.0;
  double localization_c1 = -1.0;
  double localization_c2 = -1.0;

  static FrozenConstants load(const std::string& path);
  void save(const std::string& path) const;  // merges into an existing file
};

AnalyticField manufactured_solution(const std::string& name, double T, double L);
AnalyticField manufactured_flux(const std::string& name, double T, double L);

ExperimentReport run_commute(const RunConfig& config);
ExperimentReport run_poincare(const RunConfig& config);
ExperimentReport run_converge(const RunConfig& config);
ExperimentReport run_counterexample(const RunConfig& config);
ExperimentReport run_localize(const RunConfig& config);

/// Dispatch on config.command, write report.json / table.csv / mesh.json into
/// config.out_dir. Returns the process exit code: 0 iff every assertion held.
int run_command(const RunConfig& config);

}  // namespace ptinterp::lab
