#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptinterp/lab.hpp"

int main(int argc, char** argv) {
  CLI::App app{"ptinterp: space-time interpolation operator laboratory"};
  app.require_subcommand(1);

  std::string config_file, out_dir, constants_file;
  std::uint64_t seed = 0;
  bool freeze = false, fault = false;

  const char* commands[] = {"commute", "poincare", "converge", "counterexample",
                            "localize"};
  const char* blurbs[] = {
      "verify every commuting-diagram identity on seeded random suites",
      "anisotropy sweep of the mean-value inequality with frozen bounds",
      "convergence study against a manufactured solution",
      "time oscillation of the nodal interpolant on locally refined meshes",
      "patchwise dual-norm localization constants and weight-exponent sweep"};
  for (int i = 0; i < 5; ++i) {
    CLI::App* sub = app.add_subcommand(commands[i], blurbs[i]);
    sub->add_option("--config", config_file, "JSON configuration file");
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed override");
    sub->add_option("--constants", constants_file, "frozen constants file");
    sub->add_flag("--freeze", freeze, "regenerate the frozen regression constants");
    sub->add_flag("--fault-inject", fault, "negative control: corrupt the measured data");
  }

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  try {
    nlohmann::json doc = nlohmann::json::object();
    if (!config_file.empty()) {
      std::ifstream is(config_file);
      if (!is) throw std::runtime_error("cannot open config " + config_file);
      doc = nlohmann::json::parse(is);
    }
    ptinterp::lab::RunConfig cfg = ptinterp::lab::RunConfig::from_json(doc);
    cfg.command = sub->get_name();
    if (sub->count("--out")) cfg.out_dir = out_dir;
    if (sub->count("--seed")) cfg.seed = seed;
    if (sub->count("--constants")) cfg.constants_file = constants_file;
    if (freeze) cfg.freeze = true;
    if (fault) cfg.fault_inject = true;

    const int code = ptinterp::lab::run_command(cfg);
    std::cout << (code == 0 ? "PASS" : "FAIL") << ": " << cfg.command
              << " (report in " << cfg.out_dir << ")\n";
    return code;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
}
