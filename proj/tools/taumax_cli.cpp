#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "taumax/config.hpp"
#include "taumax/dde_sim.hpp"

namespace {

constexpr int kExitStable = 0;
constexpr int kExitUnstable = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + out_path + " for writing");
  f << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Maximum stable loop delay of BLDC speed-control loops"};
  app.require_subcommand(1);

  std::string config_path, out_path, format = "json";
  std::string sweep_path, sim_path;
  bool serial = false;

  auto add_common = [&](CLI::App* cmd, const char* default_format) {
    cmd->add_option("--config", config_path, "analysis config file (JSON)")->required();
    cmd->add_option("--out", out_path, "write output to file instead of stdout");
    format = default_format;
    cmd->add_option("--format", format, "output format: csv|json");
  };

  CLI::App* analyze = app.add_subcommand("analyze", "delay margin of the configured loop");
  add_common(analyze, "json");

  CLI::App* sweep = app.add_subcommand("sweep", "tau_max over a kp/tau_iw/omega_f grid");
  add_common(sweep, "csv");
  sweep->add_option("--sweep", sweep_path, "sweep spec file (JSON)")->required();
  sweep->add_flag("--serial", serial, "run the grid on one thread");

  CLI::App* tune = app.add_subcommand("tune-table", "tuning-rule comparison table");
  add_common(tune, "csv");

  CLI::App* simulate_cmd = app.add_subcommand("simulate", "time-domain trace of the loop");
  add_common(simulate_cmd, "csv");
  simulate_cmd->add_option("--sim", sim_path, "simulation scenario file (JSON)")->required();

  CLI::App* validate_cmd = app.add_subcommand("validate", "engine vs time-domain oracle");
  add_common(validate_cmd, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    const taumax::AnalysisConfig cfg = taumax::load_config(config_path);

    if (analyze->parsed()) {
      const taumax::AnalysisReport rep = taumax::analyze(cfg);
      emit(taumax::report_to_json(rep), out_path);
      return rep.stable ? kExitStable : kExitUnstable;
    }
    if (sweep->parsed()) {
      const taumax::SweepSpec spec = taumax::load_sweep_spec(sweep_path);
      const auto rows = taumax::run_sweep(cfg.motor, cfg.loop, spec, !serial);
      emit(taumax::sweep_to_csv(rows), out_path);
      return 0;
    }
    if (tune->parsed()) {
      const taumax::TuneTable t = taumax::tune_table(cfg);
      emit(format == "json" ? taumax::tune_table_to_json(t) : taumax::tune_table_to_csv(t),
           out_path);
      return 0;
    }
    if (simulate_cmd->parsed()) {
      taumax::SimConfig sim = taumax::load_sim_spec(sim_path);
      const double tau_total = cfg.operating.tau_total(cfg.loop.tau_s);
      const taumax::Trace tr = taumax::simulate(cfg.motor, cfg.pi, cfg.loop, tau_total, sim);
      if (out_path.empty())
        taumax::write_trace(tr, std::cout);
      else
        taumax::export_trace(tr, out_path);
      return 0;
    }
    if (validate_cmd->parsed()) {
      const taumax::ValidateReport rep = taumax::validate(cfg);
      emit(taumax::validate_to_json(rep), out_path);
      return 0;
    }
  } catch (const taumax::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitUsage;
}
