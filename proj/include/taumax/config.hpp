#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "taumax/bldc.hpp"
#include "taumax/dde_sim.hpp"
#include "taumax/delay_margin.hpp"
#include "taumax/sweep.hpp"

namespace taumax {

/// Configuration / schema problem; message names the offending field.
class ConfigError : public std::runtime_error {
public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Parsed analysis configuration. ke accepts V_per_rpm or V_s_per_rad via a
/// mandatory unit tag; exactly one of tau_f_s / omega_f_rad_s is allowed.
struct AnalysisConfig {
  MotorParams motor;
  PiParams pi;
  LoopParams loop;
  OperatingPoint operating;
  MarginOptions margin;
  SetpointLag setpoint_lag;
};

AnalysisConfig load_config(const std::string& path);
AnalysisConfig parse_config(const std::string& json_text);

SweepSpec load_sweep_spec(const std::string& path);
SweepSpec parse_sweep_spec(const std::string& json_text);

/// Simulation scenario; becomes a SimConfig once the loop delay is known.
SimConfig load_sim_spec(const std::string& path);
SimConfig parse_sim_spec(const std::string& json_text);

// ---------------------------------------------------------------- commands

struct AnalysisReport {
  double tau_h = 0.0;
  double tau_total = 0.0;
  double tau_max_load = 0.0;
  double tau_max_setpoint = 0.0;
  std::vector<CriticalPoint> critical_points;  // of the load CE
  bool stable = false;                         // tau_total < tau_max_load
  double margin_ratio = 0.0;                   // tau_max_load / tau_total
};

AnalysisReport analyze(const AnalysisConfig& cfg);

struct TuneRow {
  TuningRule rule;
  double tau_iw = 0.0;       // s, from the gains actually used
  double tau_max = 0.0;      // s, recomputed
  double ratio = 0.0;        // recomputed / published
};

struct TuneTable {
  double vdc_calibrated = 0.0;
  std::vector<TuneRow> rows;
};

/// Bisect Vdc so that the CHR-load row reproduces its published tau_max,
/// then recompute every row at that voltage.
TuneTable tune_table(const AnalysisConfig& cfg);
double calibrate_vdc(const AnalysisConfig& cfg);

struct ValidateReport {
  double tau_max_engine = 0.0;
  double tau_oracle = 0.0;
  double rel_diff = 0.0;
  bool oracle_ran = false;
  std::string note;
};

/// Engine tau_max of the load CE cross-checked by time-domain bisection at
/// 0.5x / 1.5x. Bracket failures are reported, not thrown; a
/// delay-independent engine result skips the oracle with a note.
ValidateReport validate(const AnalysisConfig& cfg);
ValidateReport validate(const AnalysisConfig& cfg, const QuasiPolynomial& ce);

// ------------------------------------------------------------- formatting

/// 6 significant digits; infinities render as the literal "inf".
std::string fmt6(double v);

std::string report_to_json(const AnalysisReport& r);
std::string sweep_to_csv(const std::vector<SweepRow>& rows);
std::string tune_table_to_csv(const TuneTable& t);
std::string tune_table_to_json(const TuneTable& t);
std::string validate_to_json(const ValidateReport& r);

}  // namespace taumax
