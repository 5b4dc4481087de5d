#include "taumax/config.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace taumax {

using nlohmann::json;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

const json& need(const json& j, const std::string& section, const char* key) {
  if (!j.contains(key)) throw ConfigError(section + "." + key + ": missing required field");
  return j.at(key);
}

double need_num(const json& j, const std::string& section, const char* key) {
  const json& v = need(j, section, key);
  if (!v.is_number()) throw ConfigError(section + "." + key + ": must be a number");
  return v.get<double>();
}

double opt_num(const json& j, const std::string& section, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_number()) throw ConfigError(section + "." + key + ": must be a number");
  return v.get<double>();
}

constexpr double kRpmToRadS = 2.0 * std::numbers::pi / 60.0;

}  // namespace

AnalysisConfig parse_config(const std::string& text) {
  const json j = parse_json(text);
  for (const char* sec : {"motor", "pi", "loop", "operating"})
    if (!j.contains(sec)) throw ConfigError(std::string(sec) + ": missing section");

  const json& jm = j.at("motor");
  const double ke_raw = need_num(jm, "motor", "ke");
  const json& keu = need(jm, "motor", "ke_unit");
  if (!keu.is_string()) throw ConfigError("motor.ke_unit: must be a string");
  double ke_si;
  if (keu == "V_per_rpm")
    ke_si = ke_raw / kRpmToRadS;
  else if (keu == "V_s_per_rad")
    ke_si = ke_raw;
  else
    throw ConfigError("motor.ke_unit: must be \"V_per_rpm\" or \"V_s_per_rad\"");

  auto guard = [](const char* field, auto&& make) {
    try {
      return make();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string(field) + ": " + e.what());
    }
  };

  MotorParams motor = guard("motor", [&] {
    return MotorParams(need_num(jm, "motor", "R_ohm"), need_num(jm, "motor", "L_h"),
                       need_num(jm, "motor", "J_kgm2"), ke_si,
                       need_num(jm, "motor", "kt_nm_per_a"),
                       opt_num(jm, "motor", "Bm_nms_per_rad", 0.0));
  });

  const json& jp = j.at("pi");
  PiParams pi = guard("pi", [&] {
    return PiParams(need_num(jp, "pi", "kp"), need_num(jp, "pi", "ki"));
  });

  const json& jl = j.at("loop");
  const bool has_tf = jl.contains("tau_f_s");
  const bool has_wf = jl.contains("omega_f_rad_s");
  if (has_tf == has_wf)
    throw ConfigError("loop: exactly one of tau_f_s / omega_f_rad_s is required");
  const double tau_f =
      has_tf ? need_num(jl, "loop", "tau_f_s") : 1.0 / need_num(jl, "loop", "omega_f_rad_s");
  LoopParams loop = guard("loop", [&] {
    return LoopParams(need_num(jl, "loop", "Vdc_v"), opt_num(jl, "loop", "kf", 1.0), tau_f,
                      need_num(jl, "loop", "tau_s_s"));
  });

  const json& jo = j.at("operating");
  OperatingPoint op = guard("operating", [&] {
    return OperatingPoint(need_num(jo, "operating", "omega_r_rpm") * kRpmToRadS);
  });

  AnalysisConfig cfg{motor, pi, loop, op, MarginOptions{}, SetpointLag::mech()};
  if (j.contains("options")) {
    const json& jx = j.at("options");
    cfg.margin.ladder_depth = static_cast<int>(opt_num(jx, "options", "ladder_depth", 4));
    if (cfg.margin.ladder_depth < 1) throw ConfigError("options.ladder_depth: must be >= 1");
    cfg.margin.residual_rel_tol =
        opt_num(jx, "options", "residual_rel_tol", cfg.margin.residual_rel_tol);
    if (jx.contains("setpoint_lag")) {
      const json& sl = jx.at("setpoint_lag");
      if (sl.is_number())
        cfg.setpoint_lag = SetpointLag::lag(sl.get<double>());
      else if (sl == "tau_mech")
        cfg.setpoint_lag = SetpointLag::mech();
      else if (sl == "full")
        cfg.setpoint_lag = SetpointLag::full();
      else
        throw ConfigError("options.setpoint_lag: must be \"tau_mech\", \"full\", or seconds");
    }
  }
  return cfg;
}

AnalysisConfig load_config(const std::string& path) { return parse_config(slurp(path)); }

SweepSpec parse_sweep_spec(const std::string& text) {
  const json j = parse_json(text);
  SweepSpec s;
  if (!j.contains("kp_grid")) throw ConfigError("kp_grid: missing section");
  const json& g = j.at("kp_grid");
  s.kp_grid.min = need_num(g, "kp_grid", "min");
  s.kp_grid.max = need_num(g, "kp_grid", "max");
  s.kp_grid.points = static_cast<int>(need_num(g, "kp_grid", "points"));
  if (g.contains("scale")) {
    if (g.at("scale") == "log")
      s.kp_grid.log_scale = true;
    else if (g.at("scale") == "linear")
      s.kp_grid.log_scale = false;
    else
      throw ConfigError("kp_grid.scale: must be \"log\" or \"linear\"");
  }
  if (!(s.kp_grid.min < s.kp_grid.max) || s.kp_grid.points < 1)
    throw ConfigError("kp_grid: need min < max and points >= 1");

  for (const char* key : {"tau_iw_multipliers", "omega_f_values"}) {
    const json& arr = need(j, "sweep", key);
    if (!arr.is_array() || arr.empty())
      throw ConfigError(std::string("sweep.") + key + ": must be a non-empty array");
    for (const json& v : arr) {
      if (!v.is_number()) throw ConfigError(std::string("sweep.") + key + ": must hold numbers");
      (key[0] == 't' ? s.tau_iw_multipliers : s.omega_f_values).push_back(v.get<double>());
    }
  }
  return s;
}

SweepSpec load_sweep_spec(const std::string& path) { return parse_sweep_spec(slurp(path)); }

SimConfig parse_sim_spec(const std::string& text) {
  const json j = parse_json(text);
  SimConfig c;
  c.dt = need_num(j, "sim", "dt_s");
  c.t_end = need_num(j, "sim", "t_end_s");
  c.initial_speed = opt_num(j, "sim", "initial_speed_rad_s",
                            opt_num(j, "sim", "initial_speed_rpm", 0.0) * kRpmToRadS);
  const json& in = need(j, "sim", "input");
  const json& type = need(in, "sim.input", "type");
  if (type == "setpoint_step") {
    c.input = SimConfig::InputKind::setpoint_step;
    if (in.contains("target_rad_s"))
      c.setpoint = need_num(in, "sim.input", "target_rad_s");
    else
      c.setpoint = need_num(in, "sim.input", "target_rpm") * kRpmToRadS;
  } else if (type == "load_step") {
    c.input = SimConfig::InputKind::load_step;
    c.load_torque = need_num(in, "sim.input", "torque_nm");
    c.load_t0 = need_num(in, "sim.input", "t0_s");
  } else {
    throw ConfigError("sim.input.type: must be \"setpoint_step\" or \"load_step\"");
  }
  return c;
}

SimConfig load_sim_spec(const std::string& path) { return parse_sim_spec(slurp(path)); }

// ------------------------------------------------------------------ commands

AnalysisReport analyze(const AnalysisConfig& cfg) {
  AnalysisReport r;
  r.tau_h = cfg.operating.tau_h();
  r.tau_total = cfg.operating.tau_total(cfg.loop.tau_s);

  const QuasiPolynomial load = ce_load(cfg.motor, cfg.pi, cfg.loop, r.tau_total);
  const DelayMarginResult load_res = tau_max(load, cfg.margin);
  r.tau_max_load = load_res.tau_max;
  r.critical_points = load_res.critical_points;

  const QuasiPolynomial sp = ce_setpoint(cfg.motor, cfg.pi, cfg.loop, r.tau_total, cfg.setpoint_lag);
  r.tau_max_setpoint = tau_max(sp, cfg.margin).tau_max;

  r.stable = r.tau_total < r.tau_max_load;
  r.margin_ratio = r.tau_max_load / r.tau_total;
  return r;
}

namespace {

// tau_max of the load CE for given PI gains; 0 stands in for a delay-free
// unstable loop so the calibration bisection stays monotone.
double load_tau_max_or_zero(const AnalysisConfig& cfg, const PiParams& pi, double vdc) {
  try {
    const LoopParams lp(vdc, cfg.loop.kf, cfg.loop.tau_f, cfg.loop.tau_s);
    return tau_max(ce_load(cfg.motor, pi, lp, 0.0), cfg.margin).tau_max;
  } catch (const std::runtime_error&) {
    return 0.0;
  }
}

}  // namespace

double calibrate_vdc(const AnalysisConfig& cfg) {
  const auto& table = tuning_rule_table();
  const TuningRule* chr = nullptr;
  for (const auto& r : table)
    if (r.name == "CHR-load") chr = &r;
  if (!chr) throw std::logic_error("tuning table lacks the CHR-load row");
  const PiParams gains = tuning_rule_gains(*chr);
  const double target = chr->tau_max_ms * 1e-3;

  double lo = 0.5, hi = 4000.0;
  double flo = load_tau_max_or_zero(cfg, gains, lo) - target;
  double fhi = load_tau_max_or_zero(cfg, gains, hi) - target;
  if (!(flo > 0.0) || !(fhi < 0.0))
    throw std::runtime_error("Vdc calibration bracket invalid for the CHR-load row");
  for (int it = 0; it < 200 && (hi - lo) > 1e-9 * lo; ++it) {
    const double mid = 0.5 * (lo + hi);
    ((load_tau_max_or_zero(cfg, gains, mid) - target) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

TuneTable tune_table(const AnalysisConfig& cfg) {
  TuneTable out;
  out.vdc_calibrated = calibrate_vdc(cfg);
  for (const TuningRule& rule : tuning_rule_table()) {
    TuneRow row{rule, 0.0, 0.0, 0.0};
    const PiParams gains = tuning_rule_gains(rule);
    row.tau_iw = gains.tau_iw();
    row.tau_max = load_tau_max_or_zero(cfg, gains, out.vdc_calibrated);
    row.ratio = row.tau_max / (rule.tau_max_ms * 1e-3);
    out.rows.push_back(std::move(row));
  }
  return out;
}

ValidateReport validate(const AnalysisConfig& cfg) {
  const double tau_total = cfg.operating.tau_total(cfg.loop.tau_s);
  return validate(cfg, ce_load(cfg.motor, cfg.pi, cfg.loop, tau_total));
}

ValidateReport validate(const AnalysisConfig& cfg, const QuasiPolynomial& ce) {
  ValidateReport r;
  r.tau_max_engine = tau_max(ce, cfg.margin).tau_max;

  if (std::isinf(r.tau_max_engine)) {
    r.note = "delay-independent: no destabilizing crossing, oracle skipped";
    return r;
  }
  try {
    const BldcLoop loop{cfg.motor, cfg.pi, cfg.loop};
    r.tau_oracle = stability_oracle(loop, 0.5 * r.tau_max_engine, 1.5 * r.tau_max_engine);
    r.rel_diff = std::abs(r.tau_oracle - r.tau_max_engine) / r.tau_max_engine;
    r.oracle_ran = true;
  } catch (const std::runtime_error& e) {
    r.note = e.what();
  }
  return r;
}

// ---------------------------------------------------------------- formatting

std::string fmt6(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string report_to_json(const AnalysisReport& r) {
  std::ostringstream o;
  o << "{\n";
  o << "  \"tau_h\": " << fmt6(r.tau_h) << ",\n";
  o << "  \"tau_total\": " << fmt6(r.tau_total) << ",\n";
  o << "  \"tau_max_load\": " << (std::isinf(r.tau_max_load) ? "\"inf\"" : fmt6(r.tau_max_load))
    << ",\n";
  o << "  \"tau_max_setpoint\": "
    << (std::isinf(r.tau_max_setpoint) ? "\"inf\"" : fmt6(r.tau_max_setpoint)) << ",\n";
  o << "  \"critical_points\": [";
  for (size_t i = 0; i < r.critical_points.size(); ++i) {
    const CriticalPoint& cp = r.critical_points[i];
    o << (i ? ",\n    " : "\n    ");
    o << "{\"T_cr\": " << fmt6(cp.t_cr) << ", \"omega_cr\": " << fmt6(cp.omega_cr)
      << ", \"root_tendency\": " << cp.root_tendency << ", \"tau_ladder\": [";
    for (size_t l = 0; l < cp.tau_ladder.size(); ++l)
      o << (l ? ", " : "") << fmt6(cp.tau_ladder[l]);
    o << "]}";
  }
  o << (r.critical_points.empty() ? "]" : "\n  ]") << ",\n";
  o << "  \"stable\": " << (r.stable ? "true" : "false") << ",\n";
  o << "  \"margin_ratio\": " << fmt6(r.margin_ratio) << "\n";
  o << "}\n";
  return o.str();
}

std::string sweep_to_csv(const std::vector<SweepRow>& rows) {
  std::ostringstream o;
  o << "kp,tau_iw,omega_f,tau_max\n";
  for (const SweepRow& r : rows) {
    o << fmt6(r.kp) << ',' << fmt6(r.tau_iw) << ',' << fmt6(r.omega_f) << ',';
    if (!r.error.empty())
      o << "error=" << r.error;
    else
      o << fmt6(r.tau_max);
    o << '\n';
  }
  return o.str();
}

std::string tune_table_to_csv(const TuneTable& t) {
  std::ostringstream o;
  o << "rule,kp,ki,tau_iw_s,tau_max_published_ms,tau_max_ms,ratio,vdc_v\n";
  for (const TuneRow& r : t.rows) {
    const PiParams g = tuning_rule_gains(r.rule);
    o << r.rule.name << ',' << fmt6(g.kp) << ',' << fmt6(g.ki) << ',' << fmt6(r.tau_iw) << ','
      << fmt6(r.rule.tau_max_ms) << ',' << fmt6(r.tau_max * 1e3) << ',' << fmt6(r.ratio) << ','
      << fmt6(t.vdc_calibrated) << '\n';
  }
  return o.str();
}

std::string tune_table_to_json(const TuneTable& t) {
  std::ostringstream o;
  o << "{\n  \"vdc_calibrated_v\": " << fmt6(t.vdc_calibrated) << ",\n  \"rows\": [";
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const TuneRow& r = t.rows[i];
    const PiParams g = tuning_rule_gains(r.rule);
    o << (i ? ",\n    " : "\n    ");
    o << "{\"rule\": \"" << r.rule.name << "\", \"kp\": " << fmt6(g.kp)
      << ", \"ki\": " << fmt6(g.ki) << ", \"tau_iw_s\": " << fmt6(r.tau_iw)
      << ", \"tau_max_published_ms\": " << fmt6(r.rule.tau_max_ms)
      << ", \"tau_max_ms\": " << fmt6(r.tau_max * 1e3) << ", \"ratio\": " << fmt6(r.ratio) << "}";
  }
  o << "\n  ]\n}\n";
  return o.str();
}

std::string validate_to_json(const ValidateReport& r) {
  std::ostringstream o;
  o << "{\n";
  o << "  \"tau_max_engine\": "
    << (std::isinf(r.tau_max_engine) ? "\"inf\"" : fmt6(r.tau_max_engine)) << ",\n";
  if (r.oracle_ran) {
    o << "  \"tau_oracle\": " << fmt6(r.tau_oracle) << ",\n";
    o << "  \"rel_diff\": " << fmt6(r.rel_diff) << ",\n";
  }
  o << "  \"oracle_ran\": " << (r.oracle_ran ? "true" : "false");
  if (!r.note.empty()) o << ",\n  \"note\": \"" << r.note << "\"";
  o << "\n}\n";
  return o.str();
}

}  // namespace taumax
