#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <sstream>

#include "taumax/config.hpp"
#include "taumax/dde_sim.hpp"

using namespace taumax;

namespace {

constexpr double kRpm = 2.0 * std::numbers::pi / 60.0;

std::string fixture(const char* name) { return std::string(TAUMAX_FIXTURE_DIR) + "/" + name; }

std::string base_config_json(double kp = 1.024e-3, double ki = 65.43e-3, double rpm = 6000.0) {
  std::ostringstream o;
  o << R"({
  "motor": {"R_ohm": 2.3, "L_h": 0.56e-3, "J_kgm2": 16.0e-7,
            "ke": 0.00234, "ke_unit": "V_per_rpm", "kt_nm_per_a": 0.0223},
  "pi": {"kp": )"
    << kp << ", \"ki\": " << ki << R"(},
  "loop": {"Vdc_v": 24.0178, "kf": 1.0, "tau_f_s": 3.48e-3, "tau_s_s": 1.0e-3},
  "operating": {"omega_r_rpm": )"
    << rpm << "}\n}\n";
  return o.str();
}

std::string run_cli(const std::string& args, int* exit_code) {
  const std::string out = "cli_out_tmp.txt";
  const std::string cmd = std::string(TAUMAX_CLI_PATH) + " " + args + " > " + out + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  *exit_code = WEXITSTATUS(rc);
  std::ifstream f(out);
  std::ostringstream ss;
  ss << f.rdbuf();
  std::remove(out.c_str());
  return ss.str();
}

}  // namespace

TEST_CASE("config parsing and the ke unit tag") {
  const AnalysisConfig cfg = parse_config(base_config_json());
  CHECK(cfg.motor.ke == doctest::Approx(0.02235).epsilon(1e-3));
  CHECK(cfg.motor.tau_mech() == doctest::Approx(7.37e-3).epsilon(2e-2));
  CHECK(cfg.loop.tau_f == doctest::Approx(3.48e-3));

  // SI tag taken verbatim
  std::string si = base_config_json();
  si.replace(si.find("V_per_rpm"), 9, "V_s_per_rad");
  CHECK(parse_config(si).motor.ke == doctest::Approx(0.00234));
}

TEST_CASE("schema violations carry field-level messages") {
  CHECK_THROWS_WITH(parse_config("{"), doctest::Contains("invalid JSON"));
  CHECK_THROWS_WITH(parse_config("{}"), doctest::Contains("motor"));

  std::string no_unit = base_config_json();
  const std::string tag = "\"ke_unit\": \"V_per_rpm\", ";
  no_unit.replace(no_unit.find(tag), tag.size(), "");
  CHECK_THROWS_WITH(parse_config(no_unit), doctest::Contains("motor.ke_unit"));

  std::string bad_unit = base_config_json();
  bad_unit.replace(bad_unit.find("V_per_rpm"), 9, "volts");
  CHECK_THROWS_WITH(parse_config(bad_unit), doctest::Contains("motor.ke_unit"));

  // degenerate gains stop before any analysis
  CHECK_THROWS_WITH(parse_config(base_config_json(1.024e-3, 0.0)), doctest::Contains("pi"));

  // reciprocal pair: exactly one of tau_f_s / omega_f_rad_s
  std::string both = base_config_json();
  both.replace(both.find("\"tau_f_s\": 3.48e-3"), 18,
               "\"tau_f_s\": 3.48e-3, \"omega_f_rad_s\": 287.7");
  CHECK_THROWS_WITH(parse_config(both), doctest::Contains("exactly one"));
  std::string omega = base_config_json();
  omega.replace(omega.find("\"tau_f_s\": 3.48e-3"), 18, "\"omega_f_rad_s\": 287.7");
  CHECK(parse_config(omega).loop.tau_f == doctest::Approx(1.0 / 287.7));
}

TEST_CASE("analyze report fields") {
  const AnalysisReport r = analyze(parse_config(base_config_json()));
  CHECK(r.tau_h == doctest::Approx(1.667e-3).epsilon(1e-3));
  CHECK(r.tau_total == doctest::Approx(3.667e-3).epsilon(1e-3));
  CHECK(r.tau_max_load == doctest::Approx(12.8e-3).epsilon(0.02));
  CHECK(r.stable == (r.tau_total < r.tau_max_load));
  CHECK(r.margin_ratio == doctest::Approx(r.tau_max_load / r.tau_total));
  REQUIRE(!r.critical_points.empty());

  const std::string json = report_to_json(r);
  CHECK(json.find("\"tau_max_load\"") != std::string::npos);
  CHECK(json.find("\"stable\": true") != std::string::npos);
}

TEST_CASE("infinity serialization") {
  CHECK(fmt6(std::numeric_limits<double>::infinity()) == "inf");
  CHECK(fmt6(0.0128000001) == "0.0128");
  CHECK(fmt6(4286.39872) == "4286.4");
}

TEST_CASE("single-point sweep matches analyze") {
  const AnalysisConfig cfg = parse_config(base_config_json());
  SweepSpec spec;
  spec.kp_grid = {1.024e-3, 2.0e-3, 1, true};
  spec.tau_iw_multipliers = {(1.024e-3 / 65.43e-3) / cfg.motor.tau_mech()};
  spec.omega_f_values = {1.0 / 3.48e-3};

  const auto rows = run_sweep(cfg.motor, cfg.loop, spec, false);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].error.empty());
  CHECK(rows[0].tau_max == doctest::Approx(analyze(cfg).tau_max_load).epsilon(1e-9));
}

TEST_CASE("parallel and serial sweeps are identical") {
  const AnalysisConfig cfg = parse_config(base_config_json());
  SweepSpec spec;
  spec.kp_grid = {1.8e-5, 1.8e-3, 13, true};
  spec.tau_iw_multipliers = {0.25, 1.0, 4.0, 32.0};
  spec.omega_f_values = {2877.0, 287.7};

  const auto serial = run_sweep(cfg.motor, cfg.loop, spec, false);
  const auto parallel = run_sweep(cfg.motor, cfg.loop, spec, true);
  REQUIRE(serial.size() == parallel.size());
  for (size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].kp == parallel[i].kp);
    CHECK(serial[i].tau_iw == parallel[i].tau_iw);
    CHECK(serial[i].omega_f == parallel[i].omega_f);
    CHECK(serial[i].error == parallel[i].error);
    // bitwise equality: same code path per point regardless of threading
    CHECK(serial[i].tau_max == parallel[i].tau_max);
  }
  // deterministic ordering: omega_f outer, then kp, then tau_iw
  CHECK(serial[0].omega_f == doctest::Approx(2877.0));
  CHECK(serial.back().omega_f == doctest::Approx(287.7));
  CHECK(sweep_to_csv(serial) == sweep_to_csv(parallel));
}

TEST_CASE("sweep spec parsing") {
  const SweepSpec s = parse_sweep_spec(R"({
    "kp_grid": {"min": 1e-5, "max": 2e-3, "points": 9, "scale": "log"},
    "tau_iw_multipliers": [0.25, 1, 4],
    "omega_f_values": [287.7]
  })");
  CHECK(s.kp_grid.points == 9);
  CHECK(s.kp_grid.log_scale);
  CHECK(s.tau_iw_multipliers.size() == 3);

  const auto lin = kp_grid_points({1.0, 3.0, 5, false});
  REQUIRE(lin.size() == 5);
  CHECK(lin[1] == doctest::Approx(1.5));
  CHECK(lin[4] == doctest::Approx(3.0));
  const auto log3 = kp_grid_points({1e-4, 1e-2, 3, true});
  CHECK(log3[1] == doctest::Approx(1e-3));
  CHECK_THROWS_WITH(parse_sweep_spec("{}"), doctest::Contains("kp_grid"));
  CHECK_THROWS_WITH(parse_sweep_spec(R"({"kp_grid": {"min": 2, "max": 1, "points": 3},
    "tau_iw_multipliers": [1], "omega_f_values": [1]})"),
                    doctest::Contains("min < max"));
}

TEST_CASE("tune table calibrates once and reports every row") {
  const TuneTable t = tune_table(parse_config(base_config_json()));
  REQUIRE(t.rows.size() == 10);
  CHECK(t.vdc_calibrated == doctest::Approx(24.0178).epsilon(1e-3));
  double chr = 0, ise = 0, iste = 0;
  for (const TuneRow& r : t.rows) {
    if (r.rule.name == "CHR-load") chr = r.tau_max;
    if (r.rule.name == "ISE-load") ise = r.tau_max;
    if (r.rule.name == "ISTE-load") iste = r.tau_max;
    if (r.rule.name == "TI") CHECK(r.tau_max > 0.1);
  }
  CHECK(chr == doctest::Approx(12.8e-3).epsilon(1e-6));
  // ISE > ISTE > CHR ordering among the load-tuned rules
  CHECK(ise > iste);
  CHECK(iste > chr);
  const std::string csv = tune_table_to_csv(t);
  CHECK(csv.rfind("rule,kp,ki,tau_iw_s,tau_max_published_ms,tau_max_ms,ratio,vdc_v\n", 0) == 0);
  CHECK(tune_table_to_json(t).find("\"vdc_calibrated_v\"") != std::string::npos);
}

TEST_CASE("validate cross-checks the engine against the oracle") {
  std::string json = base_config_json();
  json.replace(json.find("\"kt_nm_per_a\": 0.0223"), 21,
               "\"kt_nm_per_a\": 0.0223, \"Bm_nms_per_rad\": 2.0e-6");
  const ValidateReport r = validate(parse_config(json));
  CHECK(r.oracle_ran);
  CHECK(r.rel_diff <= 0.15);
  CHECK(validate_to_json(r).find("\"oracle_ran\": true") != std::string::npos);
}

TEST_CASE("validate skips the oracle for delay-independent systems") {
  // the BLDC CEs always cross for valid gains (integrating loop), so feed a
  // hand-built delay-independent characteristic function through the overload
  const AnalysisConfig cfg = parse_config(base_config_json());
  const QuasiPolynomial qp({Polynomial{1.0, 1.0}, Polynomial{0.1}});
  const ValidateReport r = validate(cfg, qp);
  CHECK(std::isinf(r.tau_max_engine));
  CHECK(!r.oracle_ran);
  CHECK(r.note.find("delay-independent") != std::string::npos);
  const std::string json = validate_to_json(r);
  CHECK(json.find("\"tau_max_engine\": \"inf\"") != std::string::npos);
}

TEST_CASE("simulated transients match the reported step behaviour") {
  const AnalysisConfig cfg = parse_config(base_config_json());
  SimConfig sim;
  sim.dt = 1e-5;
  sim.t_end = 0.25;
  sim.input = SimConfig::InputKind::setpoint_step;
  sim.setpoint = 6000.0 * kRpm;

  // CHR-load at 6000 RPM: about 10 ms rise. The published description quotes
  // a 30% overshoot for this case, but that figure equals its own
  // tau_total/tau_max ratio quoted alongside, and the gain set that
  // reproduces the tau_max table yields a 70-degree phase margin, i.e. a
  // mildly damped response. Assert the ringing is present but bounded.
  const Trace chr = simulate(cfg.motor, cfg.pi, cfg.loop, 3.667e-3, sim);
  double peak = -1e300;
  for (double v : chr.speed) peak = std::max(peak, v);
  const double overshoot = (peak - sim.setpoint) / sim.setpoint * 100.0;
  CHECK(overshoot > 0.0);
  CHECK(overshoot < 40.0);
  size_t i10 = 0, i90 = 0;
  for (size_t i = 0; i < chr.speed.size(); ++i) {
    if (!i10 && chr.speed[i] >= 0.1 * sim.setpoint) i10 = i;
    if (chr.speed[i] >= 0.9 * sim.setpoint) {
      i90 = i;
      break;
    }
  }
  const double rise_ms = (i90 - i10) * sim.dt * 1e3;
  CHECK(rise_ms == doctest::Approx(10.0).epsilon(0.5));

  // ISE-load at 6000 RPM: no overshoot
  const Trace ise = simulate(cfg.motor, PiParams(0.669e-3, 20.10e-3), cfg.loop, 3.667e-3, sim);
  double ise_peak = -1e300;
  for (double v : ise.speed) ise_peak = std::max(ise_peak, v);
  CHECK(ise_peak <= sim.setpoint * 1.005);

  // TI at 1000 RPM: non-oscillatory
  sim.setpoint = 1000.0 * kRpm;
  sim.t_end = 0.5;
  const Trace ti = simulate(cfg.motor, PiParams(0.122e-3, 0.366e-3), cfg.loop, 12.0e-3, sim);
  double prev = -1.0;
  bool monotone = true;
  for (double v : ti.speed) {
    if (v < prev - 1e-6 * sim.setpoint) monotone = false;
    prev = v;
  }
  CHECK(monotone);
}

TEST_CASE("sim spec parsing") {
  const SimConfig c = parse_sim_spec(R"({
    "dt_s": 1e-5, "t_end_s": 0.2,
    "input": {"type": "setpoint_step", "target_rpm": 6000}
  })");
  CHECK(c.dt == doctest::Approx(1e-5));
  CHECK(c.setpoint == doctest::Approx(6000.0 * kRpm));

  const SimConfig l = parse_sim_spec(R"({
    "dt_s": 1e-5, "t_end_s": 0.2, "initial_speed_rpm": 3000,
    "input": {"type": "load_step", "torque_nm": 0.0278, "t0_s": 0.05}
  })");
  CHECK(l.input == SimConfig::InputKind::load_step);
  CHECK(l.load_torque == doctest::Approx(0.0278));
  CHECK_THROWS_WITH(parse_sim_spec(R"({"dt_s": 1e-5, "t_end_s": 0.2,
    "input": {"type": "ramp"}})"),
                    doctest::Contains("sim.input.type"));
}

TEST_CASE("command line end to end") {
  int rc = 0;

  // stable CHR-load configuration: exit 0, stable=true
  const std::string stable_out =
      run_cli("analyze --config " + fixture("bl3056_chr_load.json"), &rc);
  CHECK(rc == 0);
  CHECK(stable_out.find("\"stable\": true") != std::string::npos);

  // rerunning is byte-identical
  const std::string again = run_cli("analyze --config " + fixture("bl3056_chr_load.json"), &rc);
  CHECK(stable_out == again);

  // Z-N at 1000 RPM: tau_total 12 ms > tau_max ~5.2 ms, exit 1, stable=false
  {
    std::ofstream f("zn_1000rpm_tmp.json");
    f << base_config_json(1.536e-3, 117.9e-3, 1000.0);
  }
  const std::string zn = run_cli("analyze --config zn_1000rpm_tmp.json", &rc);
  CHECK(rc == 1);
  CHECK(zn.find("\"stable\": false") != std::string::npos);
  std::remove("zn_1000rpm_tmp.json");

  // config errors exit 2
  {
    std::ofstream f("bad_tmp.json");
    f << "{\"motor\": {}}";
  }
  run_cli("analyze --config bad_tmp.json", &rc);
  CHECK(rc == 2);
  std::remove("bad_tmp.json");

  // numerical failures exit 3: with friction the load CE is a quartic, and
  // an absurd bus voltage pushes its delay-free roots into the right half
  // plane, which the margin engine refuses
  {
    std::ofstream f("hot_tmp.json");
    std::string hot = base_config_json();
    hot.replace(hot.find("\"Vdc_v\": 24.0178"), 16, "\"Vdc_v\": 2000.0");
    hot.replace(hot.find("\"kt_nm_per_a\": 0.0223"), 21,
                "\"kt_nm_per_a\": 0.0223, \"Bm_nms_per_rad\": 2.0e-6");
    f << hot;
  }
  run_cli("analyze --config hot_tmp.json", &rc);
  CHECK(rc == 3);
  std::remove("hot_tmp.json");

  // missing subcommand / unknown flag: usage error
  run_cli("", &rc);
  CHECK(rc == 2);
}
