#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "taumax/bldc.hpp"
#include "taumax/quasi_polynomial.hpp"

namespace taumax {

struct SimConfig {
  enum class InputKind { setpoint_step, load_step };

  double dt = 0.0;     // s, fixed step
  double t_end = 0.0;  // s
  InputKind input = InputKind::setpoint_step;
  double setpoint = 0.0;     // rad/s target for setpoint_step
  double load_torque = 0.0;  // N m for load_step
  double load_t0 = 0.0;      // s, load application time
  double initial_speed = 0.0;  // rad/s
};

struct Trace {
  std::vector<double> time;     // s
  std::vector<double> speed;    // rad/s
  std::vector<double> current;  // A
  std::vector<double> control;  // V (PWM output voltage)
};

class SimulationDiverged : public std::runtime_error {
public:
  explicit SimulationDiverged(double t);
  double t;
};

/// Fixed-step RK4 on the closed BLDC speed loop (motor current & speed, PI
/// integrator, LPF state), with the lumped delay tau_total on the feedback
/// path read from a cubic-Hermite-interpolated history ring. Pre-history is
/// the initial condition held constant. Throws SimulationDiverged on
/// NaN/overflow -- itself a verdict the stability oracle consumes.
Trace simulate(const MotorParams& m, const PiParams& pi, const LoopParams& lp, double tau_total,
               const SimConfig& cfg);

struct LinearTrace {
  std::vector<double> time;
  std::vector<double> norm;  // max-abs of the state vector
};

/// Same integrator on x'(t) = A0 x(t) + A1 x(t - tau), zero input, constant
/// pre-history x0. The system's own tau field is ignored in favor of `tau`.
LinearTrace simulate_linear(const DelaySystem& sys, const std::vector<double>& x0, double tau,
                            double dt, double t_end);

/// Exponential growth rate of the envelope over the last half of the trace:
/// least-squares slope of log window-maxima across four windows. -inf for an
/// identically quiet tail.
double envelope_rate(const std::vector<double>& magnitudes, double dt);

struct OracleOptions {
  double rate_threshold = 2e-4;  // 1/s; above = unstable
  double bisect_rel = 0.01;      // stop when (hi-lo) <= rel*lo
  double dt = 0.0;               // 0 = choose from the plant time scales
  double t_end = 0.0;            // 0 = choose from tau_hi
};

struct BldcLoop {
  MotorParams motor;
  PiParams pi;
  LoopParams loop;
};

/// Bisect the stability boundary in tau between a bounded and a diverging
/// endpoint (verified first; throws "bracket invalid" otherwise).
double stability_oracle(const DelaySystem& sys, double tau_lo, double tau_hi,
                        const OracleOptions& opts = {});
double stability_oracle(const BldcLoop& loop, double tau_lo, double tau_hi,
                        const OracleOptions& opts = {});

/// CSV with header time_s,speed_rad_s,current_a,control_v.
void write_trace(const Trace& t, std::ostream& out);
void export_trace(const Trace& t, const std::string& path);
Trace read_trace(const std::string& path);

}  // namespace taumax
