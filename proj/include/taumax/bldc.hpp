#pragma once

#include <optional>
#include <string>
#include <vector>

#include "taumax/polynomial.hpp"
#include "taumax/quasi_polynomial.hpp"

namespace taumax {

/// Motor constants in SI units. ke is the back-EMF constant in V s/rad;
/// config files may give it in V/RPM and convert on load.
struct MotorParams {
  double R = 0.0;   // ohm
  double L = 0.0;   // henry
  double J = 0.0;   // kg m^2
  double ke = 0.0;  // V s/rad
  double kt = 0.0;  // N m/A
  double Bm = 0.0;  // N m s/rad, viscous friction, may be 0

  MotorParams(double r, double l, double j, double ke_si, double kt_, double bm);

  double tau_elec() const { return L / R; }
  double tau_mech() const { return R * J / (ke * ke); }
};

struct PiParams {
  double kp = 0.0;  // V s/rad
  double ki = 0.0;  // V/rad

  PiParams(double kp_, double ki_);

  double tau_iw() const { return kp / ki; }
};

struct LoopParams {
  double Vdc = 0.0;    // V, PWM bus voltage; H_PWM ~ Vdc
  double kf = 1.0;     // LPF gain
  double tau_f = 0.0;  // s, LPF time constant (omega_f = 1/tau_f)
  double tau_s = 0.0;  // s, controller sampling period

  LoopParams(double vdc, double kf_, double tau_f_, double tau_s_);
};

struct OperatingPoint {
  double omega_r = 0.0;  // rad/s

  explicit OperatingPoint(double omega);

  double tau_h() const;
  double tau_total(double tau_s) const;
};

/// Gain constants of the characteristic functions.
struct LoopGains {
  double k_s, k_l, k_m, k_n;

  LoopGains(const MotorParams& m, const PiParams& pi, const LoopParams& lp);
};

/// Hall sensor delay 2 pi / (6 omega_r).
double hall_delay(double omega_r);

/// Lumped loop delay: two sampling delays plus the Hall delay.
double total_delay(double tau_s, double tau_h);

/// Load-disturbance characteristic function
///   CE_load = k_l (s tau_iw + 1) e^{-s tau_total}
///           + s k_m (s tau_f + 1)
///           + s k_n (s tau_e + 1)(s tau_m + 1)(s tau_f + 1)
/// assembled from the factors. With Bm = 0, k_n = 0 and the third term is
/// absent (tau_m = J/Bm is singular there).
QuasiPolynomial ce_load(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                        double tau_total);

/// Loop lag used by the set-point CE; the single-lag form defaults to
/// tau_mech, or the exact quadratic motor factor can be requested.
struct SetpointLag {
  enum class Kind { tau_mech, explicit_lag, full_quadratic };
  Kind kind = Kind::tau_mech;
  double value = 0.0;  // seconds, for explicit_lag

  static SetpointLag mech() { return {}; }
  static SetpointLag lag(double seconds) { return {Kind::explicit_lag, seconds}; }
  static SetpointLag full() { return {Kind::full_quadratic, 0.0}; }
};

/// Set-point tracking characteristic function
///   CE_SP = k_s (tau_iw s + 1) e^{-s tau_total} + tau_iw s (tau_l s + 1)(tau_f s + 1)
QuasiPolynomial ce_setpoint(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                            double tau_total, const SetpointLag& lag = {});

/// One rational block of the loop, with the number of sampling-delay factors
/// it carries.
struct TransferBlock {
  std::string name;
  Polynomial num;
  Polynomial den;
  int delay_count = 0;
};

struct LoopBlocks {
  TransferBlock H_p;     // PI controller (one sampling delay)
  TransferBlock H_pwm;   // static Vdc approximation
  TransferBlock H_elec;  // (1/R)/(tau_e s + 1)
  std::optional<TransferBlock> H_mech;  // (1/Bm)/(tau_m s + 1); absent for Bm = 0
  TransferBlock H_m;     // (1/ke)/(tau_mech tau_elec s^2 + tau_mech s + 1)
  TransferBlock H_lpf;   // kf/(tau_f s + 1) (one sampling delay)
};

/// All loop blocks. Requesting the explicit H_mech with Bm = 0 throws
/// (1/Bm singular); H_m or the state-space form covers that case.
LoopBlocks loop_transfer_blocks(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                                bool require_mech = false);

/// One row of the tuning-rule comparison table: gains and margins exactly as
/// published for the BL3056 + RDK controller study.
struct TuningRule {
  std::string name;
  bool load_optimized;   // true: load-disturbance tuned, false: set-point tuned
  double kp_printed;     // x 1e-3
  double ki_printed;     // x 1e-6 as labeled; see KiUnitInterpretation
  double tau_iw_ms;      // published
  double tau_max_ms;     // published
};

/// The published gain table is stored verbatim. The ki column label (x 1e-6)
/// contradicts the printed tau_iw = kp/ki values by a factor of 1000; the
/// interpretation that makes the tau_iw column exact (ki x 1e-3) also
/// reproduces the published tau_max values and is the one analysis uses.
enum class KiUnitInterpretation { as_printed, tau_iw_consistent };

const std::vector<TuningRule>& tuning_rule_table();

/// PI gains of a table row in SI under the given interpretation.
PiParams tuning_rule_gains(const TuningRule& rule,
                           KiUnitInterpretation interp = KiUnitInterpretation::tau_iw_consistent);

}  // namespace taumax
