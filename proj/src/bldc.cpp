#include "taumax/bldc.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace taumax {

MotorParams::MotorParams(double r, double l, double j, double ke_si, double kt_, double bm)
    : R(r), L(l), J(j), ke(ke_si), kt(kt_), Bm(bm) {
  if (!(R > 0.0) || !(L > 0.0) || !(J > 0.0) || !(ke > 0.0))
    throw std::invalid_argument("motor parameters R, L, J, ke must be positive");
  if (Bm < 0.0) throw std::invalid_argument("Bm must be non-negative");
}

PiParams::PiParams(double kp_, double ki_) : kp(kp_), ki(ki_) {
  if (!(kp > 0.0) || !(ki > 0.0)) throw std::invalid_argument("PI gains must be positive");
}

LoopParams::LoopParams(double vdc, double kf_, double tau_f_, double tau_s_)
    : Vdc(vdc), kf(kf_), tau_f(tau_f_), tau_s(tau_s_) {
  if (!(Vdc > 0.0)) throw std::invalid_argument("Vdc must be positive");
  if (!(tau_f > 0.0)) throw std::invalid_argument("tau_f must be positive");
  if (!(tau_s > 0.0)) throw std::invalid_argument("tau_s must be positive");
}

OperatingPoint::OperatingPoint(double omega) : omega_r(omega) {
  if (!(omega_r > 0.0)) throw std::invalid_argument("rotational speed must be positive");
}

double OperatingPoint::tau_h() const { return hall_delay(omega_r); }

double OperatingPoint::tau_total(double tau_s) const { return total_delay(tau_s, tau_h()); }

double hall_delay(double omega_r) {
  if (!(omega_r > 0.0)) throw std::invalid_argument("rotational speed must be positive");
  return 2.0 * std::numbers::pi / (6.0 * omega_r);
}

double total_delay(double tau_s, double tau_h) { return 2.0 * tau_s + tau_h; }

LoopGains::LoopGains(const MotorParams& m, const PiParams& pi, const LoopParams& lp) {
  k_s = pi.kp * lp.Vdc / m.ke;
  k_l = pi.kp * m.ke * lp.kf * lp.Vdc / m.R;
  k_m = pi.tau_iw() * m.ke * m.ke / m.R;
  k_n = m.Bm * pi.tau_iw();
}

QuasiPolynomial ce_load(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                        double tau_total) {
  if (!(tau_total >= 0.0)) throw std::invalid_argument("tau_total must be non-negative");
  const LoopGains g(m, pi, lp);
  const Polynomial s{0.0, 1.0};
  const Polynomial lpf{1.0, lp.tau_f};

  Polynomial p0 = s * (g.k_m * lpf);
  if (m.Bm > 0.0) {
    const Polynomial elec{1.0, m.tau_elec()};
    const Polynomial mech{1.0, m.J / m.Bm};
    p0 = p0 + s * (g.k_n * (elec * mech * lpf));
  }
  const Polynomial p1 = g.k_l * Polynomial{1.0, pi.tau_iw()};
  return QuasiPolynomial({p0, p1});
}

QuasiPolynomial ce_setpoint(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                            double tau_total, const SetpointLag& lag) {
  if (!(tau_total >= 0.0)) throw std::invalid_argument("tau_total must be non-negative");
  const LoopGains g(m, pi, lp);
  const Polynomial s{0.0, 1.0};
  const Polynomial lpf{1.0, lp.tau_f};

  Polynomial motor;
  switch (lag.kind) {
    case SetpointLag::Kind::tau_mech:
      motor = Polynomial{1.0, m.tau_mech()};
      break;
    case SetpointLag::Kind::explicit_lag:
      motor = Polynomial{1.0, lag.value};
      break;
    case SetpointLag::Kind::full_quadratic:
      motor = Polynomial{1.0, m.tau_mech(), m.tau_mech() * m.tau_elec()};
      break;
  }
  const Polynomial p0 = (pi.tau_iw() * s) * motor * lpf;
  const Polynomial p1 = g.k_s * lp.kf * Polynomial{1.0, pi.tau_iw()};
  return QuasiPolynomial({p0, p1});
}

LoopBlocks loop_transfer_blocks(const MotorParams& m, const PiParams& pi, const LoopParams& lp,
                                bool require_mech) {
  LoopBlocks b;
  b.H_p = {"H_p", pi.kp * Polynomial{1.0, pi.tau_iw()}, Polynomial{0.0, pi.tau_iw()}, 1};
  b.H_pwm = {"H_PWM", Polynomial{lp.Vdc}, Polynomial{1.0}, 0};
  b.H_elec = {"H_elec", Polynomial{1.0 / m.R}, Polynomial{1.0, m.tau_elec()}, 0};
  if (m.Bm > 0.0)
    b.H_mech = TransferBlock{"H_mech", Polynomial{1.0 / m.Bm}, Polynomial{1.0, m.J / m.Bm}, 0};
  else if (require_mech)
    throw std::runtime_error("H_mech is singular with Bm = 0; use H_m or the state-space form");
  b.H_m = {"H_m", Polynomial{1.0 / m.ke},
           Polynomial{1.0, m.tau_mech(), m.tau_mech() * m.tau_elec()}, 0};
  b.H_lpf = {"H_LPF", Polynomial{lp.kf}, Polynomial{1.0, lp.tau_f}, 1};
  return b;
}

const std::vector<TuningRule>& tuning_rule_table() {
  static const std::vector<TuningRule> table = {
      {"TI", true, 0.122, 0.366, 333.0, 4274.0},
      {"CHR-load", true, 1.024, 65.43, 15.65, 12.8},
      {"ISE-load", true, 0.669, 20.10, 33.28, 18.9},
      {"ISTE-load", true, 0.527, 26.87, 19.61, 16.7},
      {"Z-N", false, 1.536, 117.9, 13.03, 5.2},
      {"CHR-sp", false, 1.024, 142.5, 7.188, 8.3},
      {"ISE-sp", false, 1.566, 132.0, 11.87, 4.9},
      {"ISTE-sp", false, 1.158, 134.3, 8.624, 7.5},
      {"IAE-sp", false, 1.160, 135.9, 8.532, 7.4},
      {"ITAE-sp", false, 1.472, 135.9, 10.83, 5.3},
  };
  return table;
}

PiParams tuning_rule_gains(const TuningRule& rule, KiUnitInterpretation interp) {
  const double kp = rule.kp_printed * 1e-3;
  const double ki = interp == KiUnitInterpretation::as_printed ? rule.ki_printed * 1e-6
                                                               : rule.ki_printed * 1e-3;
  return PiParams(kp, ki);
}

}  // namespace taumax
