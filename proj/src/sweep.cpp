#include "taumax/sweep.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace taumax {

std::vector<double> kp_grid_points(const SweepSpec::KpGrid& g) {
  if (g.points < 1 || !(g.min > 0.0) || !(g.min < g.max))
    throw std::invalid_argument("kp grid needs 0 < min < max and points >= 1");
  std::vector<double> out;
  out.reserve(g.points);
  if (g.points == 1) {
    out.push_back(g.min);
    return out;
  }
  for (int i = 0; i < g.points; ++i) {
    const double f = static_cast<double>(i) / (g.points - 1);
    out.push_back(g.log_scale ? g.min * std::pow(g.max / g.min, f)
                              : g.min + f * (g.max - g.min));
  }
  return out;
}

namespace {

SweepRow eval_point(const MotorParams& motor, const LoopParams& base, double kp, double tau_iw,
                    double omega_f) {
  SweepRow row;
  row.kp = kp;
  row.tau_iw = tau_iw;
  row.omega_f = omega_f;
  try {
    const PiParams pi(kp, kp / tau_iw);
    const LoopParams lp(base.Vdc, base.kf, 1.0 / omega_f, base.tau_s);
    const QuasiPolynomial qp = ce_load(motor, pi, lp, 0.0);
    row.tau_max = taumax::tau_max(qp).tau_max;
  } catch (const std::exception& e) {
    row.tau_max = std::numeric_limits<double>::quiet_NaN();
    const std::string what = e.what();
    row.error = what.find("delay-free") != std::string::npos ? "delay_free_unstable"
                : what.find("degenerate") != std::string::npos ? "degenerate_routh"
                                                               : "numerical_failure";
  }
  return row;
}

}  // namespace

std::vector<SweepRow> run_sweep(const MotorParams& motor, const LoopParams& loop,
                                const SweepSpec& spec, bool parallel) {
  if (spec.tau_iw_multipliers.empty() || spec.omega_f_values.empty())
    throw std::invalid_argument("sweep grids must be non-empty");
  const std::vector<double> kps = kp_grid_points(spec.kp_grid);
  const double tau_mech = motor.tau_mech();

  const size_t nk = kps.size();
  const size_t nt = spec.tau_iw_multipliers.size();
  const size_t nw = spec.omega_f_values.size();
  std::vector<SweepRow> rows(nw * nk * nt);

  auto point = [&](size_t flat) {
    const size_t iw = flat / (nk * nt);
    const size_t ik = (flat / nt) % nk;
    const size_t it = flat % nt;
    rows[flat] = eval_point(motor, loop, kps[ik], spec.tau_iw_multipliers[it] * tau_mech,
                            spec.omega_f_values[iw]);
  };

  const long long total = static_cast<long long>(rows.size());
  if (parallel) {
#ifdef TAUMAX_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < total; ++i) point(static_cast<size_t>(i));
  } else {
    for (long long i = 0; i < total; ++i) point(static_cast<size_t>(i));
  }
  return rows;
}

}  // namespace taumax
