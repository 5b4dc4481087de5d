#pragma once

#include <string>
#include <vector>

#include "taumax/bldc.hpp"
#include "taumax/delay_margin.hpp"

namespace taumax {

/// Grid over controller parameters: kp values crossed with tau_iw multiples
/// of tau_mech (ki adjusted) and LPF cutoff choices.
struct SweepSpec {
  struct KpGrid {
    double min = 0.0;
    double max = 0.0;
    int points = 0;
    bool log_scale = true;
  };
  KpGrid kp_grid;
  std::vector<double> tau_iw_multipliers;  // x tau_mech
  std::vector<double> omega_f_values;      // rad/s
};

struct SweepRow {
  double kp = 0.0;
  double tau_iw = 0.0;   // s
  double omega_f = 0.0;  // rad/s
  double tau_max = 0.0;  // s; +inf = delay-independent
  std::string error;     // empty on success, otherwise a short code
};

/// Kp values of the grid, ascending.
std::vector<double> kp_grid_points(const SweepSpec::KpGrid& g);

/// tau_max of the load CE over the full grid, rows ordered by
/// (omega_f, kp, tau_iw) grid index. Points are independent; the parallel
/// path fans them out with OpenMP, the serial path is the reference and both
/// produce identical rows.
std::vector<SweepRow> run_sweep(const MotorParams& motor, const LoopParams& loop,
                                const SweepSpec& spec, bool parallel = true);

}  // namespace taumax
