#pragma once

#include <vector>

#include "taumax/quasi_polynomial.hpp"
#include "taumax/routh.hpp"

namespace taumax {

/// One imaginary-axis crossing of CE(s, tau): the T value that produced it,
/// the crossing frequency, the ladder of delays sharing that crossing
/// (spacing 2 pi / omega_cr, smallest non-negative first), and the root
/// tendency (+1 root enters the right half plane as tau grows, -1 it leaves).
struct CriticalPoint {
  double t_cr = 0.0;
  double omega_cr = 0.0;
  std::vector<double> tau_ladder;
  int root_tendency = 0;
};

struct DelayMarginResult {
  std::vector<double> t_candidates;  // denominator-filtered first-column roots
  std::vector<CriticalPoint> critical_points;
  double tau_max = 0.0;  // +infinity when no destabilizing crossing exists
  bool stable_delay_free = false;
};

struct MarginOptions {
  int ladder_depth = 4;
  double t_abs_max = 1e6;          // |T| beyond this is numerically meaningless
  double den_rel_tol = 1e-8;       // pole/zero collision filter on v11's denominator
  double residual_rel_tol = 1e-6;  // |CE(jw, tau)| acceptance vs eval scale
  double real_root_imag_tol = 1e-7;
  double delay_free_margin = 1e-9;  // require max Re(root) < -margin at tau = 0
};

/// Candidate T values: real roots of the numerators of every first-column
/// entry (the s^1 entry plus each recurrence pivot; a vanishing pivot
/// invalidates the parameterized table at that T and has to be examined
/// directly), filtered by the v_1^{(1)} denominator magnitude and |T| bound,
/// deduplicated ascending.
std::vector<double> critical_candidates(const RouthTable& table, const MarginOptions& opts = {});

/// Steps 3-5: validated crossings. Each candidate must give omega^2 =
/// v_2^{(2)}/v_1^{(2)} > 0 and an actual imaginary-axis root of CE (residual
/// check) before it is returned.
std::vector<CriticalPoint> critical_points(const RouthTable& table, const QuasiPolynomial& qp,
                                           const MarginOptions& opts = {});

/// Crossing direction at an imaginary-axis root s = j omega of CE(s, tau):
/// sign of Re(ds/dtau) with ds/dtau = -(dCE/dtau)/(dCE/ds).
int root_tendency(const QuasiPolynomial& qp, double omega, double tau,
                  const MarginOptions& opts = {});

/// Full Step 1-6 chain. Requires the delay-free system stable; tau_max is the
/// smallest destabilizing ladder base, or +infinity if no crossing has
/// root tendency +1.
DelayMarginResult tau_max(const QuasiPolynomial& qp, const MarginOptions& opts = {});

}  // namespace taumax
