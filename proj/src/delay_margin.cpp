#include "taumax/delay_margin.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "taumax/rekasius.hpp"

namespace taumax {

std::vector<double> critical_candidates(const RouthTable& table, const MarginOptions& opts) {
  const Polynomial& v11den = table.last_first_column().den;

  std::vector<double> cands;
  for (const auto& row : table.rows) {
    const Polynomial& num = row[0].num;
    if (num.degree() < 1) continue;
    for (const auto& r : num.real_roots(opts.real_root_imag_tol)) cands.push_back(r.value);
  }
  std::sort(cands.begin(), cands.end());

  std::vector<double> out;
  for (double t : cands) {
    if (std::abs(t) > opts.t_abs_max) continue;
    if (std::abs(v11den.eval(t)) <= opts.den_rel_tol * v11den.eval_bound(std::abs(t))) continue;
    if (!out.empty() && std::abs(t - out.back()) <= 1e-6 * (1.0 + std::abs(t))) continue;
    out.push_back(t);
  }
  return out;
}

int root_tendency(const QuasiPolynomial& qp, double omega, double tau, const MarginOptions& opts) {
  const Complex s(0.0, omega);
  const double scale = qp.eval_scale(s);
  if (std::abs(qp.eval(s, tau)) > opts.residual_rel_tol * scale)
    throw std::invalid_argument("root_tendency: (j omega, tau) is not an imaginary-axis root");

  auto [dds, ddt] = qp.delay_derivatives(s, tau);
  if (std::abs(dds) < 1e-12 * scale) throw std::runtime_error("non-simple crossing root");
  const Complex ds_dtau = -ddt / dds;
  return ds_dtau.real() >= 0.0 ? +1 : -1;
}

std::vector<CriticalPoint> critical_points(const RouthTable& table, const QuasiPolynomial& qp,
                                           const MarginOptions& opts) {
  const auto& s2 = table.s2_row();
  const RationalFunction& v1 = s2[0];
  const RationalFunction v2 = s2.size() > 1 ? s2[1] : RationalFunction(Polynomial{}, Polynomial{1.0});

  std::vector<CriticalPoint> out;
  for (double t : critical_candidates(table, opts)) {
    // omega^2 = v2(T)/v1(T); same-row entries share the denominator, so the
    // ratio reduces to num2(T)/num1(T).
    const double n1 = v1.num.eval(t);
    const double n2 = v2.num.eval(t);
    if (std::abs(n1) <= opts.den_rel_tol * v1.num.eval_bound(std::abs(t))) continue;
    const double w2 = n2 / n1;
    if (!(w2 > 0.0)) continue;
    const double w = std::sqrt(w2);

    const double period = 2.0 * std::numbers::pi / w;
    double tau0 = std::fmod((2.0 / w) * std::atan(w * t), period);
    if (tau0 < 0.0) tau0 += period;

    // a candidate is a crossing only if CE actually vanishes there
    const Complex s(0.0, w);
    if (std::abs(qp.eval(s, tau0)) > opts.residual_rel_tol * qp.eval_scale(s)) continue;

    CriticalPoint cp;
    cp.t_cr = t;
    cp.omega_cr = w;
    for (int l = 0; l < opts.ladder_depth; ++l) cp.tau_ladder.push_back(tau0 + l * period);
    cp.root_tendency = root_tendency(qp, w, tau0, opts);
    out.push_back(std::move(cp));
  }
  return out;
}

DelayMarginResult tau_max(const QuasiPolynomial& qp, const MarginOptions& opts) {
  const Polynomial df = qp.delay_free();
  if (df.degree() >= 1) {
    double max_re = -std::numeric_limits<double>::infinity();
    for (const Complex& r : df.roots()) max_re = std::max(max_re, r.real());
    if (max_re >= -opts.delay_free_margin) throw std::runtime_error("delay-free system unstable");
  } else if (df.is_zero()) {
    throw std::runtime_error("delay-free system unstable");
  }

  DelayMarginResult res;
  res.stable_delay_free = true;
  res.tau_max = std::numeric_limits<double>::infinity();

  if (qp.term_count() < 2) return res;  // no delayed coupling, no crossings

  const BivariateST ce_bar = rekasius_transform(qp);
  if (ce_bar.s_degree() < 2) return res;  // too low an order to ever cross

  const RouthTable table = build_routh(ce_bar);
  res.t_candidates = critical_candidates(table, opts);
  res.critical_points = critical_points(table, qp, opts);

  for (const CriticalPoint& cp : res.critical_points)
    if (cp.root_tendency > 0 && !cp.tau_ladder.empty())
      res.tau_max = std::min(res.tau_max, cp.tau_ladder.front());
  return res;
}

}  // namespace taumax
