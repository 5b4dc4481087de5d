#include "taumax/routh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace taumax {

RouthTable build_routh(const BivariateST& b) {
  const int d = b.s_degree();
  if (d < 2) throw std::invalid_argument("build_routh: degree in s must be >= 2");

  RouthTable t;
  std::vector<RationalFunction> r0, r1;
  for (int j = d; j >= 0; j -= 2) r0.emplace_back(b.q(j), Polynomial{1.0});
  for (int j = d - 1; j >= 0; j -= 2) r1.emplace_back(b.q(j), Polynomial{1.0});
  t.rows.push_back(std::move(r0));
  t.rows.push_back(std::move(r1));

  while (static_cast<int>(t.rows.size()) < d) {
    const auto& a = t.rows[t.rows.size() - 2];  // two above
    const auto& bb = t.rows[t.rows.size() - 1]; // directly above
    const Polynomial& alpha1 = a[0].num;
    const Polynomial& beta1 = bb[0].num;
    if (beta1.is_zero())
      throw std::runtime_error("degenerate Routh row at s^" +
                               std::to_string(d - static_cast<int>(t.rows.size())));

    // shared-denominator recurrence: entries of row `a` are alpha_i / D_a and
    // of row `bb` are beta_i / D_b; the new entry is
    //   (beta1 alpha_{i+1} - alpha1 beta_{i+1}) / (D_a beta1)
    // (the D_b factor cancels exactly in the division -- arithmetic, not GCD).
    Polynomial newden = a[0].den * beta1;
    std::vector<RationalFunction> row;
    for (size_t i = 0; i + 1 < bb.size() || i + 1 < a.size(); ++i) {
      const Polynomial an = i + 1 < a.size() ? a[i + 1].num : Polynomial{};
      const Polynomial bn = i + 1 < bb.size() ? bb[i + 1].num : Polynomial{};
      row.emplace_back(beta1 * an - alpha1 * bn, newden);
    }
    if (row.empty()) row.emplace_back(Polynomial{}, newden);
    while (row.size() > 1 && row.back().num.is_zero()) row.pop_back();

    // rescale against under/overflow; same factor on num and den of each entry
    double mx = 0.0;
    for (double c : newden.coeffs()) mx = std::max(mx, std::abs(c));
    for (const auto& e : row)
      for (double c : e.num.coeffs()) mx = std::max(mx, std::abs(c));
    if (mx > 0.0 && (mx > 1e6 || mx < 1e-6))
      for (auto& e : row) e.scale_down(mx);

    t.rows.push_back(std::move(row));
  }
  if (t.rows.back()[0].num.is_zero())
    throw std::runtime_error("degenerate Routh row at s^1");
  return t;
}

}  // namespace taumax
