#pragma once

#include <vector>

#include "taumax/polynomial.hpp"
#include "taumax/rekasius.hpp"

namespace taumax {

/// Routh-Hurwitz array of CE_bar(s, T), rows for s^d down to s^1. Entries are
/// rational functions of T; all entries of a row share the same denominator
/// by construction. Thrown errors carry the degenerate row index.
struct RouthTable {
  std::vector<std::vector<RationalFunction>> rows;

  int s_degree() const { return static_cast<int>(rows.size()); }

  const RationalFunction& first(size_t row) const { return rows[row][0]; }

  /// v_1^{(1)}: first entry of the s^1 row.
  const RationalFunction& last_first_column() const { return rows.back()[0]; }

  /// v_1^{(2)} and v_2^{(2)}: the s^2 row (used for omega_cr^2 = v2/v1).
  const std::vector<RationalFunction>& s2_row() const { return rows[rows.size() - 2]; }
};

/// First two rows from the alternating q_j, then the cross-determinant
/// recurrence v_i^(k) = (v_1^(k+1) v_{i+1}^(k+2) - v_1^(k+2) v_{i+1}^(k+1)) / v_1^(k+1)
/// carried out as rational functions with no cancellation. Requires s-degree >= 2.
RouthTable build_routh(const BivariateST& b);

}  // namespace taumax
