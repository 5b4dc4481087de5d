#pragma once

#include <vector>

#include "taumax/polynomial.hpp"
#include "taumax/quasi_polynomial.hpp"

namespace taumax {

/// CE after the Rekasius substitution e^{-s tau} -> (1 - sT)/(1 + sT):
///   CE_bar(s, T) = sum_j q_j(T) s^j
/// s_coeffs[j] is q_j, a polynomial in T.
struct BivariateST {
  std::vector<Polynomial> s_coeffs;

  int s_degree() const { return static_cast<int>(s_coeffs.size()) - 1; }
  const Polynomial& q(size_t j) const { return s_coeffs[j]; }

  /// Direct evaluation of sum_j q_j(T) s^j.
  Complex eval(Complex s, double t) const;
};

/// Multiply out sum_k p_k(s) (1 - sT)^k (1 + sT)^{n-k} and collect powers of
/// s. Exact on the imaginary axis: CE_bar(jw, T) = (1 + jwT)^n CE(jw, tau(T))
/// with tau(T) = (2/w)(atan(wT) + l pi).
BivariateST rekasius_transform(const QuasiPolynomial& qp);

}  // namespace taumax
