#pragma once

#include <Eigen/Dense>

#include <utility>
#include <vector>

#include "taumax/polynomial.hpp"

namespace taumax {

/// Linear time-invariant retarded time-delay system
///   x'(t) = A0 x(t) + A1 x(t - tau) + B u(t)
struct DelaySystem {
  Eigen::MatrixXd A0;
  Eigen::MatrixXd A1;
  Eigen::MatrixXd B;  // optional input coupling; may be 0x0
  double tau = 0.0;

  DelaySystem(Eigen::MatrixXd a0, Eigen::MatrixXd a1, double delay);
  DelaySystem(Eigen::MatrixXd a0, Eigen::MatrixXd a1, Eigen::MatrixXd b, double delay);

  int order() const { return static_cast<int>(A0.rows()); }
};

/// Characteristic function of a commensurate-delay system,
///   CE(s, tau) = sum_k p_k(s) e^{-s k tau}.
/// terms[k] is the polynomial multiplying e^{-s k tau}.
class QuasiPolynomial {
public:
  explicit QuasiPolynomial(std::vector<Polynomial> terms);

  const std::vector<Polynomial>& terms() const { return terms_; }
  const Polynomial& term(size_t k) const { return terms_[k]; }
  size_t term_count() const { return terms_.size(); }

  /// Degree in s (the retarded structure puts it in p_0).
  int s_degree() const;

  Complex eval(Complex s, double tau) const;

  /// (dCE/ds, dCE/dtau) at (s, tau).
  std::pair<Complex, Complex> delay_derivatives(Complex s, double tau) const;

  /// CE with tau = 0: the plain polynomial sum_k p_k(s).
  Polynomial delay_free() const;

  /// Magnitude scale sum_k |p_k(s)| used for residual tolerances.
  double eval_scale(Complex s) const;

private:
  std::vector<Polynomial> terms_;
};

/// Symbolic expansion of det(sI - A0 - A1 e^{-s tau}), collected by powers of
/// the delay marker z = e^{-s tau}. Guarded to n <= 8.
QuasiPolynomial characteristic_qp(const DelaySystem& sys);

}  // namespace taumax
