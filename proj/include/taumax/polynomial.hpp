#pragma once

#include <complex>
#include <initializer_list>
#include <vector>

namespace taumax {

using Complex = std::complex<double>;

/// Dense univariate polynomial with real coefficients, ascending degree.
/// Trailing coefficients below 1e-12 of the largest magnitude are stripped,
/// so degree() is never inflated by cancellation residue.
class Polynomial {
public:
  Polynomial() : c_{0.0} {}
  Polynomial(std::initializer_list<double> coeffs) : c_(coeffs) { normalize(); }
  explicit Polynomial(std::vector<double> coeffs) : c_(std::move(coeffs)) { normalize(); }

  static Polynomial constant(double v) { return Polynomial{v}; }

  const std::vector<double>& coeffs() const { return c_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.size() == 1 && c_[0] == 0.0; }
  double leading() const { return c_.back(); }
  double operator[](size_t i) const { return i < c_.size() ? c_[i] : 0.0; }

  Polynomial operator+(const Polynomial& o) const;
  Polynomial operator-(const Polynomial& o) const;
  Polynomial operator*(const Polynomial& o) const;
  Polynomial operator*(double s) const;
  Polynomial operator-() const { return *this * -1.0; }

  Polynomial derivative() const;

  Complex eval(Complex x) const;
  double eval(double x) const;

  /// Sum |c_i| |x|^i -- magnitude scale of an evaluation at x.
  double eval_bound(double absx) const;

  /// All complex roots (multiset of size degree()). Companion-matrix
  /// eigenvalues polished by Newton iteration. Throws on the zero polynomial.
  std::vector<Complex> roots() const;

  struct RealRoot {
    double value;
    int multiplicity;
  };

  /// Real roots: |imag| <= imag_tol*(1+|re|), clustered within 1e-8 radius,
  /// ascending, with multiplicities.
  std::vector<RealRoot> real_roots(double imag_tol = 1e-7) const;

private:
  void normalize();
  std::vector<double> c_;
};

inline Polynomial operator*(double s, const Polynomial& p) { return p * s; }

/// Ratio of two polynomials. No GCD cancellation is ever performed; shared
/// factors are kept and handled by the consumers' magnitude filters.
struct RationalFunction {
  Polynomial num;
  Polynomial den;

  RationalFunction() : num{0.0}, den{1.0} {}
  RationalFunction(Polynomial n, Polynomial d);

  double eval(double x) const { return num.eval(x) / den.eval(x); }

  /// Divide num and den by the same scalar; value-preserving rescale.
  void scale_down(double s);
};

}  // namespace taumax
