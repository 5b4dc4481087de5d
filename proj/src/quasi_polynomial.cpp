#include "taumax/quasi_polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace taumax {

DelaySystem::DelaySystem(Eigen::MatrixXd a0, Eigen::MatrixXd a1, double delay)
    : DelaySystem(std::move(a0), std::move(a1), Eigen::MatrixXd(), delay) {}

DelaySystem::DelaySystem(Eigen::MatrixXd a0, Eigen::MatrixXd a1, Eigen::MatrixXd b, double delay)
    : A0(std::move(a0)), A1(std::move(a1)), B(std::move(b)), tau(delay) {
  if (A0.rows() != A0.cols() || A1.rows() != A1.cols() || A0.rows() != A1.rows() || A0.rows() < 1)
    throw std::invalid_argument("A0 and A1 must be square matrices of equal dimension");
  if (B.size() > 0 && B.rows() != A0.rows())
    throw std::invalid_argument("B row count must match the state dimension");
  if (tau < 0.0) throw std::invalid_argument("delay must be non-negative");
}

QuasiPolynomial::QuasiPolynomial(std::vector<Polynomial> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw std::invalid_argument("quasi-polynomial needs at least one term");
  while (terms_.size() > 1 && terms_.back().is_zero()) terms_.pop_back();
}

int QuasiPolynomial::s_degree() const {
  int d = 0;
  for (const Polynomial& p : terms_) d = std::max(d, p.degree());
  return d;
}

Complex QuasiPolynomial::eval(Complex s, double tau) const {
  Complex r = 0.0;
  for (size_t k = 0; k < terms_.size(); ++k)
    r += terms_[k].eval(s) * std::exp(-s * (static_cast<double>(k) * tau));
  return r;
}

std::pair<Complex, Complex> QuasiPolynomial::delay_derivatives(Complex s, double tau) const {
  Complex dds = 0.0, ddt = 0.0;
  for (size_t k = 0; k < terms_.size(); ++k) {
    const double kk = static_cast<double>(k);
    const Complex ek = std::exp(-s * (kk * tau));
    const Complex pk = terms_[k].eval(s);
    dds += (terms_[k].derivative().eval(s) - kk * tau * pk) * ek;
    ddt += -s * kk * pk * ek;
  }
  return {dds, ddt};
}

Polynomial QuasiPolynomial::delay_free() const {
  Polynomial sum;
  for (const Polynomial& p : terms_) sum = sum + p;
  return sum;
}

double QuasiPolynomial::eval_scale(Complex s) const {
  double sc = 0.0;
  for (const Polynomial& p : terms_) sc += std::abs(p.eval(s));
  return sc;
}

namespace {

// Bivariate polynomial in (s, z); coeff[i][j] multiplies s^i z^j.
struct Bivar {
  std::vector<std::vector<double>> c;

  static Bivar zero() { return {{{0.0}}}; }

  static Bivar entry(double sii, double a0, double a1) {
    // s*delta - a0 - a1 z
    Bivar b;
    b.c = {{-a0, -a1}, {sii, 0.0}};
    return b;
  }

  Bivar operator*(const Bivar& o) const {
    Bivar r;
    r.c.assign(c.size() + o.c.size() - 1, std::vector<double>(c[0].size() + o.c[0].size() - 1, 0.0));
    for (size_t i = 0; i < c.size(); ++i)
      for (size_t j = 0; j < c[i].size(); ++j) {
        if (c[i][j] == 0.0) continue;
        for (size_t k = 0; k < o.c.size(); ++k)
          for (size_t l = 0; l < o.c[k].size(); ++l) r.c[i + k][j + l] += c[i][j] * o.c[k][l];
      }
    return r;
  }

  void add_scaled(const Bivar& o, double s) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), std::vector<double>(c[0].size(), 0.0));
    size_t w = std::max(c[0].size(), o.c[0].size());
    for (auto& row : c) row.resize(w, 0.0);
    for (size_t i = 0; i < o.c.size(); ++i)
      for (size_t j = 0; j < o.c[i].size(); ++j) c[i][j] += s * o.c[i][j];
  }
};

// Laplace expansion along the first remaining column.
Bivar det_rec(const std::vector<std::vector<Bivar>>& m, std::vector<int>& rows, int col) {
  if (rows.size() == 1) return m[rows[0]][col];
  Bivar acc = Bivar::zero();
  double sign = 1.0;
  for (size_t i = 0; i < rows.size(); ++i) {
    int r = rows[i];
    std::vector<int> sub;
    sub.reserve(rows.size() - 1);
    for (size_t j = 0; j < rows.size(); ++j)
      if (j != i) sub.push_back(rows[j]);
    Bivar minor = det_rec(m, sub, col + 1);
    acc.add_scaled(m[r][col] * minor, sign);
    sign = -sign;
  }
  return acc;
}

}  // namespace

QuasiPolynomial characteristic_qp(const DelaySystem& sys) {
  const int n = sys.order();
  if (n > 8) throw std::invalid_argument("characteristic_qp: system order above the n <= 8 guard");

  std::vector<std::vector<Bivar>> m(n, std::vector<Bivar>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      m[i][j] = Bivar::entry(i == j ? 1.0 : 0.0, sys.A0(i, j), sys.A1(i, j));

  std::vector<int> rows(n);
  for (int i = 0; i < n; ++i) rows[i] = i;
  Bivar det = det_rec(m, rows, 0);

  size_t zmax = 0;
  for (const auto& row : det.c) zmax = std::max(zmax, row.size());
  std::vector<Polynomial> terms;
  for (size_t k = 0; k < zmax; ++k) {
    std::vector<double> coeff(det.c.size(), 0.0);
    for (size_t i = 0; i < det.c.size(); ++i) coeff[i] = k < det.c[i].size() ? det.c[i][k] : 0.0;
    terms.emplace_back(std::move(coeff));
  }
  return QuasiPolynomial(std::move(terms));
}

}  // namespace taumax
