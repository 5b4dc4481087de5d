#include "taumax/polynomial.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace taumax {

void Polynomial::normalize() {
  if (c_.empty()) {
    c_ = {0.0};
    return;
  }
  double mx = 0.0;
  for (double v : c_) mx = std::max(mx, std::abs(v));
  const double tol = 1e-12 * mx;
  while (c_.size() > 1 && std::abs(c_.back()) <= tol) c_.pop_back();
  if (c_.size() == 1 && std::abs(c_[0]) <= tol) c_[0] = 0.0;
}

Polynomial Polynomial::operator+(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] += o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator-(const Polynomial& o) const {
  std::vector<double> r(std::max(c_.size(), o.c_.size()), 0.0);
  for (size_t i = 0; i < c_.size(); ++i) r[i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i) r[i] -= o.c_[i];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(const Polynomial& o) const {
  if (is_zero() || o.is_zero()) return Polynomial{};
  std::vector<double> r(c_.size() + o.c_.size() - 1, 0.0);
  for (size_t i = 0; i < c_.size(); ++i)
    for (size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
  return Polynomial(std::move(r));
}

Polynomial Polynomial::operator*(double s) const {
  std::vector<double> r(c_);
  for (double& v : r) v *= s;
  return Polynomial(std::move(r));
}

Polynomial Polynomial::derivative() const {
  if (c_.size() <= 1) return Polynomial{};
  std::vector<double> r(c_.size() - 1);
  for (size_t i = 1; i < c_.size(); ++i) r[i - 1] = c_[i] * static_cast<double>(i);
  return Polynomial(std::move(r));
}

Complex Polynomial::eval(Complex x) const {
  Complex r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

double Polynomial::eval(double x) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
  return r;
}

double Polynomial::eval_bound(double absx) const {
  double r = 0.0;
  for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * absx + std::abs(*it);
  return r;
}

namespace {

Complex eval_poly(const std::vector<double>& c, Complex x) {
  Complex r = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) r = r * x + *it;
  return r;
}

// Few Newton steps; keep the polish only while the residual improves.
Complex newton_polish(const std::vector<double>& c, const std::vector<double>& dc, Complex z) {
  double best = std::abs(eval_poly(c, z));
  Complex zb = z;
  for (int it = 0; it < 8; ++it) {
    Complex d = eval_poly(dc, z);
    if (std::abs(d) == 0.0) break;
    z -= eval_poly(c, z) / d;
    double r = std::abs(eval_poly(c, z));
    if (r < best) {
      best = r;
      zb = z;
    } else {
      break;
    }
  }
  return zb;
}

}  // namespace

std::vector<Complex> Polynomial::roots() const {
  if (is_zero()) throw std::runtime_error("roots of zero polynomial undefined");
  std::vector<Complex> out;
  std::vector<double> c = c_;

  // deflate exact/near-exact roots at the origin
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  while (c.size() > 1 && std::abs(c.front()) <= 1e-14 * mx) {
    out.emplace_back(0.0, 0.0);
    c.erase(c.begin());
  }
  const int n = static_cast<int>(c.size()) - 1;
  if (n < 1) return out;
  if (n == 1) {
    out.emplace_back(-c[0] / c[1], 0.0);
    return out;
  }

  Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) comp(i, n - 1) = -c[i] / c[n];

  Eigen::EigenSolver<Eigen::MatrixXd> es(comp, /*computeEigenvectors=*/false);
  std::vector<double> dc(n);
  for (int i = 1; i <= n; ++i) dc[i - 1] = c[i] * i;
  dc.resize(n);
  for (int i = 0; i < n; ++i) {
    Complex z = es.eigenvalues()(i);
    out.push_back(newton_polish(c, dc, z));
  }
  return out;
}

std::vector<Polynomial::RealRoot> Polynomial::real_roots(double imag_tol) const {
  std::vector<double> re;
  for (const Complex& z : roots())
    if (std::abs(z.imag()) <= imag_tol * (1.0 + std::abs(z.real()))) re.push_back(z.real());
  std::sort(re.begin(), re.end());

  std::vector<RealRoot> out;
  for (double r : re) {
    if (!out.empty() && std::abs(r - out.back().value) <= 1e-8 * (1.0 + std::abs(r)))
      out.back().multiplicity += 1;
    else
      out.push_back({r, 1});
  }
  return out;
}

RationalFunction::RationalFunction(Polynomial n, Polynomial d) : num(std::move(n)), den(std::move(d)) {
  if (den.is_zero()) throw std::invalid_argument("rational function with zero denominator");
}

void RationalFunction::scale_down(double s) {
  if (s == 0.0 || !std::isfinite(s)) return;
  num = num * (1.0 / s);
  den = den * (1.0 / s);
}

}  // namespace taumax
