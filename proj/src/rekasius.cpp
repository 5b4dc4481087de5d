#include "taumax/rekasius.hpp"

#include <stdexcept>

namespace taumax {

Complex BivariateST::eval(Complex s, double t) const {
  Complex r = 0.0;
  for (auto it = s_coeffs.rbegin(); it != s_coeffs.rend(); ++it) r = r * s + it->eval(t);
  return r;
}

namespace {

// binomial coefficients for a fixed small n
std::vector<double> binom_row(int n) {
  std::vector<double> b(n + 1, 1.0);
  for (int i = 1; i <= n; ++i) b[i] = b[i - 1] * (n - i + 1) / i;
  return b;
}

}  // namespace

BivariateST rekasius_transform(const QuasiPolynomial& qp) {
  if (qp.term(0).is_zero()) throw std::runtime_error("not a retarded-type quasi-polynomial");
  const int n = static_cast<int>(qp.term_count()) - 1;

  // acc[i][m]: coefficient of s^i T^m
  std::vector<std::vector<double>> acc;
  auto add = [&acc](size_t i, size_t m, double v) {
    if (acc.size() <= i) acc.resize(i + 1);
    if (acc[i].size() <= m) acc[i].resize(m + 1, 0.0);
    acc[i][m] += v;
  };

  for (int k = 0; k <= n; ++k) {
    // (1 - sT)^k (1 + sT)^{n-k} is a polynomial in the product (sT)
    std::vector<double> f(n + 1, 0.0);
    const auto bk = binom_row(k);
    const auto bn = binom_row(n - k);
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= n - k; ++b) f[a + b] += (a % 2 ? -1.0 : 1.0) * bk[a] * bn[b];

    const auto& p = qp.term(k).coeffs();
    for (size_t j = 0; j < p.size(); ++j) {
      if (p[j] == 0.0) continue;
      for (int m = 0; m <= n; ++m)
        if (f[m] != 0.0) add(j + m, m, p[j] * f[m]);
    }
  }

  BivariateST out;
  for (auto& row : acc) out.s_coeffs.emplace_back(std::move(row));
  while (out.s_coeffs.size() > 1 && out.s_coeffs.back().is_zero()) out.s_coeffs.pop_back();
  return out;
}

}  // namespace taumax
