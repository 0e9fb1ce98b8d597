#include "mkdvut/cauchykern.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "mkdvut/errors.hpp"
#include "mkdvut/quad.hpp"

namespace mkdvut {

namespace {

// T[n][j] = (n + 1/2) w_j P_n(xi_j): nodal values -> Legendre coefficients,
// exact for the degree q-1 interpolant
const std::vector<double>& coeff_matrix(int q) {
  static std::map<int, std::vector<double>> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(q);
  if (it != cache.end()) return it->second;
  const GaussRule& gr = gauss_legendre(q);
  std::vector<double> T(size_t(q) * q);
  for (int j = 0; j < q; ++j) {
    std::vector<double> P = legendre_all(q - 1, gr.x[j]);
    for (int n = 0; n < q; ++n) T[size_t(n) * q + j] = (n + 0.5) * gr.w[j] * P[n];
  }
  return cache.emplace(q, std::move(T)).first->second;
}

std::vector<cplx> q_recursion(int nmax, cplx Q0, cplx Q1, cplx z) {
  std::vector<cplx> Q(nmax + 1);
  Q[0] = Q0;
  if (nmax >= 1) Q[1] = Q1;
  for (int n = 1; n < nmax; ++n) Q[n + 1] = ((2 * n + 1.0) * z * Q[n] - double(n) * Q[n - 1]) / (n + 1.0);
  return Q;
}

}  // namespace

double bernstein_radius(cplx z) {
  cplx s = std::sqrt(z * z - 1.0);
  return std::max(std::abs(z + s), std::abs(z - s));
}

std::vector<cplx> legendre_Q(int nmax, cplx z) {
  if (std::imag(z) == 0.0 && std::abs(std::real(z)) <= 1.0)
    throw TooCloseToContour("legendre_Q: z on [-1,1], need a side");
  cplx Q0 = 0.5 * std::log((z + 1.0) / (z - 1.0));
  return q_recursion(nmax, Q0, z * Q0 - 1.0, z);
}

std::vector<cplx> legendre_Q_boundary(int nmax, double x, int side) {
  if (side != 1 && side != -1) throw BadParams("legendre_Q_boundary: side must be +-1");
  if (!(x > -1.0 && x < 1.0)) throw BadParams("legendre_Q_boundary: x must lie in (-1,1)");
  const double pi = 3.14159265358979323846;
  cplx Q0 = 0.5 * std::log((1.0 + x) / (1.0 - x)) - cplx(0.0, side * pi / 2.0);
  return q_recursion(nmax, Q0, x * Q0 - 1.0, x);
}

std::vector<cplx> cauchy_panel_weights(int q, cplx z, int side) {
  if (q < 2) throw BadParams("cauchy_panel_weights: q < 2");
  const GaussRule& gr = gauss_legendre(q);
  std::vector<cplx> Q;
  if (side == 0) {
    if (std::imag(z) == 0.0 && std::abs(std::real(z)) <= 1.0)
      throw TooCloseToContour("cauchy_panel_weights: target on the panel, need a side");
    if (bernstein_radius(z) >= 2.5) {
      // far target: integrand smooth, plain quadrature beats the recursion
      std::vector<cplx> w(q);
      for (int j = 0; j < q; ++j) w[j] = gr.w[j] / (gr.x[j] - z);
      return w;
    }
    Q = legendre_Q(q - 1, z);
  } else {
    Q = legendre_Q_boundary(q - 1, std::real(z), side);
  }
  // int P_n(s)/(s - z) ds = -2 Q_n(z) (Neumann), so w_j = sum_n -2 Q_n T[n][j]
  const std::vector<double>& T = coeff_matrix(q);
  std::vector<cplx> w(q, 0.0);
  for (int n = 0; n < q; ++n)
    for (int j = 0; j < q; ++j) w[j] += -2.0 * Q[n] * T[size_t(n) * q + j];
  return w;
}

}  // namespace mkdvut
