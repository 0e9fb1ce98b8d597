#include "mkdvut/expint.hpp"

#include <cmath>

#include "mkdvut/errors.hpp"

namespace mkdvut {

namespace {

cplx e1_series(cplx z) {
  // E1 = -gamma - log z + sum_{n>=1} (-1)^{n+1} z^n / (n n!)
  const double euler_gamma = 0.57721566490153286060651209008240243;
  cplx term = 1.0;  // (-z)^n / n!
  cplx sum = 0.0;
  for (int n = 1; n <= 300; ++n) {
    term *= -z / double(n);
    cplx add = -term / double(n);
    sum += add;
    if (std::abs(add) < 1e-18 * (1.0 + std::abs(sum))) break;
  }
  return -euler_gamma - std::log(z) + sum;
}

cplx e1_contfrac(cplx z) {
  // modified Lentz on E1(z) = e^{-z} / (z+1 - 1/(z+3 - 4/(z+5 - 9/(...))))
  const double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i <= 2000; ++i) {
    cplx a = -double(i) * double(i);
    b += 2.0;
    d = a * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    cplx del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-z);
  }
  throw ToleranceNotMet("expint_e1: continued fraction stalled");
}

}  // namespace

cplx expint_e1(cplx z) {
  if (z == cplx(0.0)) throw MomentDivergence("expint_e1: z = 0");
  if (std::imag(z) == 0.0 && std::real(z) < 0.0)
    throw WrongRegion("expint_e1: z on the branch cut (-inf, 0)");
  return std::abs(z) <= 6.0 ? e1_series(z) : e1_contfrac(z);
}

std::vector<cplx> osc_tail_moments(int jmax, double R, double a) {
  if (jmax < 1 || R <= 0.0) throw BadParams("osc_tail_moments: need jmax >= 1, R > 0");
  std::vector<cplx> out(jmax + 1, 0.0);
  if (a == 0.0) {
    for (int j = 2; j <= jmax; ++j) out[j] = std::pow(R, 1.0 - j) / double(j - 1);
    return out;
  }
  // compute for |a| > 0, reflect by conjugation for a < 0
  double aa = std::abs(a);
  std::vector<cplx> I(jmax + 1);
  I[1] = expint_e1(cplx(0.0, -aa * R));
  // upward: I_{j+1} = (i a I_j + R^{-j} e^{iaR}) / j  (by parts); absolute
  // error shrinks with j here, only relative accuracy degrades
  cplx eiaR = std::exp(cplx(0.0, aa * R));
  double Rmj = 1.0 / R;
  for (int j = 1; j < jmax; ++j) {
    I[j + 1] = (cplx(0.0, aa) * I[j] + Rmj * eiaR) / double(j);
    Rmj /= R;
  }
  for (int j = 1; j <= jmax; ++j) out[j] = (a > 0.0 ? I[j] : std::conj(I[j]));
  return out;
}

}  // namespace mkdvut
