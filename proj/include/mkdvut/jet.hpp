#pragma once
#include <cmath>
#include <vector>

#include "mkdvut/errors.hpp"

namespace mkdvut {

// Truncated Taylor series at a point: c[k] = f^(k)/k!.  Used to get exact
// derivatives of the closed-form data profiles without writing out the
// chain rule by hand.  Order stays small (<= 8) so the O(n^2) products
// are irrelevant.
struct Jet {
  std::vector<double> c;

  explicit Jet(int order) : c(size_t(order) + 1, 0.0) {}
  int order() const { return int(c.size()) - 1; }

  static Jet variable(double x0, int order) {
    Jet j(order);
    j.c[0] = x0;
    if (order >= 1) j.c[1] = 1.0;
    return j;
  }
  static Jet constant(double v, int order) {
    Jet j(order);
    j.c[0] = v;
    return j;
  }

  // k-th derivative value
  double deriv(int k) const {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return c[size_t(k)] * f;
  }
};

inline Jet operator+(const Jet& a, const Jet& b) {
  Jet r = a;
  for (size_t k = 0; k < r.c.size(); ++k) r.c[k] += b.c[k];
  return r;
}
inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r = a;
  for (size_t k = 0; k < r.c.size(); ++k) r.c[k] -= b.c[k];
  return r;
}
inline Jet operator*(const Jet& a, double s) {
  Jet r = a;
  for (double& v : r.c) v *= s;
  return r;
}
inline Jet operator*(double s, const Jet& a) { return a * s; }
inline Jet operator+(const Jet& a, double s) {
  Jet r = a;
  r.c[0] += s;
  return r;
}
inline Jet operator+(double s, const Jet& a) { return a + s; }
inline Jet operator-(const Jet& a, double s) { return a + (-s); }
inline Jet operator-(double s, const Jet& a) { return a * -1.0 + s; }

inline Jet operator*(const Jet& a, const Jet& b) {
  Jet r(a.order());
  for (size_t k = 0; k < r.c.size(); ++k) {
    double s = 0.0;
    for (size_t j = 0; j <= k; ++j) s += a.c[j] * b.c[k - j];
    r.c[k] = s;
  }
  return r;
}

inline Jet operator/(const Jet& a, const Jet& b) {
  if (b.c[0] == 0.0) throw ZeroDenominator("Jet division by zero constant term");
  Jet r(a.order());
  for (size_t k = 0; k < r.c.size(); ++k) {
    double s = a.c[k];
    for (size_t j = 1; j <= k; ++j) s -= b.c[j] * r.c[k - j];
    r.c[k] = s / b.c[0];
  }
  return r;
}

inline Jet jet_exp(const Jet& a) {
  Jet r(a.order());
  r.c[0] = std::exp(a.c[0]);
  for (size_t k = 1; k < r.c.size(); ++k) {
    double s = 0.0;
    for (size_t j = 1; j <= k; ++j) s += double(j) * a.c[j] * r.c[k - j];
    r.c[k] = s / double(k);
  }
  return r;
}

// sech via the exponential whose argument is nonpositive at the base point,
// so nothing overflows for large |x|.
inline Jet jet_sech(const Jet& a) {
  Jet e = jet_exp(a.c[0] >= 0.0 ? a * -1.0 : a);
  return 2.0 * e / (e * e + 1.0);
}

}  // namespace mkdvut
