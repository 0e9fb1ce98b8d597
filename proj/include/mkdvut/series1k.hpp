#pragma once
#include <vector>

#include "mkdvut/errors.hpp"
#include "mkdvut/mat2.hpp"

namespace mkdvut {

// Truncated expansion sum_{j=0}^{J} c_j k^{-j}; the small algebra needed to
// divide spectral-function expansions (h_j, tail series of jump data).
struct Series1k {
  std::vector<cplx> c;  // c[j] multiplies k^{-j}

  Series1k() = default;
  explicit Series1k(int order) : c(order + 1, 0.0) {}
  static Series1k one(int order) {
    Series1k s(order);
    s.c[0] = 1.0;
    return s;
  }
  int order() const { return int(c.size()) - 1; }

  Series1k operator+(const Series1k& o) const {
    Series1k r(std::max(order(), o.order()));
    for (size_t j = 0; j < c.size(); ++j) r.c[j] += c[j];
    for (size_t j = 0; j < o.c.size(); ++j) r.c[j] += o.c[j];
    return r;
  }
  Series1k operator-(const Series1k& o) const {
    Series1k r(std::max(order(), o.order()));
    for (size_t j = 0; j < c.size(); ++j) r.c[j] += c[j];
    for (size_t j = 0; j < o.c.size(); ++j) r.c[j] -= o.c[j];
    return r;
  }
  // Cauchy product, truncated at the shorter operand: coefficients past
  // min(orders) would need terms lost to truncation.
  Series1k operator*(const Series1k& o) const {
    int J = std::min(order(), o.order());
    Series1k r(J);
    for (int j = 0; j <= J; ++j)
      for (int i = 0; i <= j; ++i) r.c[j] += c[i] * o.c[j - i];
    return r;
  }
  Series1k operator*(cplx s) const {
    Series1k r = *this;
    for (auto& v : r.c) v *= s;
    return r;
  }

  // 1/this, requires nonzero constant term
  Series1k reciprocal() const {
    if (std::abs(c[0]) < 1e-300) throw ZeroDenominator("Series1k::reciprocal: zero constant term");
    Series1k r(order());
    r.c[0] = 1.0 / c[0];
    for (int j = 1; j <= order(); ++j) {
      cplx s = 0.0;
      for (int i = 1; i <= j; ++i) s += c[i] * r.c[j - i];
      r.c[j] = -s / c[0];
    }
    return r;
  }

  // coefficients of k -> conj(f(kbar)), i.e. c_j -> conj(c_j)
  Series1k conj_reflect() const {
    Series1k r = *this;
    for (auto& v : r.c) v = std::conj(v);
    return r;
  }

  // coefficients of k -> conj(f(-kbar)), i.e. c_j -> (-1)^j conj(c_j)
  Series1k mirror() const {
    Series1k r = *this;
    for (int j = 0; j <= r.order(); ++j) r.c[j] = (j % 2 ? -std::conj(r.c[j]) : std::conj(r.c[j]));
    return r;
  }

  cplx eval(cplx k) const {
    // Horner in 1/k
    cplx ik = 1.0 / k, s = 0.0;
    for (int j = order(); j >= 0; --j) s = s * ik + c[j];
    return s;
  }
};

}  // namespace mkdvut
