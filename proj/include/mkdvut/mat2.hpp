#pragma once
#include <cmath>
#include <complex>

#include "mkdvut/errors.hpp"

namespace mkdvut {

using cplx = std::complex<double>;
using namespace std::complex_literals;

// Complex 2x2 matrix, row-major.  The universal carrier for eigenfunction
// values, jump matrices, and expansion coefficients.
struct Mat2 {
  cplx a11{0.0}, a12{0.0}, a21{0.0}, a22{0.0};

  static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Mat2 zero() { return {}; }
  static Mat2 diag(cplx d1, cplx d2) { return {d1, 0.0, 0.0, d2}; }

  Mat2 operator+(const Mat2& o) const {
    return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22};
  }
  Mat2 operator-(const Mat2& o) const {
    return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22};
  }
  Mat2 operator*(const Mat2& o) const {
    return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
            a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
  }
  Mat2 operator*(cplx s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }
  friend Mat2 operator*(cplx s, const Mat2& m) { return m * s; }
  Mat2& operator+=(const Mat2& o) {
    a11 += o.a11; a12 += o.a12; a21 += o.a21; a22 += o.a22;
    return *this;
  }

  cplx det() const { return a11 * a22 - a12 * a21; }
  cplx trace() const { return a11 + a22; }

  Mat2 inverse() const {
    cplx d = det();
    if (std::abs(d) == 0.0) throw ZeroDenominator("Mat2::inverse: singular matrix");
    return {a22 / d, -a12 / d, -a21 / d, a11 / d};
  }

  // max-abs entry norm; adequate for residual reporting on 2x2 blocks
  double norm() const {
    return std::max(std::max(std::abs(a11), std::abs(a12)),
                    std::max(std::abs(a21), std::abs(a22)));
  }

  bool finite() const {
    auto ok = [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); };
    return ok(a11) && ok(a12) && ok(a21) && ok(a22);
  }

  Mat2 conj() const {
    return {std::conj(a11), std::conj(a12), std::conj(a21), std::conj(a22)};
  }
};

inline Mat2 sigma3() { return Mat2::diag(1.0, -1.0); }
inline Mat2 sigma1() { return {0.0, 1.0, 1.0, 0.0}; }
inline Mat2 sigma2() { return {0.0, -1.0i, 1.0i, 0.0}; }

// sigma_lambda = [[0,1],[-lambda,0]]
inline Mat2 sigma_lambda(int lambda) {
  if (lambda != 1 && lambda != -1) throw BadParams("sigma_lambda: lambda must be +1 or -1");
  return {0.0, 1.0, cplx(-double(lambda)), 0.0};
}

// e^{phi sigma3-hat} A = diag(e^phi, e^-phi) A diag(e^-phi, e^phi):
// diagonal unchanged, A12 *= e^{2phi}, A21 *= e^{-2phi}.
inline Mat2 conj_sigma3(const Mat2& A, cplx phi) {
  double re2 = 2.0 * phi.real();
  // |Re 2phi| beyond ~709 overflows double exponentials; signal instead of Inf
  if (std::abs(re2) > 700.0 &&
      (std::abs(A.a12) != 0.0 || std::abs(A.a21) != 0.0))
    throw RangeError("conj_sigma3: |Re 2phi| exceeds exponent range");
  cplx e2 = std::exp(2.0 * phi);
  return {A.a11, A.a12 * e2, A.a21 / e2, A.a22};
}

}  // namespace mkdvut
