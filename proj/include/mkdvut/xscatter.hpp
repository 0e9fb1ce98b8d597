#pragma once
#include <string>
#include <utility>
#include <vector>

#include "mkdvut/mat2.hpp"
#include "mkdvut/panelgrid.hpp"
#include "mkdvut/profiles.hpp"

namespace mkdvut {

// x-part of the Lax pair on [0, L_trunc]:
//
//   column 2:  psi' = diag(2ik, 0) psi + U psi,   U = [[0,u],[lambda u,0]],
//              psi(L) = (0,1),  marched L -> 0, bounded for Im k <= 0;
//   column 1:  phi' = diag(0,-2ik) phi + U phi,   phi(L) = (1,0), Im k >= 0;
//   Y columns: same systems marched 0 -> x from Y(0) = I, entire in k.
//
// X normalizes at L_trunc instead of infinity; the dropped tail is bounded by
// the profile's tail integral and reported in tail_budget.

// One solved column (or, for Y, the full matrix) tabulated on the x-grid.
// column: 1 or 2; 0 means both columns are populated (Y). Unused column
// slots stay zero.
struct XEigenSolution {
  cplx k = 0.0;
  int column = 2;
  PanelGrid grid;
  std::vector<Mat2> values;  // at grid.nodes(), ascending
  Mat2 at0;                  // edge value at x = 0 (exact, not interpolated)
  Mat2 atL;                  // edge value at x = L_trunc
  std::string method;        // "ode", "picard(l)", "asymptotic"
  double tail_budget = 0.0;  // normalization-at-L error estimate

  Mat2 eval(double x) const;  // per-entry barycentric interpolation
};

// Large-k expansion coefficients on the x-grid, j = 0..m+1:
//   X ~ I + X_1/k + ...                                (normalized at L)
//   Y ~ I + Z_1/k + ... + (W_1/k + ...) e^{-2ikx s3}   (normalized at 0)
// Generated by the off-diagonal/diagonal splitting recursions
//   X_{j+1}^(o) =          -(i/2) s3 (X_j^(o)' - U X_j^(d)),
//   X_{j+1}^(d)(x) = -int_x^L (i/2) s3 U (X_j^(o)' - U X_j^(d)) dx'
// (Z likewise but integrated from 0), and for W the parities swap:
//   W_{j+1}^(d) =          -(i/2) s3 (W_j^(d)' - U W_j^(o)),
//   W_{j+1}^(o)(x) = W_{j+1}^(o)(0) + int_0^x (i/2) s3 U (W_j^(d)' - U W_j^(o)) dx'.
// Integration constants enforce Z_j(0) + W_j(0) = 0.
struct XAsymCoeffs {
  int m = 0;
  int lambda = 1;
  PanelGrid grid;
  // [j][node]; j = 0 holds the leading term (I for X and Z, 0 for W)
  std::vector<std::vector<Mat2>> X, Z, W;
  // values at x = 0, consistent with the integration constants, so
  // Z0[j] + W0[j] == 0 holds bitwise
  std::vector<Mat2> X0, Z0, W0;
  std::vector<cplx> aj, bj;  // aj[j] = (X_j(0))_22, bj[j] = (X_j(0))_12

  Mat2 X_at(int j, double x) const;
  Mat2 Z_at(int j, double x) const;
  Mat2 W_at(int j, double x) const;
};

// Spectral functions on a k-grid: a(k) = (X(0,k))_22, b(k) = (X(0,k))_12.
struct ABTable {
  std::vector<cplx> k, a, b;
};

// Marched column solutions. npanels = 0 picks the default paneling for the
// profile; a positive value overrides it (used by the order-of-accuracy
// tests). tol selects the collocation density and must be >= 1e-13.
XEigenSolution solve_X_col2(const InitialProfile& p, cplx k, double tol, int npanels = 0);
// column 1 is produced from column 2 at conj(k) through the lambda symmetry
// X(x,k) = s1 conj(X(x,conj k)) s1 (lambda=1) / s2 ... s2 (lambda=-1)
XEigenSolution solve_X_col1(const InitialProfile& p, cplx k, double tol, int npanels = 0);
// full 2x2 Y with Y(0) = I exact; defined for every finite k, but the
// per-panel growth guard still rejects |Im k| L beyond the engine slack
XEigenSolution solve_Y(const InitialProfile& p, cplx k, double tol, int npanels = 0);

// a, b on a grid with Im k <= 0. |k| <= k_switch reads X(0,k) from the
// marched ODE solution; beyond that the truncated series hat X(0,k) with
// m = 4 is used (the two agree to ~10x tol in a ring around the default
// crossover |k| = 30).
ABTable spectral_ab(const InitialProfile& p, const std::vector<cplx>& kgrid,
                    double tol = 1e-10, double k_switch = 30.0);

// Coefficient tables up to j = m+1. Needs u-derivatives through order m+1
// (DerivUnavailable beyond the profile's order): m <= 4.
XAsymCoeffs x_asym_coeffs(const InitialProfile& p, int m);

// (hat X, hat Y) at (x, k); k != 0. hat Y = hat Z + hat W e^{-2ikx s3};
// RangeError if the exponential factor leaves the double range.
std::pair<Mat2, Mat2> hat_XY(const XAsymCoeffs& coeffs, double x, cplx k);

// Picard partial sum Psi_0 + ... + Psi_l for column 2 of X by iterated
// quadrature of Psi_{l+1}(x) = -int_x^L diag(e^{2ik(x-x')},1) U Psi_l dx'.
// Test oracle only: O(l * grid) work, l <= 12. term_sup, when given,
// receives the sup-norm of each term Psi_1..Psi_l.
XEigenSolution picard_oracle_X(const InitialProfile& p, cplx k, int l,
                               std::vector<double>* term_sup = nullptr);

}  // namespace mkdvut
