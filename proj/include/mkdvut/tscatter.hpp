#pragma once
#include <string>
#include <utility>
#include <vector>

#include "mkdvut/mat2.hpp"
#include "mkdvut/panelgrid.hpp"
#include "mkdvut/profiles.hpp"

namespace mkdvut {

// t-part of the Lax pair on [0, T_trunc]. The coefficient matrix is cubic
// in k, built from the boundary values g0 = u(0,t), g1 = u_x(0,t),
// g2 = u_xx(0,t):
//
//   V(t,k) = -4k^2 g0 s3 sl - 2i lambda k g0^2 s3 + 2ik g1 sl
//            + (g2 - 2 lambda g0^3) s3 sl,        sl = [[0,1],[-lambda,0]].
//
// Column systems (the commutator with s3 splits into scalar phases):
//
//   column 2:  psi' = diag(-8ik^3, 0) psi + V psi,
//              psi(T) = (0,1), marched T -> 0, bounded for Im k^3 >= 0;
//   column 1:  phi' = diag(0, 8ik^3) phi + V phi,  phi(T) = (1,0),
//              bounded for Im k^3 <= 0;
//   U columns: same systems marched 0 -> t from U(0) = I, entire in k.
//
// T normalizes at T_trunc instead of infinity; the dropped tail is bounded
// by the profile's tail integral and reported in tail_budget.

// One solved column (or, for U, the full matrix) tabulated on the t-grid.
// column: 1 or 2; 0 means both columns are populated (U). Unused column
// slots stay zero.
struct TEigenSolution {
  cplx k = 0.0;
  int column = 2;
  PanelGrid grid;
  std::vector<Mat2> values;  // at grid.nodes(), ascending
  Mat2 at0;                  // edge value at t = 0 (exact, not interpolated)
  Mat2 atT;                  // edge value at t = T_trunc
  std::string method;        // "ode", "picard(l)", "asymptotic"
  double tail_budget = 0.0;  // normalization-at-T error estimate

  Mat2 eval(double t) const;  // per-entry barycentric interpolation
};

// Large-k expansion coefficients on the t-grid, j = 0..m+3 (three orders
// past m because the phase is cubic in k):
//   T ~ I + T_1/k + ... + T_{m+3}/k^{m+3}              (normalized at T)
//   U ~ (I + V_1/k + ...) + (W_1/k + ...) e^{8ik^3 t s3}   (normalized at 0).
// Generated by the off-diagonal/diagonal splitting recursions; with
// c = g2 - 2 lambda g0^3 the off-diagonal part is pointwise,
//   T_j^(o) = (i/8) s3 [ (T_{j-3}^(o))' + 4 g0 s3 sl T_{j-1}^(d)
//                        + 2i lambda g0^2 s3 T_{j-2}^(o)
//                        - 2i g1 sl T_{j-2}^(d) - c s3 sl T_{j-3}^(d) ],
// and the diagonal part integrates a same-shape bracket of levels
// j-1..j-3 with T_j^(d)(T) = 0. V_j satisfies the identical recursion;
// for W the two parities swap roles (diagonal pointwise, off-diagonal
// integrated). Integration constants enforce V_j(0) + W_j(0) = 0.
struct TAsymCoeffs {
  int m = 0;
  int lambda = 1;
  PanelGrid grid;
  // [j][node]; j = 0 holds the leading term (I for T and V, 0 for W)
  std::vector<std::vector<Mat2>> T, V, W;
  // values at t = 0, consistent with the integration constants, so
  // V0[j] + W0[j] == 0 holds bitwise
  std::vector<Mat2> T0, V0, W0;
  std::vector<cplx> Aj, Bj;  // Aj[j] = (T_j(0))_22, Bj[j] = (T_j(0))_12

  Mat2 T_at(int j, double t) const;
  Mat2 V_at(int j, double t) const;
  Mat2 W_at(int j, double t) const;
};

// Spectral functions on a k-grid: A(k) = (T(0,k))_22, B(k) = (T(0,k))_12.
struct ABTableT {
  std::vector<cplx> k, A, B;
};

// Coefficient matrix V(t, k) of the t-part; defined for every (t, k).
Mat2 build_V(const BoundaryProfile& p, double t, cplx k);

// Marched column solutions. npanels = 0 picks the default paneling for the
// profile; a positive value overrides it (used by the order-of-accuracy
// tests). tol selects the collocation density and must be >= 1e-13.
// WrongRegion outside the closed boundedness region of the column.
TEigenSolution solve_T_col2(const BoundaryProfile& p, cplx k, double tol, int npanels = 0);
// column 1 is produced from column 2 at conj(k) through the lambda symmetry
// T(t,k) = s1 conj(T(t,conj k)) s1 (lambda=1) / s2 ... s2 (lambda=-1)
TEigenSolution solve_T_col1(const BoundaryProfile& p, cplx k, double tol, int npanels = 0);
// full 2x2 U with U(0) = I exact; defined for every finite k, but the
// column growth reaches e^{8|Im k^3| T}, and ToleranceNotMet is thrown
// when that trajectory cannot stay inside the double range
TEigenSolution solve_U(const BoundaryProfile& p, cplx k, double tol, int npanels = 0);

// A, B on a grid with Im k^3 >= 0. |k| <= k_switch reads T(0,k) from the
// marched ODE solution; beyond that the truncated series hat T(0,k) with
// m = 4 is used (the two agree to ~10x tol in a ring around the default
// crossover |k| = 25).
ABTableT spectral_AB(const BoundaryProfile& p, const std::vector<cplx>& kgrid,
                     double tol = 1e-10, double k_switch = 25.0);

// Coefficient tables up to j = m+3. Needs g_j-derivatives of order about
// (m+5-j)/3 (DerivUnavailable beyond the profile's order): m <= 4.
TAsymCoeffs t_asym_coeffs(const BoundaryProfile& p, int m);

// (hat T, hat U) at (t, k); k != 0. hat U = hat V + hat W e^{8ik^3 t s3};
// RangeError if the exponential factor leaves the double range.
std::pair<Mat2, Mat2> hat_TU(const TAsymCoeffs& coeffs, double t, cplx k);

// Picard partial sum Psi_0 + ... + Psi_l for column 2 of T by iterated
// quadrature of Psi_{l+1}(t) = -int_t^T diag(e^{8ik^3(t'-t)},1) V Psi_l dt'.
// Test oracle only: O(l * grid) work, l <= 12. term_sup, when given,
// receives the sup-norm of each term Psi_1..Psi_l.
TEigenSolution picard_oracle_T(const BoundaryProfile& p, cplx k, int l,
                               std::vector<double>* term_sup = nullptr);
// same iteration for the full U matrix, Phi_0 = I, integrated from 0
TEigenSolution picard_oracle_U(const BoundaryProfile& p, cplx k, int l,
                               std::vector<double>* term_sup = nullptr);

}  // namespace mkdvut
