#pragma once
#include <functional>
#include <vector>

#include "mkdvut/mat2.hpp"
#include "mkdvut/panelgrid.hpp"

namespace mkdvut {

// Marching collocation solver for 2-component linear systems
//   psi'(y) = diag(lam1, lam2) psi(y) + M(y) psi(y)
// with the value prescribed at one end of the grid. The stiff diagonal is
// handled through exact exponential moments of Legendre polynomials. Panels
// where the local exponential is resolved (|h lam| <~ 0.3q) or strongly
// damped use plain retarded-kernel collocation; moderately oscillatory
// panels are marched as resolved subpanels; panels with |h lam| > 10q
// switch to an augmented basis p(s) + e^{h lam (s+1)} r(s), both polynomial
// envelopes fitted by least squares at 4q collocation targets (the square
// 2q-point system loses rank near |h lam| ~ 4q and at isolated aliasing
// spots), so accuracy stays spectral uniformly in |lam|. The marching
// direction has to keep Re(h lam) below re_beta_slack on every panel,
// otherwise the local exponentials blow up and WrongHalfPlane is thrown.
struct VolterraSolution {
  PanelGrid grid;  // nodes ascending regardless of marching direction
  bool backward = false;
  std::vector<cplx> psi1, psi2;    // values at grid.nodes()
  std::vector<cplx> edge1, edge2;  // values at grid.breaks()
  cplx end1 = 0.0, end2 = 0.0;     // value at the terminal edge

  // Interpolates the per-panel collocation polynomial. Exact at nodes and
  // accurate for smooth components; a stiff boundary layer inside a panel
  // is only represented at the nodes, so prefer breaks/nodes for those.
  cplx eval1(double y) const { return grid.interp(psi1, y); }
  cplx eval2(double y) const { return grid.interp(psi2, y); }
};

// Marches from grid.a() upward, or from grid.b() downward if backward.
// (in1, in2) is psi at the starting edge. M is evaluated at collocation
// nodes unless Mvals (values at grid.nodes(), ascending) is nonempty.
VolterraSolution volterra_solve(const PanelGrid& grid, bool backward, cplx lam1, cplx lam2,
                                const std::function<Mat2(double)>& M,
                                const std::vector<Mat2>& Mvals, cplx in1, cplx in2,
                                double re_beta_slack = 30.0);

// Moment table J[t*q + n] = \int_{-1}^{xi_t} e^{beta (xi_t - s)} P_n(s) ds
// for n = 0..q-1, where xi_t are the q Gauss-Legendre nodes and xi_q = +1.
// Brute quadrature for |beta| <= 40, upward recursion beyond (stable there
// for q <= 24, which is enforced).
std::vector<cplx> volterra_moments(int q, cplx beta);

}  // namespace mkdvut
