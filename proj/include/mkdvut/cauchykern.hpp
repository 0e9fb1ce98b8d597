#pragma once
#include <vector>

#include "mkdvut/mat2.hpp"

namespace mkdvut {

// Radius of the Bernstein ellipse through z; equals 1 on [-1,1].
double bernstein_radius(cplx z);

// Legendre functions of the second kind Q_0..Q_nmax off [-1,1], principal
// branch, forward recursion. Absolute error grows like eps * rho^nmax with
// rho = bernstein_radius(z), so keep rho^nmax moderate.
std::vector<cplx> legendre_Q(int nmax, cplx z);

// Boundary values Q_n(x + i0 * side) for x in (-1,1), side = +1 or -1:
// Q_n(x +- i0) = Q_n^PV(x) -+ (i pi / 2) P_n(x).
std::vector<cplx> legendre_Q_boundary(int nmax, double x, int side);

// Nodal weights approximating \int_{-1}^{1} f(s)/(s - z) ds with f sampled
// at the q-point Gauss-Legendre nodes.
//   side = 0:   z off [-1,1]. Near the panel (rho < 2.5) the weights come
//               from exact Legendre moments, so the near-singularity costs
//               no accuracy; farther away plain quadrature is used.
//   side = +-1: z real in (-1,1), boundary value from Im > 0 / Im < 0.
std::vector<cplx> cauchy_panel_weights(int q, cplx z, int side = 0);

}  // namespace mkdvut
