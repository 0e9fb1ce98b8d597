#pragma once
#include <vector>

#include "mkdvut/mat2.hpp"

namespace mkdvut {

// Principal-branch exponential integral E1(z), valid off the cut
// (-inf, 0]. Series for small |z|, continued fraction for large.
cplx expint_e1(cplx z);

// Oscillatory tail moments I_j = \int_R^inf e^{i a s} s^{-j} ds for real a,
// j = 1..jmax. Returned vector is 1-based: out[j] = I_j, out[0] = 0.
// For a == 0 the j = 1 integral diverges; out[1] is set to 0 in that case
// and callers must only use it with a vanishing coefficient.
std::vector<cplx> osc_tail_moments(int jmax, double R, double a);

}  // namespace mkdvut
