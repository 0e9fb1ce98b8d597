#include "mkdvut/tscatter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <functional>

#include "mkdvut/contour.hpp"
#include "mkdvut/errors.hpp"
#include "mkdvut/volterra.hpp"

namespace mkdvut {

namespace {

bool in_lower_sectors(cplx k) {  // open sectors with Im k^3 < 0
  Region r = classify(k).region;
  return r == Region::D2 || r == Region::D4;
}

// Paneling for the t-interval. A floor of ~1.25-wide panels is refined by a
// sampled density with terms for the boundary-data rate, the slow (dressed)
// rate of the column system at this k, and the per-panel growth cap
// Re(h lam) <= 30 of the marching engine. Breakpoints sit at equal quantiles
// of the accumulated density, so sharp data features pull panels in without
// inflating the count elsewhere.
PanelGrid default_tgrid(const BoundaryProfile& p, double tol, int npanels, const cplx* k,
                        double growth) {
  double T = p.T_trunc();
  int q = tol >= 1e-4 ? 8 : (tol >= 1e-9 ? 12 : 16);
  if (npanels > 0) return PanelGrid::uniform(0.0, T, npanels, q);

  int cells = 40 * std::min(64, std::max(1, int(std::ceil(T))));
  double dt = T / cells;
  double cap = 0.3 * q;  // resolved phase mass per panel
  // When the neutral part of the 8k^3 oscillation fits in the panel budget,
  // resolve it down to plain-collocation panels: the engine's mid-band
  // (per-panel phase beyond resolved but below the augmented-basis handoff)
  // is its least accurate regime, so buying out of it is worth the panels.
  // Past the budget, leave the grid data-driven and let the augmented basis
  // carry the phase. The damped part needs no resolution either way.
  double osc = 0.0;
  if (k) {
    double rate = 8.0 * std::abs((*k * *k * *k).real());
    if (T * rate / cap <= 512.0) osc = rate;
  }
  std::vector<double> cum(cells + 1, 0.0);
  double prev = 0.0;
  for (int i = 0; i <= cells; ++i) {
    double t = std::min(T, i * dt);
    double w;
    if (k) {
      w = 2.0 * std::abs(p.eval(0, t, 1)) + std::abs(p.eval(1, t, 1)) +
          std::abs(p.eval(2, t, 1)) + osc;
      Mat2 V = build_V(p, t, *k);
      double row = std::max(std::abs(V.a11) + std::abs(V.a12),
                            std::abs(V.a21) + std::abs(V.a22));
      cplx k3 = *k * *k * *k;
      double ak3 = 8.0 * std::abs(k3);
      // once the phase dominates, the effective rate of the non-stiff
      // component collapses to the dressed one: the O(k) diagonal of V is
      // cancelled by the slaved off-diagonal coupling
      w += (ak3 >= 4.0 * row && ak3 > 0.0)
               ? std::abs(V.a22 + V.a12 * V.a21 / (8.0i * k3))
               : row;
    } else {
      // coefficient-recursion grids: weight each g_j by the degree it
      // reaches in the recursion products
      w = 6.0 * std::abs(p.eval(0, t, 1)) + 3.0 * std::abs(p.eval(1, t, 1)) +
          3.0 * std::abs(p.eval(2, t, 1));
    }
    double d = 0.8 + w / cap + growth / 24.0;
    if (i > 0) cum[i] = cum[i - 1] + 0.5 * (prev + d) * dt;
    prev = d;
  }

  int np = std::clamp(int(std::ceil(cum[cells])),
                      std::max(8, int(std::ceil(T / 1.25))), 512);
  std::vector<double> breaks(np + 1);
  breaks[0] = 0.0;
  breaks[np] = T;
  int cell = 0;
  for (int j = 1; j < np; ++j) {
    double target = cum[cells] * double(j) / double(np);
    while (cum[cell + 1] < target) ++cell;
    double f = (target - cum[cell]) / (cum[cell + 1] - cum[cell]);
    breaks[j] = (double(cell) + f) * dt;
  }
  return PanelGrid(std::move(breaks), q);
}

void check_tol(double tol) {
  if (!(tol > 0.0)) throw BadParams("tscatter: tol must be positive");
  if (tol < 1e-13)
    throw ToleranceNotMet("tscatter: tol below the attainable collocation floor");
}

std::vector<Mat2> tabulate_V(const BoundaryProfile& p, const PanelGrid& g, cplx k) {
  std::vector<Mat2> M(g.size());
  for (int i = 0; i < g.size(); ++i) M[i] = build_V(p, g.node(i), k);
  return M;
}

std::function<Mat2(double)> V_callable(const BoundaryProfile& p, cplx k) {
  return [&p, k](double t) { return build_V(p, t, k); };
}

Mat2 interp_mat2(const PanelGrid& g, const std::vector<Mat2>& v, double t) {
  int n = int(v.size());
  std::vector<cplx> e(n);
  Mat2 out;
  for (int c = 0; c < 4; ++c) {
    for (int i = 0; i < n; ++i)
      e[i] = c == 0 ? v[i].a11 : c == 1 ? v[i].a12 : c == 2 ? v[i].a21 : v[i].a22;
    cplx y = g.interp(e, t);
    (c == 0 ? out.a11 : c == 1 ? out.a12 : c == 2 ? out.a21 : out.a22) = y;
  }
  return out;
}

void require_finite(const std::vector<Mat2>& v, const char* who) {
  for (const Mat2& m : v)
    if (!m.finite()) throw ToleranceNotMet(std::string(who) + ": non-finite solution values");
}

}  // namespace

Mat2 build_V(const BoundaryProfile& p, double t, cplx k) {
  double lam = double(p.lambda());
  double g0 = p.eval(0, t), g1 = p.eval(1, t), g2 = p.eval(2, t);
  double c = g2 - 2.0 * lam * g0 * g0 * g0;
  cplx even = -4.0 * k * k * g0 + c;  // off-diagonal part shared by both entries
  cplx odd = 2.0i * k * g1;
  cplx diag = -2.0i * lam * k * g0 * g0;
  return {diag, even + odd, lam * (even - odd), -diag};
}

Mat2 TEigenSolution::eval(double t) const { return interp_mat2(grid, values, t); }

TEigenSolution solve_T_col2(const BoundaryProfile& p, cplx k, double tol, int npanels) {
  check_tol(tol);
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw BadParams("solve_T_col2: k must be finite");
  if (in_lower_sectors(k))
    throw WrongRegion("solve_T_col2: column 2 is defined for Im k^3 >= 0");
  TEigenSolution out;
  out.k = k;
  out.column = 2;
  out.grid = default_tgrid(p, tol, npanels, &k, 0.0);
  auto Mvals = tabulate_V(p, out.grid, k);
  cplx lam1 = -8.0i * (k * k * k);
  VolterraSolution vs = volterra_solve(out.grid, /*backward=*/true, lam1, 0.0,
                                       V_callable(p, k), Mvals, 0.0, 1.0);
  out.values.resize(out.grid.size());
  for (int i = 0; i < out.grid.size(); ++i) {
    out.values[i].a12 = vs.psi1[i];
    out.values[i].a22 = vs.psi2[i];
  }
  out.at0.a12 = vs.end1;
  out.at0.a22 = vs.end2;
  out.atT.a22 = 1.0;  // normalization
  out.method = "ode";
  out.tail_budget = p.tail_bound();
  require_finite(out.values, "solve_T_col2");
  return out;
}

TEigenSolution solve_T_col1(const BoundaryProfile& p, cplx k, double tol, int npanels) {
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw BadParams("solve_T_col1: k must be finite");
  Region r = classify(k).region;
  if (r == Region::D1 || r == Region::D3)
    throw WrongRegion("solve_T_col1: column 1 is defined for Im k^3 <= 0");
  TEigenSolution base = solve_T_col2(p, std::conj(k), tol, npanels);
  double lam = double(p.lambda());
  TEigenSolution out;
  out.k = k;
  out.column = 1;
  out.grid = base.grid;
  out.values.resize(base.values.size());
  // T11(k) = conj(T22(conj k)), T21(k) = lambda conj(T12(conj k)) for both
  // signs of lambda (sigma1/sigma2 conjugation collapse to this column map)
  for (size_t i = 0; i < base.values.size(); ++i) {
    out.values[i].a11 = std::conj(base.values[i].a22);
    out.values[i].a21 = lam * std::conj(base.values[i].a12);
  }
  out.at0.a11 = std::conj(base.at0.a22);
  out.at0.a21 = lam * std::conj(base.at0.a12);
  out.atT.a11 = 1.0;
  out.method = "ode";
  out.tail_budget = base.tail_budget;
  return out;
}

TEigenSolution solve_U(const BoundaryProfile& p, cplx k, double tol, int npanels) {
  check_tol(tol);
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw BadParams("solve_U: k must be finite");
  cplx k3 = k * k * k;
  double growth = 8.0 * std::abs(k3.imag());
  if (growth * p.T_trunc() > 650.0)
    throw ToleranceNotMet("solve_U: column growth exp(8 |Im k^3| T) leaves the double range");
  TEigenSolution out;
  out.k = k;
  out.column = 0;
  out.grid = default_tgrid(p, tol, npanels, &k, growth);
  auto Mvals = tabulate_V(p, out.grid, k);
  auto M = V_callable(p, k);
  cplx lam1 = -8.0i * k3;
  VolterraSolution c2 = volterra_solve(out.grid, false, lam1, 0.0, M, Mvals, 0.0, 1.0);
  VolterraSolution c1 = volterra_solve(out.grid, false, 0.0, -lam1, M, Mvals, 1.0, 0.0);
  out.values.resize(out.grid.size());
  double detdev = 0.0;
  for (int i = 0; i < out.grid.size(); ++i) {
    Mat2& m = out.values[i];
    m = Mat2{c1.psi1[i], c2.psi1[i], c1.psi2[i], c2.psi2[i]};
    // det U == 1 identically; measure relative to the product scale so the
    // check stays meaningful when one column grows exponentially
    double scale = std::max(1.0, std::abs(m.a11 * m.a22) + std::abs(m.a12 * m.a21));
    detdev = std::max(detdev, std::abs(m.det() - 1.0) / scale);
  }
  require_finite(out.values, "solve_U");
  // the attainable det accuracy is limited by phase round-off: the marched
  // exponent 8ik^3 t is evaluated to ~1 ulp of its magnitude, not of its value
  double phase_floor = 8.0 * std::abs(k3) * p.T_trunc() * 4.4e-16;
  if (detdev > std::max({tol, 5e-13, phase_floor})) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", detdev);
    throw ToleranceNotMet(std::string("solve_U: det residual ") + buf);
  }
  out.at0 = Mat2::identity();
  out.atT = Mat2{c1.end1, c2.end1, c1.end2, c2.end2};
  out.method = "ode";
  return out;
}

// ---------------------------------------------------------------------------
// large-k coefficient recursions

namespace {

// one family level: der[r][i] = d^r/dt^r of the off-diagonal (o) or
// diagonal (d) part at node i; for the W family the roles are swapped
struct Level {
  std::vector<std::vector<Mat2>> o, d;
};

// raw derivative triple (f, f', f'') of a scalar coefficient function
using RJ = std::array<double, 3>;

RJ jmul(const RJ& a, const RJ& b) {
  return {a[0] * b[0], a[1] * b[0] + a[0] * b[1],
          a[2] * b[0] + 2.0 * a[1] * b[1] + a[0] * b[2]};
}
RJ jadd(const RJ& a, const RJ& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
RJ jscale(double c, const RJ& a) { return {c * a[0], c * a[1], c * a[2]}; }

double binom(int n, int r) {
  double v = 1.0;
  for (int s = 1; s <= r; ++s) v = v * double(n - s + 1) / double(s);
  return v;
}

Mat2 s3mul(const Mat2& a) {  // sigma3 * a
  return {a.a11, a.a12, -a.a21, -a.a22};
}
Mat2 slmul(const Mat2& a, double lam) {  // sigma_lambda * a
  return {a.a21, a.a22, -lam * a.a11, -lam * a.a12};
}
Mat2 s3slmul(const Mat2& a, double lam) {  // sigma3 sigma_lambda * a
  return {a.a21, a.a22, lam * a.a11, lam * a.a12};
}

// pointwise-parity part of level j (off-diagonal for T and V, diagonal for
// W); identically zero at level 0 for all three families
Mat2 part_p(const std::vector<Level>& L, bool swapped, int j, int r, int i) {
  if (j <= 0) return Mat2::zero();
  const auto& st = swapped ? L[j].d : L[j].o;
  return st[r][i];
}
// integrated-parity part; level 0 is the identity for T and V, zero for W
Mat2 part_s(const std::vector<Level>& L, bool swapped, bool unit0, int j, int r, int i) {
  if (j < 0) return Mat2::zero();
  if (j == 0) return unit0 && r == 0 ? Mat2::identity() : Mat2::zero();
  const auto& st = swapped ? L[j].o : L[j].d;
  return st[r][i];
}

std::vector<cplx> entry(const std::vector<Mat2>& v, int c) {
  std::vector<cplx> e(v.size());
  for (size_t i = 0; i < v.size(); ++i)
    e[i] = c == 0 ? v[i].a11 : c == 1 ? v[i].a12 : c == 2 ? v[i].a21 : v[i].a22;
  return e;
}

}  // namespace

Mat2 TAsymCoeffs::T_at(int j, double t) const {
  if (j < 0 || j >= int(T.size())) throw BadParams("TAsymCoeffs: coefficient index");
  return t == 0.0 ? T0[j] : interp_mat2(grid, T[j], t);
}
Mat2 TAsymCoeffs::V_at(int j, double t) const {
  if (j < 0 || j >= int(V.size())) throw BadParams("TAsymCoeffs: coefficient index");
  return t == 0.0 ? V0[j] : interp_mat2(grid, V[j], t);
}
Mat2 TAsymCoeffs::W_at(int j, double t) const {
  if (j < 0 || j >= int(W.size())) throw BadParams("TAsymCoeffs: coefficient index");
  return t == 0.0 ? W0[j] : interp_mat2(grid, W[j], t);
}

TAsymCoeffs t_asym_coeffs(const BoundaryProfile& p, int m) {
  if (m < 0) throw BadParams("t_asym_coeffs: m must be >= 0");
  for (int j = 0; j < 3; ++j) {
    int need = (m + 5 - j) / 3;
    if (need > p.deriv_order(j))
      throw DerivUnavailable("t_asym_coeffs: profile supplies " +
                             std::to_string(p.deriv_order(j)) + " derivatives of g" +
                             std::to_string(j) + ", need " + std::to_string(need));
  }
  TAsymCoeffs out;
  out.m = m;
  out.lambda = p.lambda();
  out.grid = default_tgrid(p, 1e-10, 0, nullptr, 0.0);
  const PanelGrid& g = out.grid;
  const int N = g.size();
  const double lam = double(out.lambda);
  const int J = m + 3;

  // derivative-depth ladders: the pointwise equation at level j consumes the
  // (j-3) pointwise part one derivative deeper, and the integrated rate at
  // depth max(Dd[j]-1,0) consumes the previous pointwise parts one deeper
  // still; references into level 0 carry no derivative data
  std::vector<int> Do(J + 1, 0), Dd(J + 1, 0);
  auto raise = [](std::vector<int>& D, int idx, int v) {
    if (idx >= 1) D[idx] = std::max(D[idx], v);
  };
  for (int j = J; j >= 1; --j) {
    int dH = std::max(Dd[j] - 1, 0);
    raise(Do, j - 1, dH + 1);
    raise(Do, j - 2, std::max(Do[j], dH + 1));
    raise(Do, j - 3, std::max(Do[j] + 1, dH + 1));
    raise(Dd, j - 1, std::max(Do[j], dH));
    raise(Dd, j - 2, std::max(Do[j], dH));
    raise(Dd, j - 3, std::max(Do[j], dH));
  }

  // scalar coefficient jets at the nodes, to the fixed depth 2 the m <= 4
  // ladders reach
  std::vector<RJ> g0j(N), g1j(N), g2j(N), q0j(N), cj(N), c3j(N), c4j(N), c5j(N),
      c6j(N), c7j(N), c8j(N);
  for (int i = 0; i < N; ++i) {
    double t = g.node(i);
    RJ a0{p.eval(0, t, 0), p.eval(0, t, 1), p.eval(0, t, 2)};
    RJ a1{p.eval(1, t, 0), p.eval(1, t, 1), p.eval(1, t, 2)};
    RJ a2{p.eval(2, t, 0), p.eval(2, t, 1), p.eval(2, t, 2)};
    RJ sq = jmul(a0, a0), cu = jmul(sq, a0);
    g0j[i] = a0;
    g1j[i] = a1;
    g2j[i] = a2;
    q0j[i] = sq;
    cj[i] = jadd(a2, jscale(-2.0 * lam, cu));
    c3j[i] = jadd(a2, jscale(-lam, cu));
    c4j[i] = jmul(a1, sq);
    c5j[i] = jadd(jscale(3.0, jmul(sq, sq)),
                  jadd(jscale(-2.0 * lam, jmul(a2, a0)), jscale(lam, jmul(a1, a1))));
    c6j[i] = jmul(jadd(jscale(lam, a2), jscale(-1.0, cu)), sq);
    c7j[i] = jmul(cu, a1);
    c8j[i] = jmul(jadd(a2, jscale(-lam, cu)), jadd(jscale(lam, a2), jscale(-2.0, cu)));
  }

  std::vector<Level> TL(J + 1), VL(J + 1), WL(J + 1);

  out.T.assign(J + 1, {});
  out.V.assign(J + 1, {});
  out.W.assign(J + 1, {});
  out.T0.assign(J + 1, Mat2::zero());
  out.V0.assign(J + 1, Mat2::zero());
  out.W0.assign(J + 1, Mat2::zero());
  out.T[0].assign(N, Mat2::identity());
  out.V[0].assign(N, Mat2::identity());
  out.W[0].assign(N, Mat2::zero());
  out.T0[0] = out.V0[0] = Mat2::identity();

  // d^r of the pointwise-parity part at level j
  auto pointwise = [&](const std::vector<Level>& L, bool sw, bool u0, int j, int depth) {
    std::vector<std::vector<Mat2>> P(depth + 1, std::vector<Mat2>(N));
    for (int r = 0; r <= depth; ++r)
      for (int i = 0; i < N; ++i) {
        Mat2 acc = part_p(L, sw, j - 3, r + 1, i);
        for (int s = 0; s <= r; ++s) {
          double b = binom(r, s);
          acc += (4.0 * b * g0j[i][s]) * s3slmul(part_s(L, sw, u0, j - 1, r - s, i), lam);
          acc += (cplx(0.0, 2.0 * lam) * (b * q0j[i][s])) *
                 s3mul(part_p(L, sw, j - 2, r - s, i));
          acc += (cplx(0.0, -2.0) * (b * g1j[i][s])) *
                 slmul(part_s(L, sw, u0, j - 2, r - s, i), lam);
          acc += (-b * cj[i][s]) * s3slmul(part_s(L, sw, u0, j - 3, r - s, i), lam);
        }
        P[r][i] = 0.125i * s3mul(acc);
      }
    return P;
  };
  // d^r of the rate of the integrated-parity part at level j
  auto rate = [&](const std::vector<Level>& L, bool sw, bool u0, int j, int depth) {
    std::vector<std::vector<Mat2>> H(depth + 1, std::vector<Mat2>(N));
    for (int r = 0; r <= depth; ++r)
      for (int i = 0; i < N; ++i) {
        Mat2 acc;
        for (int s = 0; s <= r; ++s) {
          double b = binom(r, s);
          acc += (0.5i * (b * g0j[i][s])) * slmul(part_p(L, sw, j - 1, r - s + 1, i), lam);
          acc += (0.25 * b * g1j[i][s]) * s3slmul(part_p(L, sw, j - 2, r - s + 1, i), lam);
          acc += (-0.125i * (b * c3j[i][s])) *
                 slmul(part_p(L, sw, j - 3, r - s + 1, i), lam);
          acc += (cplx(0.0, -0.5 * lam) * (b * c4j[i][s])) *
                 slmul(part_p(L, sw, j - 1, r - s, i), lam);
          acc += (0.5i * (b * c5j[i][s])) * s3mul(part_s(L, sw, u0, j - 1, r - s, i));
          acc += (-0.25 * b * c6j[i][s]) * s3slmul(part_p(L, sw, j - 2, r - s, i), lam);
          acc += (0.25 * b * c7j[i][s]) * part_s(L, sw, u0, j - 2, r - s, i);
          acc += (0.125i * (b * c8j[i][s])) * s3mul(part_s(L, sw, u0, j - 3, r - s, i));
        }
        H[r][i] = acc;
      }
    return H;
  };
  auto cum_right = [&](const std::vector<Mat2>& H) {  // -int_t^T H
    std::vector<Mat2> V(N);
    for (int c : {0, 3}) {
      auto F = g.cumint_from_right(entry(H, c));
      for (int i = 0; i < N; ++i) (c == 0 ? V[i].a11 : V[i].a22) = -F[i];
    }
    return V;
  };
  auto cum_left = [&](const std::vector<Mat2>& H, const Mat2& c0, int c1, int c2) {
    // c0 + int_0^t H on entry slots c1, c2
    std::vector<Mat2> V(N, c0);
    for (int c : {c1, c2}) {
      auto F = g.cumint_from_left(entry(H, c));
      for (int i = 0; i < N; ++i) {
        cplx& slot = c == 0 ? V[i].a11 : c == 1 ? V[i].a12 : c == 2 ? V[i].a21 : V[i].a22;
        slot += F[i];
      }
    }
    return V;
  };
  auto emit = [&](int j, const Level& L, std::vector<std::vector<Mat2>>& dst) {
    dst[j].resize(N);
    for (int i = 0; i < N; ++i) dst[j][i] = L.o[0][i] + L.d[0][i];
  };

  for (int j = 1; j <= J; ++j) {
    Level Tn, Vn, Wn;
    Tn.o = pointwise(TL, false, true, j, Do[j]);
    Vn.o = pointwise(VL, false, true, j, Do[j]);
    Wn.d = pointwise(WL, true, false, j, Do[j]);

    int dH = std::max(Dd[j] - 1, 0);
    auto HT = rate(TL, false, true, j, dH);
    auto HV = rate(VL, false, true, j, dH);
    auto HW = rate(WL, true, false, j, dH);

    // integration constants: V_j^(d)(0) = -W_j^(d)(0) and
    // W_j^(o)(0) = -V_j^(o)(0), from V_j(0) + W_j(0) = 0
    Mat2 Wd0 = interp_mat2(g, Wn.d[0], 0.0);
    Wd0.a12 = Wd0.a21 = 0.0;
    Mat2 Vo0 = interp_mat2(g, Vn.o[0], 0.0);
    Vo0.a11 = Vo0.a22 = 0.0;
    Mat2 negWd0 = Mat2::zero() - Wd0;
    Mat2 negVo0 = Mat2::zero() - Vo0;

    Tn.d.assign(Dd[j] + 1, std::vector<Mat2>(N));
    Vn.d.assign(Dd[j] + 1, std::vector<Mat2>(N));
    Wn.o.assign(Dd[j] + 1, std::vector<Mat2>(N));
    Tn.d[0] = cum_right(HT[0]);
    Vn.d[0] = cum_left(HV[0], negWd0, 0, 3);
    Wn.o[0] = cum_left(HW[0], negVo0, 1, 2);
    for (int r = 1; r <= Dd[j]; ++r) {
      Tn.d[r] = HT[r - 1];
      Vn.d[r] = HV[r - 1];
      Wn.o[r] = HW[r - 1];
    }

    TL[j] = std::move(Tn);
    VL[j] = std::move(Vn);
    WL[j] = std::move(Wn);
    emit(j, TL[j], out.T);
    emit(j, VL[j], out.V);
    emit(j, WL[j], out.W);
    // at t = 0: the from-0 integrals vanish exactly, so the level value is
    // its integration constant plus the pointwise part; this keeps
    // V0[j] + W0[j] == 0 bitwise
    Mat2 to = interp_mat2(g, TL[j].o[0], 0.0);
    to.a11 = to.a22 = 0.0;
    Mat2 td = interp_mat2(g, TL[j].d[0], 0.0);
    td.a12 = td.a21 = 0.0;
    out.T0[j] = to + td;
    out.V0[j] = Vo0 + negWd0;
    out.W0[j] = Wd0 + negVo0;
  }

  out.Aj.resize(J + 1);
  out.Bj.resize(J + 1);
  for (int j = 0; j <= J; ++j) {
    out.Aj[j] = out.T0[j].a22;
    out.Bj[j] = out.T0[j].a12;
  }
  return out;
}

std::pair<Mat2, Mat2> hat_TU(const TAsymCoeffs& coeffs, double t, cplx k) {
  if (std::abs(k) == 0.0) throw BadParams("hat_TU: k must be nonzero");
  int top = coeffs.m + 3;
  cplx invk = 1.0 / k;
  Mat2 ht = coeffs.T_at(top, t), hv = coeffs.V_at(top, t), hw = coeffs.W_at(top, t);
  for (int j = top - 1; j >= 0; --j) {
    ht = coeffs.T_at(j, t) + invk * ht;
    hv = coeffs.V_at(j, t) + invk * hv;
    hw = coeffs.W_at(j, t) + invk * hw;
  }
  cplx phi = 8.0i * (k * k * k) * t;
  if (std::abs(phi.real()) > 700.0 && hw.norm() != 0.0)
    throw RangeError("hat_TU: |Re 8ik^3t| exceeds exponent range");
  cplx E = std::exp(phi);  // hat W e^{8ik^3 t sigma3}: col1 *= E, col2 /= E
  Mat2 hu = hv + Mat2{hw.a11 * E, hw.a12 / E, hw.a21 * E, hw.a22 / E};
  return {ht, hu};
}

ABTableT spectral_AB(const BoundaryProfile& p, const std::vector<cplx>& kgrid,
                     double tol, double k_switch) {
  check_tol(tol);
  if (!(k_switch > 0.0)) throw BadParams("spectral_AB: k_switch must be positive");
  for (cplx k : kgrid)
    if (in_lower_sectors(k))
      throw WrongRegion("spectral_AB: grid must satisfy Im k^3 >= 0");
  ABTableT out;
  out.k = kgrid;
  out.A.resize(kgrid.size());
  out.B.resize(kgrid.size());
  TAsymCoeffs cf;
  bool have_cf = false;
  for (size_t i = 0; i < kgrid.size(); ++i) {
    cplx k = kgrid[i];
    if (std::abs(k) > k_switch) {
      if (!have_cf) {
        cf = t_asym_coeffs(p, 4);
        have_cf = true;
      }
      cplx invk = 1.0 / k, A = 0.0, B = 0.0;
      for (int j = cf.m + 3; j >= 1; --j) {
        A = (cf.Aj[j] + A) * invk;
        B = (cf.Bj[j] + B) * invk;
      }
      out.A[i] = 1.0 + A;
      out.B[i] = B;
    } else {
      TEigenSolution s = solve_T_col2(p, k, tol);
      out.A[i] = s.at0.a22;
      out.B[i] = s.at0.a12;
    }
  }
  return out;
}

TEigenSolution picard_oracle_T(const BoundaryProfile& p, cplx k, int l,
                               std::vector<double>* term_sup) {
  if (l < 0 || l > 12) throw BadParams("picard_oracle_T: need 0 <= l <= 12");
  if (in_lower_sectors(k))
    throw WrongRegion("picard_oracle_T: Im k^3 must be >= 0");
  double T = p.T_trunc();
  cplx k3 = k * k * k;
  if (8.0 * std::abs(k3.imag()) * T > 600.0)
    throw BadParams("picard_oracle_T: |Im k^3| T too large for the factored kernel");
  TEigenSolution out;
  out.k = k;
  out.column = 2;
  out.grid = PanelGrid::uniform(0.0, T, std::min(96, std::max(10, int(std::ceil(T)))), 16);
  const PanelGrid& g = out.grid;
  const int N = g.size();

  std::vector<Mat2> V(N);
  std::vector<cplx> Em(N), Ep(N);
  for (int i = 0; i < N; ++i) {
    V[i] = build_V(p, g.node(i), k);
    Em[i] = std::exp(8.0i * k3 * g.node(i));
    Ep[i] = std::exp(-8.0i * k3 * g.node(i));
  }

  std::vector<cplx> cur1(N, 0.0), cur2(N, 1.0), sum1 = cur1, sum2 = cur2;
  std::vector<cplx> f(N), h(N);
  if (term_sup) term_sup->clear();
  for (int it = 1; it <= l; ++it) {
    for (int i = 0; i < N; ++i) {
      f[i] = Em[i] * (V[i].a11 * cur1[i] + V[i].a12 * cur2[i]);
      h[i] = V[i].a21 * cur1[i] + V[i].a22 * cur2[i];
    }
    auto F = g.cumint_from_right(f);
    auto S = g.cumint_from_right(h);
    double sup = 0.0;
    for (int i = 0; i < N; ++i) {
      cur1[i] = -Ep[i] * F[i];
      cur2[i] = -S[i];
      sup = std::max(sup, std::hypot(std::abs(cur1[i]), std::abs(cur2[i])));
      sum1[i] += cur1[i];
      sum2[i] += cur2[i];
    }
    if (term_sup) term_sup->push_back(sup);
  }

  out.values.resize(N);
  for (int i = 0; i < N; ++i) {
    out.values[i].a12 = sum1[i];
    out.values[i].a22 = sum2[i];
  }
  out.at0.a12 = g.interp(sum1, 0.0);
  out.at0.a22 = g.interp(sum2, 0.0);
  out.atT.a12 = g.interp(sum1, T);
  out.atT.a22 = g.interp(sum2, T);
  out.method = "picard(" + std::to_string(l) + ")";
  out.tail_budget = p.tail_bound();
  require_finite(out.values, "picard_oracle_T");
  return out;
}

TEigenSolution picard_oracle_U(const BoundaryProfile& p, cplx k, int l,
                               std::vector<double>* term_sup) {
  if (l < 0 || l > 12) throw BadParams("picard_oracle_U: need 0 <= l <= 12");
  if (!std::isfinite(k.real()) || !std::isfinite(k.imag()))
    throw BadParams("picard_oracle_U: k must be finite");
  double T = p.T_trunc();
  cplx k3 = k * k * k;
  if (8.0 * std::abs(k3.imag()) * T > 600.0)
    throw BadParams("picard_oracle_U: |Im k^3| T too large for the factored kernel");
  TEigenSolution out;
  out.k = k;
  out.column = 0;
  out.grid = PanelGrid::uniform(0.0, T, std::min(96, std::max(10, int(std::ceil(T)))), 16);
  const PanelGrid& g = out.grid;
  const int N = g.size();

  std::vector<Mat2> V(N);
  std::vector<cplx> Em(N), Ep(N);
  for (int i = 0; i < N; ++i) {
    V[i] = build_V(p, g.node(i), k);
    Em[i] = std::exp(8.0i * k3 * g.node(i));
    Ep[i] = std::exp(-8.0i * k3 * g.node(i));
  }

  // columns (c11, c21) and (c12, c22); slot 1 of column 2 and slot 2 of
  // column 1 carry the conjugating phase, factored as above
  std::vector<cplx> c11(N, 1.0), c21(N, 0.0), c12(N, 0.0), c22(N, 1.0);
  std::vector<cplx> s11 = c11, s21 = c21, s12 = c12, s22 = c22;
  std::vector<cplx> r1(N), r2(N), w1(N), w2(N);
  if (term_sup) term_sup->clear();
  for (int it = 1; it <= l; ++it) {
    for (int i = 0; i < N; ++i) {
      r1[i] = V[i].a11 * c11[i] + V[i].a12 * c21[i];
      r2[i] = Ep[i] * (V[i].a21 * c11[i] + V[i].a22 * c21[i]);
      w1[i] = Em[i] * (V[i].a11 * c12[i] + V[i].a12 * c22[i]);
      w2[i] = V[i].a21 * c12[i] + V[i].a22 * c22[i];
    }
    auto F1 = g.cumint_from_left(r1);
    auto F2 = g.cumint_from_left(r2);
    auto G1 = g.cumint_from_left(w1);
    auto G2 = g.cumint_from_left(w2);
    double sup = 0.0;
    for (int i = 0; i < N; ++i) {
      c11[i] = F1[i];
      c21[i] = Em[i] * F2[i];
      c12[i] = Ep[i] * G1[i];
      c22[i] = G2[i];
      sup = std::max(sup, std::max(std::hypot(std::abs(c11[i]), std::abs(c21[i])),
                                   std::hypot(std::abs(c12[i]), std::abs(c22[i]))));
      s11[i] += c11[i];
      s21[i] += c21[i];
      s12[i] += c12[i];
      s22[i] += c22[i];
    }
    if (term_sup) term_sup->push_back(sup);
  }

  out.values.resize(N);
  for (int i = 0; i < N; ++i) out.values[i] = Mat2{s11[i], s12[i], s21[i], s22[i]};
  out.at0 = Mat2{g.interp(s11, 0.0), g.interp(s12, 0.0), g.interp(s21, 0.0),
                 g.interp(s22, 0.0)};
  out.atT = Mat2{g.interp(s11, T), g.interp(s12, T), g.interp(s21, T), g.interp(s22, T)};
  out.method = "picard(" + std::to_string(l) + ")";
  require_finite(out.values, "picard_oracle_U");
  return out;
}

}  // namespace mkdvut
