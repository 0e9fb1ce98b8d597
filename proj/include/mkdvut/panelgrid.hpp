#pragma once
#include <functional>
#include <vector>

#include "mkdvut/mat2.hpp"
#include "mkdvut/quad.hpp"

namespace mkdvut {

// Composite Gauss-Legendre grid on a real interval: the workhorse for profile
// tabulation, coefficient-recursion integrals, and per-ray contour panels.
// Node layout: panel-major, q Gauss nodes per panel, globally ascending.
class PanelGrid {
 public:
  PanelGrid() = default;
  // breaks: ascending breakpoints (>= 2); q: nodes per panel
  PanelGrid(std::vector<double> breaks, int q);

  static PanelGrid uniform(double a, double b, int npanels, int q);

  int q() const { return q_; }
  int npanels() const { return int(breaks_.size()) - 1; }
  int size() const { return int(nodes_.size()); }
  double a() const { return breaks_.front(); }
  double b() const { return breaks_.back(); }
  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return wts_; }
  double node(int i) const { return nodes_[i]; }
  double halfwidth(int p) const { return 0.5 * (breaks_[p + 1] - breaks_[p]); }
  double center(int p) const { return 0.5 * (breaks_[p + 1] + breaks_[p]); }

  // index of the panel containing x (clamped to [a,b])
  int panel_of(double x) const;

  cplx integrate(const std::vector<cplx>& f) const;

  // F_i = integral from a to node i
  std::vector<cplx> cumint_from_left(const std::vector<cplx>& f) const;
  // T_i = integral from node i to b (computed right-to-left; no cancellation
  // against the total, so decaying tails keep full absolute accuracy)
  std::vector<cplx> cumint_from_right(const std::vector<cplx>& f) const;

  // spectral derivative of the per-panel interpolant, at all nodes
  std::vector<cplx> derivative(const std::vector<cplx>& f) const;

  // barycentric evaluation of the per-panel interpolant
  cplx interp(const std::vector<cplx>& f, double x) const;

  std::vector<cplx> tabulate(const std::function<cplx(double)>& fn) const;
  std::vector<cplx> tabulate_real(const std::function<double(double)>& fn) const;

 private:
  std::vector<double> breaks_;
  int q_ = 0;
  std::vector<double> nodes_;
  std::vector<double> wts_;
  // local (reference-panel) machinery, shared by all panels
  std::vector<double> lx_, lw_;   // GL nodes/weights on [-1,1]
  std::vector<double> lbw_;       // barycentric weights on lx_
  std::vector<double> ldiff_;     // q x q differentiation matrix on lx_
  // legendre values P_n(lx_j), n=0..q, row-major [n*(q)+j]
  std::vector<double> lleg_;

  // Legendre coefficients c_0..c_{q-1} of panel values f (local)
  void panel_coeffs(const cplx* f, cplx* c) const;
};

}  // namespace mkdvut
