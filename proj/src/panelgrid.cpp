#include "mkdvut/panelgrid.hpp"

#include <algorithm>
#include <cmath>

#include "mkdvut/errors.hpp"

namespace mkdvut {

PanelGrid::PanelGrid(std::vector<double> breaks, int q) : breaks_(std::move(breaks)), q_(q) {
  if (breaks_.size() < 2) throw BadParams("PanelGrid: need at least 2 breakpoints");
  if (q_ < 2) throw BadParams("PanelGrid: need q >= 2");
  for (size_t i = 0; i + 1 < breaks_.size(); ++i)
    if (!(breaks_[i] < breaks_[i + 1])) throw BadParams("PanelGrid: breakpoints must ascend");
  const GaussRule& g = gauss_legendre(q_);
  lx_ = g.x;
  lw_ = g.w;
  lbw_ = barycentric_weights(lx_);
  ldiff_ = diff_matrix(lx_);
  lleg_.resize((q_ + 1) * q_);
  for (int j = 0; j < q_; ++j) {
    auto p = legendre_all(q_, lx_[j]);
    for (int n = 0; n <= q_; ++n) lleg_[n * q_ + j] = p[n];
  }
  int P = npanels();
  nodes_.resize(P * q_);
  wts_.resize(P * q_);
  for (int p = 0; p < P; ++p) {
    double h = halfwidth(p), c = center(p);
    for (int j = 0; j < q_; ++j) {
      nodes_[p * q_ + j] = c + h * lx_[j];
      wts_[p * q_ + j] = h * lw_[j];
    }
  }
}

PanelGrid PanelGrid::uniform(double a, double b, int npanels, int q) {
  if (!(b > a) || npanels < 1) throw BadParams("PanelGrid::uniform: bad interval");
  std::vector<double> br(npanels + 1);
  for (int i = 0; i <= npanels; ++i) br[i] = a + (b - a) * double(i) / npanels;
  return PanelGrid(std::move(br), q);
}

int PanelGrid::panel_of(double x) const {
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
  int p = int(it - breaks_.begin()) - 1;
  return std::clamp(p, 0, npanels() - 1);
}

cplx PanelGrid::integrate(const std::vector<cplx>& f) const {
  cplx s = 0.0;
  for (int i = 0; i < size(); ++i) s += wts_[i] * f[i];
  return s;
}

void PanelGrid::panel_coeffs(const cplx* f, cplx* c) const {
  // c_n = (2n+1)/2 sum_j w_j P_n(x_j) f_j  (exact for the degree q-1 interpolant)
  for (int n = 0; n < q_; ++n) {
    cplx s = 0.0;
    for (int j = 0; j < q_; ++j) s += lw_[j] * lleg_[n * q_ + j] * f[j];
    c[n] = (n + 0.5) * s;
  }
}

std::vector<cplx> PanelGrid::cumint_from_left(const std::vector<cplx>& f) const {
  int P = npanels();
  std::vector<cplx> out(size());
  std::vector<cplx> c(q_);
  cplx acc = 0.0;  // integral over all previous panels
  for (int p = 0; p < P; ++p) {
    panel_coeffs(&f[p * q_], c.data());
    double h = halfwidth(p);
    for (int j = 0; j < q_; ++j) {
      // int_{-1}^{xi} P_0 = P_1(xi)+P_0(xi);  int_{-1}^{xi} P_n = (P_{n+1}-P_{n-1})(xi)/(2n+1)
      cplx s = c[0] * (lleg_[1 * q_ + j] + 1.0);
      for (int n = 1; n < q_; ++n)
        s += c[n] * (lleg_[(n + 1) * q_ + j] - lleg_[(n - 1) * q_ + j]) / (2.0 * n + 1.0);
      out[p * q_ + j] = acc + h * s;
    }
    acc += h * 2.0 * c[0];  // int_{-1}^{1} of the interpolant
  }
  return out;
}

std::vector<cplx> PanelGrid::cumint_from_right(const std::vector<cplx>& f) const {
  int P = npanels();
  std::vector<cplx> out(size());
  std::vector<cplx> c(q_);
  cplx acc = 0.0;  // integral over all later panels
  for (int p = P - 1; p >= 0; --p) {
    panel_coeffs(&f[p * q_], c.data());
    double h = halfwidth(p);
    for (int j = 0; j < q_; ++j) {
      // int_{xi}^{1} P_n = int_{-1}^{1} - int_{-1}^{xi}; the n>=1 full integrals vanish
      cplx s = c[0] * (2.0 - (lleg_[1 * q_ + j] + 1.0));
      for (int n = 1; n < q_; ++n)
        s -= c[n] * (lleg_[(n + 1) * q_ + j] - lleg_[(n - 1) * q_ + j]) / (2.0 * n + 1.0);
      out[p * q_ + j] = acc + h * s;
    }
    acc += h * 2.0 * c[0];
  }
  return out;
}

std::vector<cplx> PanelGrid::derivative(const std::vector<cplx>& f) const {
  int P = npanels();
  std::vector<cplx> out(size(), 0.0);
  for (int p = 0; p < P; ++p) {
    double inv_h = 1.0 / halfwidth(p);
    for (int i = 0; i < q_; ++i) {
      cplx s = 0.0;
      for (int j = 0; j < q_; ++j) s += ldiff_[i * q_ + j] * f[p * q_ + j];
      out[p * q_ + i] = s * inv_h;
    }
  }
  return out;
}

cplx PanelGrid::interp(const std::vector<cplx>& f, double x) const {
  int p = panel_of(x);
  double xi = (x - center(p)) / halfwidth(p);
  cplx num = 0.0, den = 0.0;
  for (int i = 0; i < q_; ++i) {
    double d = xi - lx_[i];
    if (d == 0.0) return f[p * q_ + i];
    double c = lbw_[i] / d;
    num += c * f[p * q_ + i];
    den += c;
  }
  return num / den;
}

std::vector<cplx> PanelGrid::tabulate(const std::function<cplx(double)>& fn) const {
  std::vector<cplx> out(size());
  for (int i = 0; i < size(); ++i) out[i] = fn(nodes_[i]);
  return out;
}

std::vector<cplx> PanelGrid::tabulate_real(const std::function<double(double)>& fn) const {
  std::vector<cplx> out(size());
  for (int i = 0; i < size(); ++i) out[i] = fn(nodes_[i]);
  return out;
}

}  // namespace mkdvut
