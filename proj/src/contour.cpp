#include "mkdvut/contour.hpp"

#include <cmath>

#include "mkdvut/errors.hpp"
#include "mkdvut/quad.hpp"

namespace mkdvut {

cplx ray_direction(int m) {
  static const double s = std::sqrt(3.0) / 2.0;
  static const cplx dir[6] = {{1.0, 0.0}, {0.5, s}, {-0.5, s}, {-1.0, 0.0}, {-0.5, -s}, {0.5, -s}};
  if (m < 0 || m > 5) throw BadParams("ray_direction: index must be 0..5");
  return dir[m];
}

Classified classify(cplx k) {
  if (k == 0.0) return {Region::Origin, -1};
  double th = std::arg(k);  // (-pi, pi]
  const double pi3 = 1.0471975511965977462;
  long m = std::lround(th / pi3);
  if (std::abs(th - double(m) * pi3) <= 1e-12) return {Region::OnRay, int((m + 6) % 6)};
  // sector index: which (m*pi/3, (m+1)*pi/3) slice holds th
  int s = int(std::floor(th / pi3));  // -3..2
  switch ((s + 6) % 6) {
    case 0: return {Region::D3, -1};  // (0, pi/3)
    case 1: return {Region::D4, -1};
    case 2: return {Region::D3, -1};  // (2pi/3, pi)
    case 3: return {Region::D2, -1};
    case 4: return {Region::D1, -1};
    default: return {Region::D2, -1};  // (-pi/3, 0)
  }
}

cplx ContourGrid::quad(const std::vector<cplx>& fvals) const {
  if (fvals.size() != nodes.size()) throw BadParams("ContourGrid::quad: value count mismatch");
  cplx acc = 0.0;
  for (size_t i = 0; i < fvals.size(); ++i) acc += weights[i] * fvals[i];
  return acc;
}

ContourGrid build_grid(int panels_per_ray, int nodes_per_panel, double R_max, double grading) {
  if (panels_per_ray < 2) throw BadParams("build_grid: panels_per_ray must be >= 2");
  if (nodes_per_panel < 4) throw BadParams("build_grid: nodes_per_panel must be >= 4");
  if (!(R_max > 1.0)) throw BadParams("build_grid: R_max must exceed 1");
  if (!(grading > 1.0)) throw BadParams("build_grid: grading must exceed 1");

  ContourGrid g;
  g.nodes_per_panel = nodes_per_panel;
  g.R_max = R_max;
  g.breaks.resize(size_t(panels_per_ray) + 1);
  g.breaks[0] = 0.0;
  for (int p = 0; p < panels_per_ray; ++p)
    g.breaks[size_t(p) + 1] = R_max * std::pow(grading, p + 1 - panels_per_ray);
  g.breaks.back() = R_max;  // guard pow rounding

  const GaussRule& gr = gauss_legendre(nodes_per_panel);
  // radial nodes and weights shared by all six rays, so the mirror map is a
  // bitwise permutation of the node set
  std::vector<double> rs, rw;
  for (int p = 0; p < panels_per_ray; ++p) {
    double c = 0.5 * (g.breaks[size_t(p)] + g.breaks[size_t(p) + 1]);
    double h = 0.5 * (g.breaks[size_t(p) + 1] - g.breaks[size_t(p)]);
    for (int i = 0; i < nodes_per_panel; ++i) {
      rs.push_back(c + h * gr.x[size_t(i)]);
      rw.push_back(h * gr.w[size_t(i)]);
    }
  }

  for (int m = 0; m < 6; ++m) {
    cplx dir = ray_direction(m);
    cplx wdir = double(ray_orientation(m)) * dir;
    for (size_t i = 0; i < rs.size(); ++i) {
      g.nodes.push_back(rs[i] * dir);
      g.weights.push_back(rw[i] * wdir);
      g.ray.push_back(m);
      g.radius.push_back(rs[i]);
    }
  }
  return g;
}

}  // namespace mkdvut
