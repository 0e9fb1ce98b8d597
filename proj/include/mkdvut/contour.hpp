#pragma once
#include <utility>
#include <vector>

#include "mkdvut/mat2.hpp"

namespace mkdvut {

// The jump contour is the union of the three full lines R, e^{i pi/3} R,
// e^{2i pi/3} R, split into six rays indexed by angle m*pi/3, m = 0..5,
// and oriented so that {Im k^3 > 0} lies on the left.  That makes rays
// 0, 2pi/3, 4pi/3 outgoing and pi/3, pi, 5pi/3 incoming; the real line is
// traversed left to right.
inline int ray_orientation(int m) { return (m % 2 == 0) ? 1 : -1; }

// unit direction of ray m; table built from +-0.5 and +-sqrt(3)/2 so the
// mirror identity -conj(dir(m)) == dir(mirror_ray(m)) holds bitwise
cplx ray_direction(int m);

// k -> -conj(k) maps ray m onto this one
inline int mirror_ray(int m) { return (9 - m) % 6; }

inline bool ray_on_real(int m) { return m == 0 || m == 3; }
inline bool ray_on_boundary_lower(int m) { return m == 4 || m == 5; }  // edges of the lower-left sector pair
inline bool ray_on_boundary_upper(int m) { return m == 1 || m == 2; }  // edges of the upper middle sector

// Open sectors between the rays:
//   D1 = {Im k < 0, Im k^3 > 0} : arg in (-2pi/3, -pi/3)
//   D2 = {Im k < 0, Im k^3 < 0} : arg in (-pi, -2pi/3) u (-pi/3, 0)
//   D3 = {Im k > 0, Im k^3 > 0} : arg in (0, pi/3) u (2pi/3, pi)
//   D4 = {Im k > 0, Im k^3 < 0} : arg in (pi/3, 2pi/3)
enum class Region { D1, D2, D3, D4, OnRay, Origin };

struct Classified {
  Region region;
  int ray = -1;  // set when region == OnRay
};

// Angular tolerance band of 1e-12 radians decides ray membership.
Classified classify(cplx k);

// Quadrature grid on the truncated contour.  Nodes are grouped by ray
// (m = 0..5), radially ascending within each ray; weights carry the ray
// direction and orientation, so sum w_i f(k_i) tracks the directed
// integral over the whole contour.
struct ContourGrid {
  std::vector<cplx> nodes;
  std::vector<cplx> weights;
  std::vector<int> ray;        // angle index per node
  std::vector<double> radius;  // |node|, bitwise equal across rays
  std::vector<double> breaks;  // radial panel edges, 0 = breaks[0] < ... <= R_max
  int nodes_per_panel = 0;
  double R_max = 0.0;

  size_t per_ray() const { return nodes.size() / 6; }
  std::pair<size_t, size_t> ray_range(int m) const {
    return {size_t(m) * per_ray(), size_t(m + 1) * per_ray()};
  }
  cplx quad(const std::vector<cplx>& fvals) const;
};

// Geometric grading: panel edges r0 * grading^j with
// r0 = R_max * grading^{-(panels_per_ray-1)}, plus the closing panel [0, r0].
ContourGrid build_grid(int panels_per_ray, int nodes_per_panel, double R_max, double grading);

}  // namespace mkdvut
