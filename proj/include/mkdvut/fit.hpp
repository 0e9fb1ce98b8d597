#pragma once
#include <cmath>
#include <vector>

#include "mkdvut/errors.hpp"

namespace mkdvut {

struct LineFit {
  double slope = 0.0, intercept = 0.0, r2 = 1.0;
};

inline LineFit line_fit(const std::vector<double>& x, const std::vector<double>& y) {
  size_t n = x.size();
  if (n != y.size() || n < 2) throw BadParams("line_fit: need >= 2 points");
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  double mx = sx / n, my = sy / n, sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw BadParams("line_fit: abscissae coincide");
  LineFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssres = syy - f.slope * sxy;
  f.r2 = (syy > 0.0) ? 1.0 - ssres / syy : 1.0;
  return f;
}

inline LineFit loglog_fit(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx(x.size()), ly(y.size());
  for (size_t i = 0; i < x.size(); ++i) {
    if (x[i] <= 0.0 || y[i] <= 0.0) throw BadParams("loglog_fit: nonpositive data");
    lx[i] = std::log(x[i]);
    ly[i] = std::log(y[i]);
  }
  return line_fit(lx, ly);
}

}  // namespace mkdvut
