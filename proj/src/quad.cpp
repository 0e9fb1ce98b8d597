#include "mkdvut/quad.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace mkdvut {

static GaussRule compute_gauss(int n) {
  GaussRule r;
  r.x.resize(n);
  r.w.resize(n);
  // Newton iteration from the Chebyshev-based initial guess; standard and
  // accurate to machine precision for the moderate n used here.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) {
        // one clean-up step
        p0 = 1.0; p1 = x;
        for (int j = 2; j <= n; ++j) {
          double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
          p0 = p1;
          p1 = p2;
        }
        pp = n * (x * p1 - p0) / (x * x - 1.0);
        x -= p1 / pp;
        break;
      }
    }
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * pp * pp);
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) {
    // middle node is exactly 0; P_n(0)=0 so P_n'(0) = n*(0 - P_{n-1}(0))/(0-1) = n*P_{n-1}(0)
    double a = 1.0, b = 0.0;
    for (int j = 2; j <= n; ++j) {
      double c = (-(j - 1.0) * a) / j;
      a = b;
      b = c;
    }
    double pp = n * a;  // a = P_{n-1}(0) after the loop
    r.x[n / 2] = 0.0;
    r.w[n / 2] = 2.0 / (pp * pp);
  }
  return r;
}

const GaussRule& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
  static std::map<int, GaussRule> cache;
  static std::mutex mtx;
  std::lock_guard<std::mutex> lock(mtx);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, compute_gauss(n)).first;
  return it->second;
}

template <class T>
static std::vector<T> legendre_all_impl(int n, T x) {
  std::vector<T> p(n + 1);
  p[0] = T(1.0);
  if (n >= 1) p[1] = x;
  for (int j = 2; j <= n; ++j)
    p[j] = ((2.0 * j - 1.0) * x * p[j - 1] - (j - 1.0) * p[j - 2]) / double(j);
  return p;
}

std::vector<double> legendre_all(int n, double x) { return legendre_all_impl(n, x); }
std::vector<std::complex<double>> legendre_all(int n, std::complex<double> x) {
  return legendre_all_impl(n, x);
}

std::vector<double> barycentric_weights(const std::vector<double>& x) {
  int q = int(x.size());
  std::vector<double> bw(q, 1.0);
  for (int i = 0; i < q; ++i)
    for (int j = 0; j < q; ++j)
      if (j != i) bw[i] /= (x[i] - x[j]);
  return bw;
}

std::complex<double> barycentric_eval(const std::vector<double>& x,
                                      const std::vector<double>& bw,
                                      const std::vector<std::complex<double>>& f,
                                      double t) {
  std::complex<double> num = 0.0, den = 0.0;
  int q = int(x.size());
  for (int i = 0; i < q; ++i) {
    double d = t - x[i];
    if (d == 0.0) return f[i];
    double c = bw[i] / d;
    num += c * f[i];
    den += c;
  }
  return num / den;
}

std::vector<double> diff_matrix(const std::vector<double>& x) {
  int q = int(x.size());
  std::vector<double> bw = barycentric_weights(x);
  std::vector<double> D(q * q, 0.0);
  for (int i = 0; i < q; ++i) {
    double diag = 0.0;
    for (int j = 0; j < q; ++j) {
      if (j == i) continue;
      double dij = bw[j] / bw[i] / (x[i] - x[j]);
      D[i * q + j] = dij;
      diag -= dij;
    }
    D[i * q + i] = diag;
  }
  return D;
}

}  // namespace mkdvut
