#pragma once
#include <complex>
#include <vector>

namespace mkdvut {

// Gauss-Legendre rule on [-1,1].
struct GaussRule {
  std::vector<double> x;  // nodes, ascending
  std::vector<double> w;  // weights
};

// n-point Gauss-Legendre rule (cached; thread-safe after first use of a given n).
const GaussRule& gauss_legendre(int n);

// P_0..P_n at x (real or complex argument).
std::vector<double> legendre_all(int n, double x);
std::vector<std::complex<double>> legendre_all(int n, std::complex<double> x);

// Barycentric weights for an arbitrary node set (sized for q <= ~40 nodes).
std::vector<double> barycentric_weights(const std::vector<double>& x);

// Interpolate values given at nodes x (with barycentric weights bw) to point t.
// Exact passthrough when t coincides with a node.
std::complex<double> barycentric_eval(const std::vector<double>& x,
                                      const std::vector<double>& bw,
                                      const std::vector<std::complex<double>>& f,
                                      double t);

// Spectral differentiation matrix D (row i: derivative at x[i] of the
// interpolant through the given nodes), dense (q x q), row-major.
std::vector<double> diff_matrix(const std::vector<double>& x);

}  // namespace mkdvut
