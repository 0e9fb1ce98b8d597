#pragma once
#include <array>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"
#include "mkdvut/errors.hpp"

namespace mkdvut {

namespace detail {

// Piecewise quintic Hermite interpolant: matches value, first and second
// derivative at each knot (knot derivatives estimated from a local
// degree-6 stencil), so five derivatives exist piecewise.  Evaluates to 0
// beyond the last knot.
struct QuinticTable {
  std::vector<double> x;                     // knots, ascending, x.front() == 0
  std::vector<std::array<double, 6>> coef;   // per interval, s = (at - x[i]) / h[i]
  std::vector<double> h;

  static QuinticTable build(const std::vector<double>& x, const std::vector<double>& u);
  double eval(double at, int deriv) const;
  // log-linear decay fit of the trailing samples, integrated beyond from_x;
  // +inf when the tail shows no decay, 0 when it is identically zero
  double tail_fit(double from_x) const;
  std::vector<double> values() const;  // knot values (coef can reproduce them)
};

}  // namespace detail

// Initial data u0 on [0, L_trunc] with five derivatives.  Presets are
// closed forms differentiated exactly; tables interpolate.  Immutable.
class InitialProfile {
 public:
  static InitialProfile preset(int lambda, const std::string& name,
                               const std::map<std::string, double>& params, double L_trunc);
  static InitialProfile table(int lambda, const std::vector<double>& x,
                              const std::vector<double>& u, double L_trunc);
  // descriptor: {"kind":"preset","name":...,"params":{...}} or
  // {"kind":"table","x":[...],"u":[...]}; unknown keys rejected
  static InitialProfile from_json(const nlohmann::json& desc, int lambda, double L_trunc);
  nlohmann::json to_json() const;

  double eval(double x, int deriv = 0) const;  // OutOfDomain, DerivUnavailable
  double tail_bound() const;                   // >= integral_L^inf (1+x)|u0|

  int lambda() const { return lambda_; }
  double L_trunc() const { return L_; }
  int deriv_order() const { return 5; }
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  InitialProfile() = default;
  enum class Kind { Zero, Gaussian, Exp, Sech, Table };
  Kind kind_ = Kind::Zero;
  int lambda_ = 1;
  double L_ = 0.0;
  std::string name_;
  std::map<std::string, double> params_;
  detail::QuinticTable tab_;
  std::vector<double> tab_u_;  // raw samples, kept for exact serialization
  std::vector<std::string> warnings_;
};

// Boundary data (g0, g1, g2) on [0, T_trunc] with derivative orders (3, 2, 2).
class BoundaryProfile {
 public:
  static BoundaryProfile preset(int lambda, const std::string& name,
                                const std::map<std::string, double>& params, double T_trunc);
  static BoundaryProfile table(int lambda, const std::vector<double>& t,
                               const std::vector<double>& g0, const std::vector<double>& g1,
                               const std::vector<double>& g2, double T_trunc);
  static BoundaryProfile from_json(const nlohmann::json& desc, int lambda, double T_trunc);
  nlohmann::json to_json() const;

  // j selects g_j; deriv limited to (3,2,2)[j]
  double eval(int j, double t, int deriv = 0) const;
  double tail_bound() const;  // >= sum_j integral_T^inf (1+t)|g_j|

  int lambda() const { return lambda_; }
  double T_trunc() const { return T_; }
  int deriv_order(int j) const;
  const std::vector<std::string>& warnings() const { return warnings_; }

 private:
  BoundaryProfile() = default;
  enum class Kind { Zero, Exp, Soliton, Table };
  Kind kind_ = Kind::Zero;
  int lambda_ = 1;
  double T_ = 0.0;
  std::string name_;
  std::map<std::string, double> params_;
  std::array<detail::QuinticTable, 3> tab_;
  std::array<std::vector<double>, 3> tab_g_;
  std::vector<std::string> warnings_;
};

// One-soliton of the focusing equation (lambda = -1):
//   u(x, t) = sign * eta * sech(eta * (x + eta^2 t - x0)),
// with any mixed derivative; the profile presets "sech" (initial) and
// "soliton" (boundary) are its restrictions to t = 0 and x = 0.
struct SolitonExact {
  double eta = 1.0;
  double x0 = 0.0;
  int sign = 1;

  double u(double x, double t, int dx = 0, int dt = 0) const;
  // u_t + 6 lambda u^2 u_x - u_xxx at (x,t) for lambda = -1; exactness oracle
  double pde_residual(double x, double t) const;
};

}  // namespace mkdvut
