#include "mkdvut/profiles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mkdvut/fit.hpp"
#include "mkdvut/jet.hpp"

namespace mkdvut {
namespace {

// Fornberg finite-difference weights: derivatives 0..m at z from the nodes
// xs; returned row-major, (m+1) x n.
std::vector<double> fd_weights(const std::vector<double>& xs, double z, int m) {
  int n = int(xs.size());
  std::vector<double> w(size_t(m + 1) * n, 0.0);
  double c1 = 1.0, c4 = xs[0] - z;
  w[0] = 1.0;
  for (int i = 1; i < n; ++i) {
    int mn = std::min(i, m);
    double c2 = 1.0, c5 = c4;
    c4 = xs[size_t(i)] - z;
    for (int j = 0; j < i; ++j) {
      double c3 = xs[size_t(i)] - xs[size_t(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int k = mn; k >= 1; --k)
          w[size_t(k) * n + i] =
              c1 * (k * w[size_t(k - 1) * n + i - 1] - c5 * w[size_t(k) * n + i - 1]) / c2;
        w[size_t(i)] = -c1 * c5 * w[size_t(i) - 1] / c2;
      }
      for (int k = mn; k >= 1; --k)
        w[size_t(k) * n + j] = (c4 * w[size_t(k) * n + j] - k * w[size_t(k - 1) * n + j]) / c3;
      w[size_t(j)] = c4 * w[size_t(j)] / c3;
    }
    c1 = c2;
  }
  return w;
}

// integral_L^inf (1+x) |amp| e^{-beta x} dx
double tail_exp_form(double amp, double beta, double L) {
  if (!(beta > 0.0)) return std::numeric_limits<double>::infinity();
  return std::abs(amp) * std::exp(-beta * L) * ((1.0 + L) / beta + 1.0 / (beta * beta));
}

// integral_T^inf (1+t) C min(1, 2 e^{-(mu t - shift)}) dt; envelope for
// sech(mu t - shift), monotone in T by construction
double tail_capped_exp(double C, double mu, double shift, double T) {
  double tstar = (shift + std::log(2.0)) / mu;
  double expo = [&](double from) {
    return 2.0 * C * std::exp(shift - mu * from) * ((1.0 + from) / mu + 1.0 / (mu * mu));
  }(std::max(T, tstar));
  if (T >= tstar) return expo;
  return C * ((tstar - T) + 0.5 * (tstar * tstar - T * T)) + expo;
}

void check_lambda(int lambda) {
  if (lambda != 1 && lambda != -1) throw BadParams("profile: lambda must be +1 or -1");
}

void check_trunc(double L, const char* what) {
  if (!(L > 0.0) || !std::isfinite(L)) throw BadParams(std::string(what) + " must be positive");
}

void need_params(const std::map<std::string, double>& params,
                 std::initializer_list<const char*> keys, const std::string& name) {
  for (const char* k : keys)
    if (!params.count(k)) throw BadParams("preset '" + name + "': missing param '" + k + "'");
  for (const auto& [k, v] : params) {
    if (std::find_if(keys.begin(), keys.end(),
                     [&](const char* s) { return k == s; }) == keys.end())
      throw BadParams("preset '" + name + "': unknown param '" + k + "'");
    if (!std::isfinite(v)) throw BadParams("preset '" + name + "': param '" + k + "' not finite");
  }
}

double sign_param(double s) {
  if (s != 1.0 && s != -1.0) throw BadParams("preset: 'sign' must be +1 or -1");
  return s;
}

std::map<std::string, double> params_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw BadParams("profile descriptor: 'params' must be an object");
  std::map<std::string, double> p;
  for (const auto& [k, v] : j.items()) {
    if (!v.is_number()) throw BadParams("profile descriptor: param '" + k + "' must be a number");
    p[k] = v.get<double>();
  }
  return p;
}

std::vector<double> vector_from_json(const nlohmann::json& j, const char* key) {
  if (!j.is_array()) throw BadParams(std::string("profile descriptor: '") + key + "' must be an array");
  std::vector<double> v;
  v.reserve(j.size());
  for (const auto& e : j) {
    if (!e.is_number()) throw BadParams(std::string("profile descriptor: '") + key + "' must hold numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

void reject_unknown_keys(const nlohmann::json& j, std::initializer_list<const char*> keys) {
  for (const auto& [k, v] : j.items()) {
    (void)v;
    if (std::find_if(keys.begin(), keys.end(),
                     [&](const char* s) { return k == s; }) == keys.end())
      throw BadParams("profile descriptor: unknown key '" + k + "'");
  }
}

}  // namespace

namespace detail {

QuinticTable QuinticTable::build(const std::vector<double>& x, const std::vector<double>& u) {
  size_t n = x.size();
  if (n != u.size()) throw BadParams("table: x and u must have equal length");
  if (n < 7) throw BadParams("table: need at least 7 samples");
  if (x.front() != 0.0) throw BadParams("table: first sample must sit at 0");
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i]) || !std::isfinite(u[i])) throw BadParams("table: non-finite sample");
    if (i && !(x[i] > x[i - 1])) throw BadParams("table: x must be strictly ascending");
  }

  // knot derivative estimates from a 7-point local polynomial
  const int W = 7;
  std::vector<double> d1(n), d2(n), xs(W);
  for (size_t i = 0; i < n; ++i) {
    size_t lo = std::min(std::max<long>(long(i) - 3, 0), long(n) - W);
    for (int j = 0; j < W; ++j) xs[size_t(j)] = x[lo + j];
    std::vector<double> w = fd_weights(xs, x[i], 2);
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < W; ++j) {
      s1 += w[size_t(W) + j] * u[lo + j];
      s2 += w[size_t(2 * W) + j] * u[lo + j];
    }
    d1[i] = s1;
    d2[i] = s2;
  }

  static const double H0[6] = {1, 0, 0, -10, 15, -6};
  static const double H1[6] = {0, 1, 0, -6, 8, -3};
  static const double H2[6] = {0, 0, 0.5, -1.5, 1.5, -0.5};
  static const double K0[6] = {0, 0, 0, 10, -15, 6};
  static const double K1[6] = {0, 0, 0, -4, 7, -3};
  static const double K2[6] = {0, 0, 0, 0.5, -1, 0.5};

  QuinticTable t;
  t.x = x;
  t.h.resize(n - 1);
  t.coef.resize(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    double h = x[i + 1] - x[i];
    t.h[i] = h;
    for (int k = 0; k < 6; ++k)
      t.coef[i][size_t(k)] = u[i] * H0[k] + h * d1[i] * H1[k] + h * h * d2[i] * H2[k] +
                             u[i + 1] * K0[k] + h * d1[i + 1] * K1[k] + h * h * d2[i + 1] * K2[k];
  }
  return t;
}

double QuinticTable::eval(double at, int deriv) const {
  if (at >= x.back()) return 0.0;
  size_t i = size_t(std::upper_bound(x.begin(), x.end(), at) - x.begin());
  i = std::min(std::max<size_t>(i, 1) - 1, x.size() - 2);
  double s = (at - x[i]) / h[i];
  double p = 0.0;
  for (int k = 5; k >= deriv; --k) {
    double fall = 1.0;
    for (int m = 0; m < deriv; ++m) fall *= k - m;
    p = p * s + coef[i][size_t(k)] * fall;
  }
  return p / std::pow(h[i], deriv);
}

std::vector<double> QuinticTable::values() const {
  std::vector<double> v(x.size());
  for (size_t i = 0; i + 1 < x.size(); ++i) v[i] = coef[i][0];
  double last = 0.0;
  for (double c : coef.back()) last += c;
  v.back() = last;
  return v;
}

double QuinticTable::tail_fit(double from_x) const {
  std::vector<double> u = values();
  size_t n = u.size();
  size_t K = std::clamp<size_t>(n / 5, 5, 40);
  std::vector<double> fx, fy;
  bool any_nonzero = false;
  for (size_t i = n - K; i < n; ++i) {
    if (u[i] != 0.0) any_nonzero = true;
    if (std::abs(u[i]) > 0.0) {
      fx.push_back(x[i]);
      fy.push_back(std::log(std::abs(u[i])));
    }
  }
  if (!any_nonzero) return 0.0;
  if (fx.size() < 3) return std::numeric_limits<double>::infinity();
  LineFit f = line_fit(fx, fy);
  double beta = -f.slope;
  if (beta <= 1e-9) return std::numeric_limits<double>::infinity();
  return tail_exp_form(std::exp(f.intercept), beta, from_x);
}

}  // namespace detail

// ---- InitialProfile --------------------------------------------------------

InitialProfile InitialProfile::preset(int lambda, const std::string& name,
                                      const std::map<std::string, double>& params,
                                      double L_trunc) {
  check_lambda(lambda);
  check_trunc(L_trunc, "L_trunc");
  InitialProfile p;
  p.lambda_ = lambda;
  p.L_ = L_trunc;
  p.name_ = name;
  p.params_ = params;
  if (name == "zero") {
    need_params(params, {}, name);
    p.kind_ = Kind::Zero;
  } else if (name == "gaussian") {
    need_params(params, {"alpha", "beta", "x0"}, name);
    if (!(params.at("beta") > 0.0)) throw BadParams("preset 'gaussian': beta must be positive");
    p.kind_ = Kind::Gaussian;
  } else if (name == "exp") {
    need_params(params, {"alpha", "beta"}, name);
    if (!(params.at("beta") > 0.0)) throw BadParams("preset 'exp': beta must be positive");
    p.kind_ = Kind::Exp;
  } else if (name == "sech") {
    need_params(params, {"eta", "x0", "sign"}, name);
    if (!(params.at("eta") > 0.0)) throw BadParams("preset 'sech': eta must be positive");
    sign_param(params.at("sign"));
    p.kind_ = Kind::Sech;
  } else {
    throw PresetUnavailable("unknown initial preset '" + name + "'");
  }
  return p;
}

InitialProfile InitialProfile::table(int lambda, const std::vector<double>& x,
                                     const std::vector<double>& u, double L_trunc) {
  check_lambda(lambda);
  check_trunc(L_trunc, "L_trunc");
  InitialProfile p;
  p.lambda_ = lambda;
  p.L_ = L_trunc;
  p.kind_ = Kind::Table;
  p.tab_ = detail::QuinticTable::build(x, u);
  p.tab_u_ = u;
  double umax = 0.0;
  for (double v : u) umax = std::max(umax, std::abs(v));
  if (umax > 0.0 && std::abs(u.back()) > 1e-10 * umax)
    p.warnings_.push_back("table end value is nonzero; u0 evaluates to 0 beyond x=" +
                          std::to_string(x.back()));
  return p;
}

InitialProfile InitialProfile::from_json(const nlohmann::json& desc, int lambda, double L_trunc) {
  if (!desc.is_object()) throw BadParams("profile descriptor must be a JSON object");
  if (!desc.contains("kind") || !desc["kind"].is_string())
    throw BadParams("profile descriptor: missing string 'kind'");
  std::string kind = desc["kind"].get<std::string>();
  if (kind == "preset") {
    reject_unknown_keys(desc, {"kind", "name", "params"});
    if (!desc.contains("name") || !desc["name"].is_string())
      throw BadParams("profile descriptor: missing string 'name'");
    if (!desc.contains("params")) throw BadParams("profile descriptor: missing 'params'");
    return preset(lambda, desc["name"].get<std::string>(), params_from_json(desc["params"]),
                  L_trunc);
  }
  if (kind == "table") {
    reject_unknown_keys(desc, {"kind", "x", "u"});
    if (!desc.contains("x") || !desc.contains("u"))
      throw BadParams("profile descriptor: table needs 'x' and 'u'");
    return table(lambda, vector_from_json(desc["x"], "x"), vector_from_json(desc["u"], "u"),
                 L_trunc);
  }
  throw BadParams("profile descriptor: kind must be 'preset' or 'table'");
}

nlohmann::json InitialProfile::to_json() const {
  if (kind_ == Kind::Table) return {{"kind", "table"}, {"x", tab_.x}, {"u", tab_u_}};
  return {{"kind", "preset"}, {"name", name_}, {"params", params_}};
}

double InitialProfile::eval(double x, int deriv) const {
  if (deriv < 0 || deriv > 5)
    throw DerivUnavailable("InitialProfile: derivative order " + std::to_string(deriv));
  if (!(x >= 0.0 && x <= L_))
    throw OutOfDomain("InitialProfile: x = " + std::to_string(x) + " outside [0, L_trunc]");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Gaussian: {
      Jet v = Jet::variable(x, deriv) - params_.at("x0");
      return (params_.at("alpha") * jet_exp(v * v * -params_.at("beta"))).deriv(deriv);
    }
    case Kind::Exp:
      return (params_.at("alpha") * jet_exp(Jet::variable(x, deriv) * -params_.at("beta")))
          .deriv(deriv);
    case Kind::Sech: {
      double eta = params_.at("eta");
      Jet w = (Jet::variable(x, deriv) - params_.at("x0")) * eta;
      return (params_.at("sign") * eta * jet_sech(w)).deriv(deriv);
    }
    case Kind::Table:
      return tab_.eval(x, deriv);
  }
  return 0.0;
}

double InitialProfile::tail_bound() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Exp:
      return tail_exp_form(params_.at("alpha"), params_.at("beta"), L_);
    case Kind::Gaussian: {
      double a = params_.at("alpha"), b = params_.at("beta"), x0 = params_.at("x0");
      double v = L_ - x0;
      return std::abs(a) * ((1.0 + x0) * 0.5 * std::sqrt(std::numbers::pi / b) *
                                std::erfc(std::sqrt(b) * v) +
                            std::exp(-b * v * v) / (2.0 * b));
    }
    case Kind::Sech: {
      double eta = params_.at("eta");
      return tail_capped_exp(eta, eta, eta * params_.at("x0"), L_);
    }
    case Kind::Table:
      return tab_.tail_fit(L_);
  }
  return 0.0;
}

// ---- BoundaryProfile -------------------------------------------------------

BoundaryProfile BoundaryProfile::preset(int lambda, const std::string& name,
                                        const std::map<std::string, double>& params,
                                        double T_trunc) {
  check_lambda(lambda);
  check_trunc(T_trunc, "T_trunc");
  BoundaryProfile p;
  p.lambda_ = lambda;
  p.T_ = T_trunc;
  p.name_ = name;
  p.params_ = params;
  if (name == "zero") {
    need_params(params, {}, name);
    p.kind_ = Kind::Zero;
  } else if (name == "exp") {
    need_params(params, {"a0", "a1", "a2", "beta"}, name);
    if (!(params.at("beta") > 0.0)) throw BadParams("preset 'exp': beta must be positive");
    p.kind_ = Kind::Exp;
  } else if (name == "soliton") {
    need_params(params, {"eta", "x0", "sign"}, name);
    if (!(params.at("eta") > 0.0)) throw BadParams("preset 'soliton': eta must be positive");
    sign_param(params.at("sign"));
    p.kind_ = Kind::Soliton;
  } else {
    throw PresetUnavailable("unknown boundary preset '" + name + "'");
  }
  return p;
}

BoundaryProfile BoundaryProfile::table(int lambda, const std::vector<double>& t,
                                       const std::vector<double>& g0,
                                       const std::vector<double>& g1,
                                       const std::vector<double>& g2, double T_trunc) {
  check_lambda(lambda);
  check_trunc(T_trunc, "T_trunc");
  BoundaryProfile p;
  p.lambda_ = lambda;
  p.T_ = T_trunc;
  p.kind_ = Kind::Table;
  const std::vector<double>* g[3] = {&g0, &g1, &g2};
  for (int j = 0; j < 3; ++j) {
    p.tab_[size_t(j)] = detail::QuinticTable::build(t, *g[j]);
    p.tab_g_[size_t(j)] = *g[j];
    double gmax = 0.0;
    for (double v : *g[j]) gmax = std::max(gmax, std::abs(v));
    if (gmax > 0.0 && std::abs(g[j]->back()) > 1e-10 * gmax)
      p.warnings_.push_back("table end value of g" + std::to_string(j) +
                            " is nonzero; evaluates to 0 beyond t=" + std::to_string(t.back()));
  }
  return p;
}

BoundaryProfile BoundaryProfile::from_json(const nlohmann::json& desc, int lambda,
                                           double T_trunc) {
  if (!desc.is_object()) throw BadParams("profile descriptor must be a JSON object");
  if (!desc.contains("kind") || !desc["kind"].is_string())
    throw BadParams("profile descriptor: missing string 'kind'");
  std::string kind = desc["kind"].get<std::string>();
  if (kind == "preset") {
    reject_unknown_keys(desc, {"kind", "name", "params"});
    if (!desc.contains("name") || !desc["name"].is_string())
      throw BadParams("profile descriptor: missing string 'name'");
    if (!desc.contains("params")) throw BadParams("profile descriptor: missing 'params'");
    return preset(lambda, desc["name"].get<std::string>(), params_from_json(desc["params"]),
                  T_trunc);
  }
  if (kind == "table") {
    reject_unknown_keys(desc, {"kind", "t", "g0", "g1", "g2"});
    for (const char* k : {"t", "g0", "g1", "g2"})
      if (!desc.contains(k))
        throw BadParams(std::string("profile descriptor: table needs '") + k + "'");
    return table(lambda, vector_from_json(desc["t"], "t"), vector_from_json(desc["g0"], "g0"),
                 vector_from_json(desc["g1"], "g1"), vector_from_json(desc["g2"], "g2"), T_trunc);
  }
  throw BadParams("profile descriptor: kind must be 'preset' or 'table'");
}

nlohmann::json BoundaryProfile::to_json() const {
  if (kind_ == Kind::Table)
    return {{"kind", "table"}, {"t", tab_[0].x}, {"g0", tab_g_[0]}, {"g1", tab_g_[1]},
            {"g2", tab_g_[2]}};
  return {{"kind", "preset"}, {"name", name_}, {"params", params_}};
}

int BoundaryProfile::deriv_order(int j) const {
  if (j < 0 || j > 2) throw BadParams("BoundaryProfile: j must be 0, 1 or 2");
  return j == 0 ? 3 : 2;
}

double BoundaryProfile::eval(int j, double t, int deriv) const {
  if (deriv < 0 || deriv > deriv_order(j))
    throw DerivUnavailable("BoundaryProfile: derivative order " + std::to_string(deriv) +
                           " of g" + std::to_string(j));
  if (!(t >= 0.0 && t <= T_))
    throw OutOfDomain("BoundaryProfile: t = " + std::to_string(t) + " outside [0, T_trunc]");
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Exp: {
      double a = params_.at(std::string("a") + char('0' + j));
      return (a * jet_exp(Jet::variable(t, deriv) * -params_.at("beta"))).deriv(deriv);
    }
    case Kind::Soliton: {
      // g_j^(i)(t) = sign eta^{1+j} (eta^3)^i sech^{(j+i)}(eta^3 t - eta x0)
      double eta = params_.at("eta");
      int n = j + deriv;
      Jet S = jet_sech(Jet::variable(eta * eta * eta * t - eta * params_.at("x0"), n));
      return params_.at("sign") * std::pow(eta, 1 + j + 3 * deriv) * S.deriv(n);
    }
    case Kind::Table:
      return tab_[size_t(j)].eval(t, deriv);
  }
  return 0.0;
}

double BoundaryProfile::tail_bound() const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Exp: {
      double b = params_.at("beta");
      return tail_exp_form(params_.at("a0"), b, T_) + tail_exp_form(params_.at("a1"), b, T_) +
             tail_exp_form(params_.at("a2"), b, T_);
    }
    case Kind::Soliton: {
      // |sech^{(j)}| <= (1,1,3)_j sech pointwise
      double eta = params_.at("eta"), shift = eta * params_.at("x0");
      double mu = eta * eta * eta;
      return tail_capped_exp(eta, mu, shift, T_) + tail_capped_exp(eta * eta, mu, shift, T_) +
             tail_capped_exp(3.0 * eta * eta * eta, mu, shift, T_);
    }
    case Kind::Table: {
      double s = 0.0;
      for (const auto& t : tab_) s += t.tail_fit(T_);
      return s;
    }
  }
  return 0.0;
}

// ---- SolitonExact ----------------------------------------------------------

double SolitonExact::u(double x, double t, int dx, int dt) const {
  int n = dx + dt;
  double w0 = eta * (x + eta * eta * t - x0);
  Jet S = jet_sech(Jet::variable(w0, n));
  return sign * std::pow(eta, 1 + dx + 3 * dt) * S.deriv(n);
}

double SolitonExact::pde_residual(double x, double t) const {
  double uu = u(x, t);
  return u(x, t, 0, 1) - 6.0 * uu * uu * u(x, t, 1, 0) - u(x, t, 3, 0);
}

}  // namespace mkdvut
