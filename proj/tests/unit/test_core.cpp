#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mkdvut/errors.hpp"
#include "mkdvut/jet.hpp"
#include "mkdvut/mat2.hpp"
#include "mkdvut/profiles.hpp"
#include "mkdvut/quad.hpp"

using namespace mkdvut;
using nlohmann::json;

namespace {

// sech and its first five derivatives as explicit polynomials in (S, T);
// standard closed forms, independent of the jet arithmetic under test
double sech_deriv_ref(double w, int m) {
  double S = 1.0 / std::cosh(w), T = std::tanh(w);
  switch (m) {
    case 0: return S;
    case 1: return -S * T;
    case 2: return S - 2.0 * S * S * S;
    case 3: return -S * T * (1.0 - 6.0 * S * S);
    case 4: return S - 20.0 * S * S * S + 24.0 * std::pow(S, 5);
    case 5: return -S * T * (1.0 - 60.0 * S * S + 120.0 * std::pow(S, 4));
  }
  return 0.0;
}

// physicists' Hermite polynomials: d^m/dx^m e^{-y^2} = (-1)^m H_m(y) e^{-y^2}
double hermite(int m, double y) {
  double h0 = 1.0, h1 = 2.0 * y;
  if (m == 0) return h0;
  for (int j = 1; j < m; ++j) {
    double h2 = 2.0 * y * h1 - 2.0 * j * h0;
    h0 = h1;
    h1 = h2;
  }
  return h1;
}

double gaussian_deriv_ref(double alpha, double beta, double x0, double x, int m) {
  double y = std::sqrt(beta) * (x - x0);
  return alpha * std::pow(-std::sqrt(beta), m) * hermite(m, y) * std::exp(-y * y);
}

// integral_L^{L+span} (1+x)|u(x)| by panel quadrature
template <class F>
double tail_integral_ref(const F& absu, double L, double span) {
  const GaussRule& gr = gauss_legendre(64);
  double acc = 0.0;
  const int np = 12;
  for (int p = 0; p < np; ++p) {
    double a = L + span * p / np, b = L + span * (p + 1) / np;
    double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int m = 0; m < 64; ++m) {
      double x = c + h * gr.x[m];
      acc += h * gr.w[m] * (1.0 + x) * absu(x);
    }
  }
  return acc;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("sigma_lambda matches its defining matrix") {
  Mat2 sp = sigma_lambda(1);
  CHECK(sp.a11 == cplx(0.0));
  CHECK(sp.a12 == cplx(1.0));
  CHECK(sp.a21 == cplx(-1.0));
  CHECK(sp.a22 == cplx(0.0));
  Mat2 sm = sigma_lambda(-1);
  CHECK(sm.a12 == cplx(1.0));
  CHECK(sm.a21 == cplx(1.0));
  for (int lam : {1, -1}) {
    Mat2 sq = sigma_lambda(lam) * sigma_lambda(lam);
    CHECK(std::abs(sq.a11 + double(lam)) == 0.0);
    CHECK(std::abs(sq.a22 + double(lam)) == 0.0);
    CHECK(std::abs(sq.a12) == 0.0);
    CHECK(std::abs(sq.a21) == 0.0);
  }
  CHECK_THROWS_AS(sigma_lambda(0), BadParams);
}

TEST_CASE("sigma3 conjugation scales off-diagonals only") {
  Mat2 I = Mat2::identity();
  Mat2 r = conj_sigma3(I, cplx(0.3, -1.7));
  CHECK((r - I).norm() == 0.0);

  Mat2 up{0.0, 1.0, 0.0, 0.0};
  Mat2 s = conj_sigma3(up, std::log(2.0));
  CHECK(std::abs(s.a12 - 4.0) < 1e-14);
  CHECK(std::abs(s.a21) == 0.0);

  Mat2 ones{1.0, 1.0, 1.0, 1.0};
  Mat2 t = conj_sigma3(ones, cplx(0.0, 1.5707963267948966));
  CHECK(std::abs(t.a11 - 1.0) < 1e-15);
  CHECK(std::abs(t.a12 + 1.0) < 1e-14);
  CHECK(std::abs(t.a21 + 1.0) < 1e-14);
  CHECK(std::abs(t.a22 - 1.0) < 1e-15);

  std::mt19937 rng(31u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  for (int it = 0; it < 20; ++it) {
    Mat2 A{cplx(U(rng), U(rng)), cplx(U(rng), U(rng)), cplx(U(rng), U(rng)),
           cplx(U(rng), U(rng))};
    cplx phi(U(rng) * 3.0, U(rng) * 3.0);
    Mat2 back = conj_sigma3(conj_sigma3(A, phi), -phi);
    CHECK((back - A).norm() < 1e-14);
  }

  CHECK_THROWS_AS(conj_sigma3(ones, cplx(400.0, 0.0)), RangeError);
  Mat2 dg = Mat2::diag(2.0, 3.0);
  Mat2 big = conj_sigma3(dg, cplx(400.0, 0.0));  // diagonal passes untouched
  CHECK((big - dg).norm() == 0.0);
}

TEST_CASE("mat2 determinant and inverse identities on random samples") {
  std::mt19937 rng(7u);
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  auto draw = [&]() {
    for (;;) {
      Mat2 A{cplx(U(rng), U(rng)), cplx(U(rng), U(rng)), cplx(U(rng), U(rng)),
             cplx(U(rng), U(rng))};
      if (std::abs(A.det()) > 0.3) return A;
    }
  };
  for (int it = 0; it < 50; ++it) {
    Mat2 A = draw(), B = draw();
    cplx d = (A * B).det() - A.det() * B.det();
    CHECK(std::abs(d) < 1e-14 * std::abs(A.det() * B.det()) + 1e-15);
    CHECK((A * A.inverse() - Mat2::identity()).norm() < 1e-14);
    CHECK((A.inverse() * A - Mat2::identity()).norm() < 1e-14);
  }
  CHECK_THROWS_AS(Mat2::zero().inverse(), ZeroDenominator);
}

TEST_CASE("initial presets match classical derivative formulas") {
  double L = 30.0;
  InitialProfile zero = InitialProfile::preset(1, "zero", {}, L);
  for (double x : {0.0, 1.3, 29.9})
    for (int m = 0; m <= 5; ++m) CHECK(zero.eval(x, m) == 0.0);

  InitialProfile ex = InitialProfile::preset(1, "exp", {{"alpha", 1.0}, {"beta", 1.0}}, L);
  CHECK(ex.eval(0.0, 1) == doctest::Approx(-1.0).epsilon(1e-14));
  InitialProfile ex2 = InitialProfile::preset(-1, "exp", {{"alpha", -0.7}, {"beta", 1.9}}, L);
  for (double x : {0.0, 0.4, 2.5})
    for (int m = 0; m <= 5; ++m) {
      double ref = -0.7 * std::pow(-1.9, m) * std::exp(-1.9 * x);
      CHECK(ex2.eval(x, m) == doctest::Approx(ref).epsilon(1e-12));
    }

  InitialProfile ga = InitialProfile::preset(
      -1, "gaussian", {{"alpha", 0.4}, {"beta", 1.3}, {"x0", 1.1}}, L);
  for (double x : {0.0, 0.8, 1.1, 2.7})
    for (int m = 0; m <= 5; ++m) {
      double ref = gaussian_deriv_ref(0.4, 1.3, 1.1, x, m);
      CHECK(ga.eval(x, m) == doctest::Approx(ref).epsilon(1e-11));
    }

  InitialProfile se =
      InitialProfile::preset(-1, "sech", {{"eta", 1.2}, {"x0", 2.0}, {"sign", -1.0}}, L);
  for (double x : {0.0, 1.0, 2.0, 5.5})
    for (int m = 0; m <= 5; ++m) {
      double ref = -1.2 * std::pow(1.2, m) * sech_deriv_ref(1.2 * (x - 2.0), m);
      CHECK(se.eval(x, m) == doctest::Approx(ref).epsilon(1e-11));
    }
}

TEST_CASE("sampled table reproduces a smooth function") {
  std::vector<double> x, u;
  for (int i = 0; i <= 800; ++i) {
    x.push_back(0.01 * i);
    u.push_back(std::exp(-0.01 * i));
  }
  InitialProfile p = InitialProfile::table(1, x, u, 8.0);
  CHECK(std::abs(p.eval(0.5) - std::exp(-0.5)) < 1e-9);
  for (double q : {0.123, 1.005, 3.7071, 6.5})
    CHECK(std::abs(p.eval(q) - std::exp(-q)) < 1e-9);
  for (double q : {0.25, 2.31})
    CHECK(std::abs(p.eval(q, 1) + std::exp(-q)) < 1e-7);
  CHECK(std::abs(p.eval(1.5, 2) - std::exp(-1.5)) < 1e-5);
  CHECK(std::abs(p.eval(1.5, 3) + std::exp(-1.5)) < 1e-3);
  CHECK(std::isfinite(p.eval(1.5, 5)));
  CHECK(p.deriv_order() == 5);
}

TEST_CASE("table evaluates to zero beyond its last sample") {
  std::vector<double> x, u;
  for (int i = 0; i <= 500; ++i) {
    x.push_back(0.01 * i);
    u.push_back(std::exp(-0.01 * i));  // ends at e^{-5}, visibly nonzero
  }
  InitialProfile p = InitialProfile::table(1, x, u, 8.0);
  CHECK(p.eval(6.0) == 0.0);
  CHECK(p.eval(6.0, 3) == 0.0);
  CHECK(p.warnings().size() >= 1);

  // compactly supported data: no discontinuity to warn about
  std::vector<double> v;
  for (double xi : x) v.push_back(xi < 1.0 ? std::pow(1.0 - xi, 3) : 0.0);
  InitialProfile q = InitialProfile::table(1, x, v, 8.0);
  CHECK(q.warnings().empty());
  CHECK(q.tail_bound() == 0.0);
}

TEST_CASE("profile guards reject bad domains and orders") {
  InitialProfile p = InitialProfile::preset(1, "exp", {{"alpha", 1.0}, {"beta", 1.0}}, 10.0);
  CHECK_THROWS_AS(p.eval(-0.1), OutOfDomain);
  CHECK_THROWS_AS(p.eval(10.5), OutOfDomain);
  CHECK_THROWS_AS(p.eval(1.0, 6), DerivUnavailable);
  CHECK_THROWS_AS(InitialProfile::preset(0, "zero", {}, 10.0), BadParams);
  CHECK_THROWS_AS(InitialProfile::preset(1, "zero", {}, -1.0), BadParams);
  CHECK_THROWS_AS(InitialProfile::preset(1, "nope", {}, 10.0), PresetUnavailable);
  CHECK_THROWS_AS(InitialProfile::preset(1, "exp", {{"alpha", 1.0}}, 10.0), BadParams);
  CHECK_THROWS_AS(
      InitialProfile::preset(1, "exp", {{"alpha", 1.0}, {"beta", 1.0}, {"junk", 0.0}}, 10.0),
      BadParams);
  CHECK_THROWS_AS(InitialProfile::preset(1, "exp", {{"alpha", 1.0}, {"beta", -2.0}}, 10.0),
                  BadParams);

  BoundaryProfile b = BoundaryProfile::preset(
      -1, "exp", {{"a0", 1.0}, {"a1", 0.0}, {"a2", 0.0}, {"beta", 1.0}}, 5.0);
  CHECK(b.deriv_order(0) == 3);
  CHECK(b.deriv_order(1) == 2);
  CHECK(b.deriv_order(2) == 2);
  CHECK_NOTHROW(b.eval(0, 1.0, 3));
  CHECK_THROWS_AS(b.eval(1, 1.0, 3), DerivUnavailable);
  CHECK_THROWS_AS(b.eval(2, 1.0, 3), DerivUnavailable);
  CHECK_THROWS_AS(b.eval(3, 1.0, 0), BadParams);
  CHECK_THROWS_AS(b.eval(0, -0.5), OutOfDomain);
  CHECK_THROWS_AS(b.eval(0, 5.5), OutOfDomain);
}

TEST_CASE("tail bounds dominate the integral and shrink with truncation") {
  // evaluation helpers built on wider copies so the oracle can see past L
  auto exp_u = [](double x) { return 0.8 * std::exp(-0.9 * x); };
  auto gauss_u = [](double x) { return 0.4 * std::exp(-1.3 * (x - 1.1) * (x - 1.1)); };
  auto sech_u = [](double x) { return 1.2 / std::cosh(1.2 * (x - 2.0)); };

  double L = 6.0;
  InitialProfile pe = InitialProfile::preset(1, "exp", {{"alpha", 0.8}, {"beta", 0.9}}, L);
  double ref = tail_integral_ref(exp_u, L, 60.0);
  CHECK(pe.tail_bound() == doctest::Approx(ref).epsilon(1e-9));

  InitialProfile pg = InitialProfile::preset(
      1, "gaussian", {{"alpha", 0.4}, {"beta", 1.3}, {"x0", 1.1}}, L);
  double refg = tail_integral_ref(gauss_u, L, 30.0);
  CHECK(pg.tail_bound() == doctest::Approx(refg).epsilon(1e-9));

  InitialProfile ps =
      InitialProfile::preset(-1, "sech", {{"eta", 1.2}, {"x0", 2.0}, {"sign", 1.0}}, L);
  double refs = tail_integral_ref(sech_u, L, 60.0);
  CHECK(ps.tail_bound() >= refs);
  CHECK(ps.tail_bound() < 1.5 * refs);

  // table built from exponential samples: fitted tail tracks the true one
  std::vector<double> x, u;
  for (int i = 0; i <= 700; ++i) {
    x.push_back(0.01 * i);
    u.push_back(exp_u(0.01 * i));
  }
  InitialProfile pt = InitialProfile::table(1, x, u, L);
  CHECK(pt.tail_bound() == doctest::Approx(ref).epsilon(1e-3));

  // monotone in the truncation length, for every representation
  std::vector<double> Ls = {4.0, 5.0, 6.5, 8.0, 12.0, 20.0};
  auto mono = [&](auto mk) {
    double prev = std::numeric_limits<double>::infinity();
    for (double l : Ls) {
      double b = mk(l);
      CHECK(b <= prev * (1.0 + 1e-14));
      prev = b;
    }
  };
  mono([&](double l) {
    return InitialProfile::preset(1, "exp", {{"alpha", 0.8}, {"beta", 0.9}}, l).tail_bound();
  });
  mono([&](double l) {
    return InitialProfile::preset(1, "gaussian", {{"alpha", 0.4}, {"beta", 1.3}, {"x0", 1.1}}, l)
        .tail_bound();
  });
  mono([&](double l) {
    return InitialProfile::preset(-1, "sech", {{"eta", 1.2}, {"x0", 2.0}, {"sign", 1.0}}, l)
        .tail_bound();
  });
  mono([&](double l) { return InitialProfile::table(1, x, u, l).tail_bound(); });

  BoundaryProfile bz = BoundaryProfile::preset(1, "zero", {}, 5.0);
  CHECK(bz.tail_bound() == 0.0);
  mono([&](double l) {
    return BoundaryProfile::preset(
               -1, "soliton", {{"eta", 1.0}, {"x0", 2.0}, {"sign", 1.0}}, l)
        .tail_bound();
  });
}

TEST_CASE("profile descriptors round-trip through json") {
  InitialProfile p = InitialProfile::preset(
      -1, "gaussian", {{"alpha", 0.37}, {"beta", 1.21}, {"x0", 0.55}}, 12.0);
  json d = json::parse(p.to_json().dump());
  InitialProfile q = InitialProfile::from_json(d, -1, 12.0);
  for (double x : {0.0, 0.4, 3.3, 11.9})
    for (int m = 0; m <= 5; ++m) CHECK(p.eval(x, m) == q.eval(x, m));

  std::vector<double> xs, us;
  for (int i = 0; i <= 400; ++i) {
    xs.push_back(0.02 * i);
    us.push_back(std::exp(-0.02 * i) * std::cos(0.02 * i));
  }
  InitialProfile t = InitialProfile::table(1, xs, us, 8.0);
  InitialProfile t2 = InitialProfile::from_json(json::parse(t.to_json().dump()), 1, 8.0);
  for (double x : {0.11, 2.47, 7.7}) CHECK(t.eval(x, 2) == t2.eval(x, 2));

  BoundaryProfile b = BoundaryProfile::preset(
      -1, "soliton", {{"eta", 0.9}, {"x0", 1.5}, {"sign", -1.0}}, 7.0);
  BoundaryProfile b2 = BoundaryProfile::from_json(json::parse(b.to_json().dump()), -1, 7.0);
  for (int j = 0; j < 3; ++j)
    for (double tt : {0.0, 1.7, 6.9}) CHECK(b.eval(j, tt, 1) == b2.eval(j, tt, 1));
}

TEST_CASE("profile descriptors reject malformed json") {
  auto bad = [](const char* s) {
    CHECK_THROWS_AS(InitialProfile::from_json(json::parse(s), 1, 10.0), Error);
  };
  bad(R"({"kind":"preset","name":"zero","params":{},"extra":1})");
  bad(R"({"kind":"preset","name":"zero"})");
  bad(R"({"kind":"preset","params":{}})");
  bad(R"({"kind":"preset","name":"whatever","params":{}})");
  bad(R"({"kind":"preset","name":"exp","params":{"alpha":1.0,"beta":1.0,"junk":2.0}})");
  bad(R"({"kind":"mystery"})");
  bad(R"({"kind":"table","x":[0,1],"u":[1,0]})");
  bad(R"({"kind":"table","x":[0,1,2,3,4,5,6],"u":[1,2,3]})");
  bad(R"({"kind":"table","x":[0,1,2,3,4,5,"x"],"u":[1,2,3,4,5,6,7]})");
  bad(R"({"kind":"table","x":[0.5,1,2,3,4,5,6],"u":[1,2,3,4,5,6,7]})");
  bad(R"({"kind":"table","x":[0,1,2,3,3,5,6],"u":[1,2,3,4,5,6,7]})");
  bad(R"({"kind":"table","x":[0,1,2,3,4,5,6],"u":[1,2,3,4,5,6,7],"lambda":1})");
  CHECK_THROWS_AS(BoundaryProfile::from_json(
                      json::parse(R"({"kind":"table","t":[0,1],"g0":[0,0]})"), 1, 5.0),
                  Error);
}

TEST_CASE("boundary presets match their closed forms") {
  BoundaryProfile be = BoundaryProfile::preset(
      1, "exp", {{"a0", 1.0}, {"a1", -0.3}, {"a2", 0.05}, {"beta", 1.4}}, 20.0);
  double as[3] = {1.0, -0.3, 0.05};
  for (int j = 0; j < 3; ++j)
    for (double t : {0.0, 0.9, 7.7})
      for (int m = 0; m <= (j == 0 ? 3 : 2); ++m) {
        double ref = as[j] * std::pow(-1.4, m) * std::exp(-1.4 * t);
        CHECK(be.eval(j, t, m) == doctest::Approx(ref).epsilon(1e-12));
      }

  double eta = 1.1, x0 = 1.8;
  BoundaryProfile bs = BoundaryProfile::preset(
      -1, "soliton", {{"eta", eta}, {"x0", x0}, {"sign", 1.0}}, 20.0);
  for (int j = 0; j < 3; ++j)
    for (double t : {0.0, 0.35, 2.0})
      for (int m = 0; m <= (j == 0 ? 3 : 2); ++m) {
        double w = eta * eta * eta * t - eta * x0;
        double ref = std::pow(eta, 1 + j + 3 * m) * sech_deriv_ref(w, j + m);
        CHECK(bs.eval(j, t, m) == doctest::Approx(ref).epsilon(1e-11));
      }

  // restriction consistency: boundary trace at t=0 equals the x-derivatives
  // of the initial trace at x=0
  InitialProfile is =
      InitialProfile::preset(-1, "sech", {{"eta", eta}, {"x0", x0}, {"sign", 1.0}}, 20.0);
  for (int j = 0; j < 3; ++j)
    CHECK(bs.eval(j, 0.0) == doctest::Approx(is.eval(0.0, j)).epsilon(1e-13));
}

TEST_CASE("soliton closed form satisfies the focusing equation") {
  std::mt19937 rng(2026u);
  std::uniform_real_distribution<double> X(0.0, 20.0), T(0.0, 5.0);
  for (auto [eta, sg] : {std::pair{1.0, 1}, {0.8, -1}, {1.3, 1}}) {
    SolitonExact sol{eta, 2.0, sg};
    double worst = 0.0;
    for (int it = 0; it < 100; ++it)
      worst = std::max(worst, std::abs(sol.pde_residual(X(rng), T(rng))));
    CHECK(worst <= 1e-12);
  }

  // the residual is genuinely sensitive: the defocusing sign does not vanish
  SolitonExact sol{1.0, 2.0, 1};
  double x = 1.3, t = 0.1;  // off the crest so odd derivatives are nonzero
  double uu = sol.u(x, t);
  double wrong = sol.u(x, t, 0, 1) + 6.0 * uu * uu * sol.u(x, t, 1, 0) - sol.u(x, t, 3, 0);
  CHECK(std::abs(wrong) > 1e-3);

  // mixed derivatives agree with a finite-difference probe in t
  double h = 1e-4;
  double fd = (sol.u(x, t + h, 2, 0) - sol.u(x, t - h, 2, 0)) / (2.0 * h);
  CHECK(sol.u(x, t, 2, 1) == doctest::Approx(fd).epsilon(1e-6));
}

TEST_CASE("sech jet derivatives match closed forms") {
  for (double w : {-3.0, -0.7, 0.0, 1.2, 4.0}) {
    Jet s = jet_sech(Jet::variable(w, 5));
    for (int m = 0; m <= 5; ++m)
      CHECK(s.deriv(m) == doctest::Approx(sech_deriv_ref(w, m)).epsilon(1e-12));
  }
}

}  // TEST_SUITE
