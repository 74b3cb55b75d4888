#include "doctest.h"

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/special_functions/expint.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <random>

#include "thetalab/laurent.hpp"
#include "thetalab/qseries.hpp"
#include "thetalab/specfun.hpp"

using namespace thetalab;

namespace {

// int_x^inf e^{-t} t^{a-1} dt by tanh-sinh on a half line
double gamma_quad(double a, double x) {
  boost::math::quadrature::exp_sinh<double> q;
  return q.integrate([&](double s) { return std::exp(-(x + s) + (a - 1.0) * std::log(x + s)); }, 0.0,
                     std::numeric_limits<double>::infinity());
}

double rel(double a, double b) { return std::abs(a - b) / std::max(1e-300, std::abs(b)); }

}  // namespace

TEST_CASE("upper incomplete gamma against Boost and quadrature") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> A(-6.0, 8.0), X(0.05, 30.0);
  for (int i = 0; i < 300; ++i) {
    const double a = A(rng), x = X(rng);
    CAPTURE(a);
    CAPTURE(x);
    const double ours = upper_gamma(a, x);
    CHECK(rel(ours, gamma_quad(a, x)) < 1e-9);
    if (a > 0) CHECK(rel(ours, boost::math::tgamma(a, x)) < 1e-11);
    CHECK(rel(upper_gamma_escaled(a, x), std::exp(x) * gamma_quad(a, x)) < 1e-9);
  }
  for (double x : {0.01, 0.5, 3.0, 40.0}) CHECK(rel(expint_e1(x), boost::math::expint(1, x)) < 1e-12);
  // integer a <= 0 hits the E1 branch of the recurrence
  for (int a : {0, -1, -2, -5}) CHECK(rel(upper_gamma(a, 1.7), gamma_quad(a, 1.7)) < 1e-10);
}

TEST_CASE("H(w) = e^{-w} Gamma(1-k, -2w)") {
  for (double k : {-10.0, -3.5, -0.5, 0.5, 1.5})
    for (double w : {-0.3, -2.0, -9.0}) {
      CAPTURE(k);
      CAPTURE(w);
      CHECK(rel(H_function(k, w), std::exp(-w) * gamma_quad(1.0 - k, -2.0 * w)) < 1e-9);
    }
  // w > 0, integer k <= 0: e^{-w} * int_{-2w}^inf e^{-t} t^{-k} dt is a finite sum
  for (int k : {0, -1, -4})
    for (double w : {0.2, 1.5}) {
      // closed form: e^{-w} e^{2w} sum_{j<=-k} (-k)!/j! (-2w)^j
      const int m = -k;
      double s = 0;
      for (int j = 0; j <= m; ++j) s += std::tgamma(m + 1.0) / std::tgamma(j + 1.0) * std::pow(-2.0 * w, j);
      CHECK(rel(H_function(k, w), std::exp(w) * s) < 1e-12);
    }
  CHECK_THROWS(H_function(0.5, 0.0));
  CHECK_THROWS(H_function(0.5, 1.0));
}

TEST_CASE("Gauss-Legendre rules integrate polynomials exactly") {
  for (int n : {4, 12, 30}) {
    const QuadRule& r = gauss_legendre(n);
    for (int d = 0; d < 2 * n; ++d) {
      double s = 0;
      for (size_t i = 0; i < r.x.size(); ++i) s += r.w[i] * std::pow(r.x[i], d);
      const double exact = d % 2 ? 0.0 : 2.0 / (d + 1);
      CHECK(std::abs(s - exact) < 1e-13);
    }
  }
}

TEST_CASE("classical q-expansions") {
  LaurentSeries e4 = eisenstein_series(4, 10), e6 = eisenstein_series(6, 10), d = delta_series(10);
  // Ramanujan tau
  const long tau[] = {1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643};
  for (int n = 1; n <= 9; ++n) CHECK(d.coeff(n) == tau[n - 1]);
  LaurentSeries diff = e4.pow(3) - e6.pow(2) - d * mpq_class(1728);
  for (int n = 0; n < 10; ++n) CHECK(diff.coeff(n) == 0);
  LaurentSeries j = j_series(4);
  CHECK(j.coeff(-1) == 1);
  CHECK(j.coeff(0) == 744);
  CHECK(j.coeff(1) == 196884);
  CHECK(j.coeff(2) == 21493760);
  CHECK(j.coeff(3) == 864299970);
  // eta^24 = Delta
  LaurentSeries eta24 = euler_product_power(24, 10);
  for (int n = 0; n < 9; ++n) CHECK(eta24.coeff(n) == d.coeff(n + 1));
  CHECK_THROWS(classic_laurent("nope", 5));
}

TEST_CASE("pairing of Delta with E4^2 E6 / Delta^2 vanishes exactly") {
  LaurentSeries f = classic_laurent("E4sqE6_over_DeltaSq", 6), g = classic_laurent("Delta", 6);
  // the two principal-part terms cancel: a(-2) tau(2) + a(-1) tau(1) = 0
  CHECK(f.coeff(-2) == 1);
  CHECK(f.coeff(-2) * g.coeff(2) + f.coeff(-1) * g.coeff(1) == 0);
  CHECK(pairing_exact(g, f) == 0);
  // the floating vector-valued pairing agrees
  VVSeries G = classic_series("Delta", 6);
  WeakMaassForm F = weakly_holomorphic(classic_series("E4sqE6_over_DeltaSq", 6));
  CHECK(std::abs(pairing(G, F)) == 0.0);
}

TEST_CASE("pairing and pairing' differ by a+(0,0) b(0,0)") {
  VVSeries E4 = classic_series("E4", 6);
  // E4^4 E6 / Delta^2 has weight -2, so it pairs with E4
  LaurentSeries k = classic_laurent("E4", 8).pow(4) * classic_laurent("E6", 8) * classic_laurent("Delta", 8).pow(-2);
  WeakMaassForm f = weakly_holomorphic(scalar_to_vv(k.truncate(6), Rational(-2)));
  const cplx diff = pairing(E4, f) - pairing_prime(E4, f);
  const cplx expect = f.plus.at({0, Rational(0)}) * E4.get(0, Rational(0));
  CHECK(std::abs(expect) > 0);
  CHECK(std::abs(diff - expect) < 1e-9 * std::abs(expect));
  // exact route: sum_{n <= 0} a(n) b(-n); E4 f has weight 2, so its constant term vanishes
  CHECK(pairing_exact(classic_laurent("E4", 6), k.truncate(6)) == 0);
  CHECK(std::abs(pairing(E4, f)) < 1e-9 * std::abs(expect));
  CHECK_THROWS(pairing(E4, weakly_holomorphic(classic_series("j", 5))));
}

TEST_CASE("xi_k coefficient formula against finite differences of L_k") {
  // xi_k f = 2 i v^k conj(d f / d taubar); the witness has xi(f) = Delta by construction
  VVSeries g = classic_series("Delta", 12);
  WeakMaassForm f = xi_preimage_witness(g, Rational(-10));
  VVSeries xf = xi_map(f);
  for (const auto& [idx, c] : g.coeffs) CHECK(std::abs(xf.get(idx.h, idx.n) - c) < 1e-9 * std::max(1.0, std::abs(c)));
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(-0.5, 0.5), V(0.9, 1.6);
  const double h = 1e-4;
  int checked = 0;
  for (int i = 0; i < 20; ++i) {
    const cplx tau(U(rng), V(rng));
    auto fx = [&](cplx t) { return f.eval(t)[0]; };
    const cplx dx = (fx(tau + h) - fx(tau - h)) / (2 * h);
    const cplx dy = (fx(tau + cplx(0, h)) - fx(tau - cplx(0, h))) / (2 * h);
    const cplx dbar = 0.5 * (dx + cplx(0, 1) * dy);
    const cplx lhs = 2.0 * cplx(0, 1) * std::pow(tau.imag(), -10.0) * std::conj(dbar);
    const cplx rhs = xf.eval(tau)[0];
    CAPTURE(tau);
    CHECK(std::abs(lhs - rhs) / std::abs(rhs) < 1e-6);
    ++checked;
  }
  CHECK(checked == 20);
}

TEST_CASE("xi_k on single coefficients, k = -10") {
  // frozen from an mpmath finite-difference evaluation of 2i v^k conj(df/dtaubar) at 40 digits
  WeakMaassForm f{Rational(-10), trivial_weil_rep(0, 0), {}, {}, FormClass::H_general, Rational(5)};
  f.minus[{0, Rational(-1)}] = 1.0;
  f.minus[{0, Rational(0)}] = 1.0;
  VVSeries x = xi_map(f);
  CHECK(std::abs(x.get(0, Rational(1)) - (-1233981089403.961227)) < 1e-3);
  CHECK(std::abs(x.get(0, Rational(0)) - 11.0) < 1e-12);
  CHECK(x.weight == Rational(12));
}

TEST_CASE("witness is non-holomorphic and respects the growth bound") {
  VVSeries g = classic_series("Delta", 10);
  WeakMaassForm f = xi_preimage_witness(g, Rational(-10));
  CHECK(f.cls == FormClass::H_plus);
  CHECK(!f.minus.empty());
  CHECK(hecke_ratio(f) < 1e3);
  CHECK_THROWS(xi_preimage_witness(g, Rational(-8)));
}

TEST_CASE("index compatibility is enforced") {
  WeilRep w = make_weil_rep(make_lattice({{2}}));
  VVSeries s{Rational(1, 2), w, {}, Rational(3)};
  CHECK_NOTHROW(s.set(1, Rational(1, 4), 1.0));  // rho_L: n - 1/4 in Z
  CHECK_THROWS(s.set(1, Rational(1, 2), 1.0));
  VVSeries d{Rational(1, 2), w.dual_rep(), {}, Rational(3)};
  CHECK_NOTHROW(d.set(1, Rational(-1, 4), 1.0));
  CHECK_NOTHROW(d.set(1, Rational(3, 4), 1.0));
}

TEST_CASE("induction from scalar forms is modular") {
  // eta^{-3} E4^2 E6 / Delta on U+[4], dual rep, seed h = 1
  Lattice L = make_lattice({{0, 1, 0}, {1, 0, 0}, {0, 0, 4}});
  WeilRep w = make_weil_rep(L, true);
  ScalarForm s = eta_quotient_form(-3, 2, 1, -1, 12);
  CHECK(s.weight == Rational(1, 2));
  CHECK(s.offset == Rational(-9, 8));
  VVSeries F = induce_from_scalar(s, w, 1);
  for (char g : {'S', 'T'})
    for (cplx tau : {cplx(0.1, 1.1), cplx(-0.3, 0.9)}) CHECK(series_modularity_residual(F, tau, g) < 1e-9);
  WeakMaassForm f = weakly_holomorphic(F);
  // odd under h -> -h, with principal part q^{-9/8} + 3 q^{-1/8} on h = 1
  CHECK(f.has_plus_symmetry(-1));
  CHECK(std::abs(f.plus.at({1, Rational(-9, 8)}) - 1.0) < 1e-12);
  CHECK(std::abs(f.plus.at({1, Rational(-1, 8)}) - 3.0) < 1e-12);
  CHECK(std::abs(f.plus.at({3, Rational(-1, 8)}) + 3.0) < 1e-12);
  // a seed outside the right isotypic piece is refused
  CHECK_THROWS(induce_from_scalar(s, w, 0));
}

TEST_CASE("scalar evaluation agrees with the product formula for eta") {
  ScalarForm eta = eta_quotient_form(1, 0, 0, 0, 60);
  const cplx tau(0.2, 0.7);
  cplx prod = std::exp(cplx(0, 2 * std::numbers::pi / 24.0) * tau);
  for (int n = 1; n < 200; ++n) prod *= 1.0 - std::exp(cplx(0, 2 * std::numbers::pi * n) * tau);
  CHECK(std::abs(eval_scalar(eta, tau)[0] - prod) < 1e-12);
}

TEST_CASE("form validation rejects bad data") {
  WeakMaassForm f = weakly_holomorphic(classic_series("j", 5));
  f.cls = FormClass::weakly_holomorphic;
  f.minus[{0, Rational(-1)}] = 1.0;
  CHECK_THROWS(f.validate());
}
