#include "doctest.h"

#include <boost/math/special_functions/hermite.hpp>

#include <random>

#include "thetalab/fock.hpp"

using namespace thetalab;

namespace {

FockForm single(int p, int q, const std::vector<int>& exps, FockForm::Wedge w, const Coeff& c) {
  FockForm f(p, q);
  f.add(FockForm::monomial(exps), w, c);
  return f;
}

std::vector<int> unit_exp(int n, int var) {
  std::vector<int> e(static_cast<size_t>(n), 0);
  e[static_cast<size_t>(var)] = 1;
  return e;
}

}  // namespace

TEST_CASE("Hermite coefficients agree with Boost") {
  for (int n = 0; n <= 8; ++n) {
    const auto c = hermite_coefficients(n);
    for (double x : {-1.3, 0.0, 0.4, 2.1}) {
      double s = 0;
      for (size_t j = 0; j < c.size(); ++j) s += c[j].get_d() * std::pow(x, static_cast<double>(j));
      CHECK(std::abs(s - boost::math::hermite(static_cast<unsigned>(n), x)) <
            1e-12 * std::max(1.0, std::abs(s)));
    }
  }
}

TEST_CASE("scaled Hermite polynomial (4 pi)^{-n/2} H_n(sqrt(2 pi) x)") {
  for (int n = 0; n <= 5; ++n) {
    const auto c = scaled_hermite(n);
    for (double x : {-0.7, 0.3, 1.1}) {
      std::complex<double> s = 0;
      for (size_t j = 0; j < c.size(); ++j) s += c[j].to_complex() * std::pow(x, static_cast<double>(j));
      const double expect = std::pow(4 * std::numbers::pi, -n / 2.0) *
                            boost::math::hermite(static_cast<unsigned>(n), std::sqrt(2 * std::numbers::pi) * x);
      CHECK(std::abs(s - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("Coeff arithmetic and evaluation") {
  const Coeff a = Coeff::term(mpq_class(-1, 2), -2);  // -1/(2 pi)
  CHECK(std::abs(a.to_complex() - (-0.5 / std::numbers::pi)) < 1e-16);
  CHECK(std::abs((a * Coeff(-1L)).to_complex() - 0.5 / std::numbers::pi) < 1e-16);
  CHECK((Coeff::sqrt2() * Coeff::sqrt2()) == Coeff(2L));
  CHECK((Coeff::I() * Coeff::I()) == Coeff(-1L));
  CHECK((Coeff::sqrt_pi_pow(1) * Coeff::sqrt_pi_pow(1)) == Coeff::pi_pow(1));
  CHECK((a - a).is_zero());
  CHECK(Coeff::I().conj() == -Coeff::I());
}

TEST_CASE("the (p,1) example: phi_KM and psi in closed form") {
  for (int p = 1; p <= 5; ++p) {
    CAPTURE(p);
    const int n = p + 1;
    // phi_KM = -(sqrt2 / 4 pi) sum_alpha z_alpha (x) omega_{alpha, p+1}
    FockForm km(p, 1);
    for (int a = 1; a <= p; ++a)
      km = km + single(p, 1, unit_exp(n, a - 1), FockForm::Wedge(1) << km.gen(a, p + 1),
                       Coeff::term(mpq_class(-1, 4), -2, 1));
    CHECK(build_phi_KM(p, 1) == km);
    // psi = (sqrt2 / 8 pi) z_{p+1}
    FockForm psi = single(p, 1, unit_exp(n, p), 0, Coeff::term(mpq_class(1, 8), -2, 1));
    CHECK(build_psi(p, 1) == psi);
    // Schroedinger side: -(1/sqrt2) x_{p+1}
    FockForm psi_s = single(p, 1, unit_exp(n, p), 0, Coeff::term(mpq_class(-1, 2), 0, 1));
    CHECK(fock_to_schrodinger(build_psi(p, 1)) == psi_s);
    // sqrt2 x_alpha on the phi_KM side
    FockForm km_s(p, 1);
    for (int a = 1; a <= p; ++a)
      km_s = km_s + single(p, 1, unit_exp(n, a - 1), FockForm::Wedge(1) << km.gen(a, p + 1), Coeff::sqrt2());
    CHECK(fock_to_schrodinger(build_phi_KM(p, 1)) == km_s);
  }
}

TEST_CASE("phi_0 is the Gaussian itself") {
  for (int p = 1; p <= 3; ++p)
    for (int q = 1; q <= 3; ++q) {
      FockForm s = fock_to_schrodinger(build_phi0(p, q));
      CHECK(s == single(p, q, std::vector<int>(static_cast<size_t>(p + q), 0), 0, Coeff(1L)));
    }
}

TEST_CASE("K'-weights") {
  for (int p = 1; p <= 4; ++p)
    for (int q = 1; q <= 3; ++q) {
      CHECK(build_phi0(p, q).weight() == Rational(p - q, 2));
      CHECK(build_phi_KM(p, q).weight() == Rational(p + q, 2));
      CHECK(build_psi(p, q).weight() == Rational(p + q, 2) - Rational(2));
      // L lowers by 2, R raises by 2
      CHECK(op_L(build_phi_KM(p, q)).weight() == Rational(p + q, 2) - Rational(2));
      CHECK(op_R(build_psi(p, q)).weight() == Rational(p + q, 2));
    }
}

TEST_CASE("operator identities for small signatures (exact)") {
  for (int n = 2; n <= 5; ++n)
    for (int q = 1; q < n; ++q) {
      const int p = n - q;
      for (const auto& id : identity_names()) {
        if (id == "ddc" && q != 2) {
          CHECK_THROWS(verify_identity(id, p, q));
          continue;
        }
        IdentityReport r = verify_identity(id, p, q);
        CAPTURE(id);
        CAPTURE(p);
        CAPTURE(q);
        CHECK(r.pass);
        CHECK(r.diff_term_count == 0);
      }
    }
  CHECK_THROWS(verify_identity("nope", 2, 2));
  CHECK_THROWS(verify_identity("closed", 5, 4));
}

TEST_CASE("d o d = 0 on random invariant forms") {
  std::mt19937_64 rng(23);
  for (int t = 0; t < 10; ++t) {
    const int p = 1 + static_cast<int>(rng() % 3), q = 1 + static_cast<int>(rng() % 2);
    FockForm f = random_invariant_form(p, q, rng);
    CHECK(op_d(op_d(f)).is_zero());
  }
}

TEST_CASE("the Kahler form is 1/(2 pi) on w(a,3)^w(a,4)") {
  for (int p = 1; p <= 3; ++p) {
    const FockForm omega = build_kahler(p);
    CHECK(omega.size() == static_cast<size_t>(p));
    for (const auto& [key, c] : omega.terms()) {
      CHECK(key.first == 0);
      CHECK(std::abs(c.to_complex() - 0.5 / std::numbers::pi) < 1e-16);
    }
    CHECK(omega == build_euler(p, 2) * Coeff(-1L));
  }
}

TEST_CASE("compiled evaluation agrees with the exact coefficients") {
  FockForm s = fock_to_schrodinger(build_phi_KM(2, 2));
  CompiledForm c = compile(s);
  std::vector<std::complex<double>> out(c.wedges.size());
  const double x[4] = {0.3, -1.2, 0.7, 0.25};
  evaluate(c, x, out.data());
  for (size_t k = 0; k < c.wedges.size(); ++k) {
    std::complex<double> ref = 0;
    for (const auto& [key, coeff] : s.terms()) {
      if (key.second != c.wedges[k]) continue;
      std::complex<double> m = coeff.to_complex();
      for (int v = 0; v < 4; ++v) m *= std::pow(x[v], FockForm::exponent(key.first, v));
      ref += m;
    }
    CHECK(std::abs(out[k] - ref) < 1e-13);
  }
}
