// Acceptance gates: one PASS/FAIL line per criterion, tolerances and time budgets fixed below.
#include <boost/math/quadrature/exp_sinh.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "thetalab/fock.hpp"
#include "thetalab/laurent.hpp"
#include "thetalab/lift.hpp"
#include "thetalab/theta.hpp"

using namespace thetalab;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

int failures = 0;

void gate(const std::string& id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs < budget_s;
  const bool ok = o.pass && in_time;
  if (!ok) ++failures;
  std::printf("[%s] %s %s: %s; %.2f s (budget %.0f s)%s\n", ok ? "PASS" : "FAIL", id.c_str(), title.c_str(),
              o.detail.c_str(), secs, budget_s, in_time ? "" : " OVER BUDGET");
  std::fflush(stdout);
}

double weil_residual(const Lattice& lat, bool dual) {
  WeilRep w = make_weil_rep(lat, dual);
  const auto n = static_cast<Eigen::Index>(w.dim());
  CMatrix S = weil_generator(w, 'S'), T = weil_generator(w, 'T');
  CMatrix Z = CMatrix::Zero(n, n);
  for (Eigen::Index h = 0; h < n; ++h) Z(static_cast<Eigen::Index>(w.disc->neg(static_cast<size_t>(h))), h) = 1.0;
  // rho(S)^2 = i^{q-p} Z, conjugated for the dual
  const int e = dual ? lat.p - lat.q : lat.q - lat.p;
  const cplx c = std::pow(cplx(0, 1), static_cast<double>((e % 4 + 4) % 4));
  const CMatrix ST = S * T;
  const CMatrix I = CMatrix::Identity(n, n);
  return std::max({(S * S - c * Z).cwiseAbs().maxCoeff(), (ST * ST * ST - S * S).cwiseAbs().maxCoeff(),
                   (S.adjoint() * S - I).cwiseAbs().maxCoeff(), (T.adjoint() * T - I).cwiseAbs().maxCoeff()});
}

GrassmannPoint moved(const Lattice& lat, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> T(-0.5, 0.5);
  GrassmannPoint z = grassmann_from_frame(lat, base_frame(lat));
  for (int a = 1; a <= lat.p; ++a)
    for (int m = lat.p + 1; m <= lat.rank(); ++m) z = flow(z, a, m, T(rng));
  return z;
}

const WeakMaassForm& j744() {
  static const WeakMaassForm f = weakly_holomorphic(classic_series("j_minus_744", 60));
  return f;
}

double log_model(cplx z1, cplx z2) { return -4.0 * std::log(std::abs(klein_j(z1) - klein_j(z2))); }

}  // namespace

int main() {
  gate("1", "Weil relations", 1.0, [] {
    const IntMatrix lats[] = {{{0, 1}, {1, 0}}, {{2}}, {{2, -1}, {-1, 2}}, lattice_UU().gram, {{2, 0, 0}, {0, 2, 0}, {0, 0, -2}}};
    double worst = 0;
    for (const auto& g : lats)
      for (bool dual : {false, true}) worst = std::max(worst, weil_residual(make_lattice(g), dual));
    return Outcome{worst < 1e-12, fmt("max residual %.2e over 5 lattices x {rho, dual} (< 1e-12)", worst)};
  });

  gate("2", "duality pairing {Delta, E4^2 E6/Delta^2}", 1.0, [] {
    const mpq_class v = pairing_exact(classic_laurent("Delta", 8), classic_laurent("E4sqE6_over_DeltaSq", 8));
    const LaurentSeries f = classic_laurent("E4sqE6_over_DeltaSq", 8), g = classic_laurent("Delta", 8);
    // a(-2) tau(2) + a(-1) tau(1), written out
    const mpq_class manual = f.coeff(-2) * g.coeff(2) + f.coeff(-1) * g.coeff(1);
    return Outcome{v == 0 && manual == 0, "exact value " + v.get_str() + ", a(-2)tau(2)+a(-1)tau(1) = " + manual.get_str()};
  });

  gate("3", "xi_k against finite differences of L_k", 60.0, [] {
    VVSeries g = classic_series("Delta", 12);
    WeakMaassForm f = xi_preimage_witness(g, Rational(-10));
    VVSeries xf = xi_map(f);
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> U(-0.5, 0.5), V(0.9, 1.6);
    const double h = 1e-4;
    double worst = 0;
    for (int i = 0; i < 20; ++i) {
      const cplx tau(U(rng), V(rng));
      auto fx = [&](cplx t) { return f.eval(t)[0]; };
      const cplx dbar = 0.5 * ((fx(tau + h) - fx(tau - h)) / (2 * h) +
                               cplx(0, 1) * (fx(tau + cplx(0, h)) - fx(tau - cplx(0, h))) / (2 * h));
      const cplx lhs = 2.0 * cplx(0, 1) * std::pow(tau.imag(), -10.0) * std::conj(dbar);
      const cplx rhs = xf.eval(tau)[0];
      worst = std::max(worst, std::abs(lhs - rhs) / std::abs(rhs));
    }
    return Outcome{worst < 1e-6, fmt("max relative error %.2e at 20 random tau (< 1e-6)", worst)};
  });

  gate("4", "Fock identities, exact", 60.0, [] {
    size_t checked = 0, failed = 0;
    for (int n = 2; n <= 7; ++n)
      for (int q = 1; q < n; ++q) {
        const int p = n - q;
        for (const auto& id : identity_names()) {
          if (id == "ddc" && (q != 2 || p > 5)) continue;
          ++checked;
          if (!verify_identity(id, p, q).pass) ++failed;
        }
      }
    return Outcome{failed == 0 && checked > 0,
                   fmt("%.0f identity instances for p+q <= 7, %.0f with nonzero difference", double(checked), double(failed))};
  });

  gate("5", "theta modularity", 30.0, [] {
    const IntMatrix lats[] = {{{2, 0}, {0, -2}}, {{2, 0, 0}, {0, 2, 0}, {0, 0, -2}}, {{0, 1, 0}, {1, 0, 0}, {0, 0, 4}},
                              {{2, -1, 0}, {-1, 2, 0}, {0, 0, -4}}, lattice_UU().gram};
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> X(-0.5, 0.5), Y(0.8, 1.5);
    double worst = 0;
    for (const auto& g : lats) {
      Lattice lat = make_lattice(g);
      DiscriminantForm d(lat);
      ThetaOptions o;
      o.tol = 1e-10;
      for (int s = 0; s < 5; ++s) {
        const GrassmannPoint z = moved(lat, rng);
        const cplx tau(X(rng), Y(rng));
        for (const char* k : {"phi0", "phikm", "psi"})
          for (char gen : {'S', 'T'})
            worst = std::max(worst, modularity_residual(make_kernel(k, lat.p, lat.q), d, tau, z, gen, o));
      }
    }
    return Outcome{worst < 1e-8, fmt("max residual %.2e, 5 lattices x 5 (tau,z) x 3 kernels (< 1e-8)", worst)};
  });

  gate("6", "lowering identity on U+U", 60.0, [] {
    Lattice U = lattice_UU();
    DiscriminantForm d(U);
    const std::pair<cplx, cplx> pts[] = {{{0.1, 1.2}, {0.4, 0.7}}, {{-0.3, 0.9}, {0.2, 1.5}}, {{0.45, 1.05}, {-0.1, 1.1}}};
    const cplx taus[] = {{0.2, 0.9}, {-0.1, 1.3}, {0.35, 0.75}};
    double summed = 0, termwise = 0;
    ThetaOptions o;
    o.tol = 1e-10;
    for (int i = 0; i < 3; ++i) {
      GrassmannPoint z = grassmann_from_h2(U, pts[i].first, pts[i].second);
      summed = std::max(summed, lowering_theta_check(d, taus[i], z, o).residual);
      for (const auto& v : enumerate(d, 0, z, 6.0)) termwise = std::max(termwise, lowering_single_term(z, v.y, taus[i]));
    }
    return Outcome{summed < 1e-6 && termwise < 1e-6,
                   fmt("summed theta residual %.2e, termwise residual %.2e at 3 points (< 1e-6)", summed, termwise)};
  });

  gate("7a", "j-744 lift: Gamma-invariance", 600.0, [] {
    Lattice U = lattice_UU();
    LiftOptions o;
    o.tol = 1e-8;
    const cplx z1(0.1, 1.3), z2(-0.2, 0.9);
    const double base = lift_phi0(j744(), grassmann_from_h2(U, z1, z2), o).value();
    double worst = 0;
    for (auto [a, b] : {std::pair<cplx, cplx>{z1 + 1.0, z2}, {-1.0 / z1, z2}, {z1, z2 - 2.0}, {z1, -1.0 / z2}, {z2, z1}})
      worst = std::max(worst, std::abs(lift_phi0(j744(), grassmann_from_h2(U, a, b), o).value() - base));
    return Outcome{worst < 1e-5, fmt("max deviation %.2e under T, S in each factor and the swap (< 1e-5)", worst)};
  });

  gate("7b", "j-744 lift: Phi + 4 log|j(z1)-j(z2)| constant", 600.0, [] {
    Lattice U = lattice_UU();
    LiftOptions o;
    o.tol = 1e-8;
    std::vector<double> c;
    for (auto [z1, z2] : {std::pair<cplx, cplx>{{0.1, 1.3}, {-0.2, 0.9}}, {{0.0, 2.0}, {0.3, 1.0}}, {{0.4, 1.1}, {0.35, 1.7}}})
      c.push_back(lift_phi0(j744(), grassmann_from_h2(U, z1, z2), o).value() - log_model(z1, z2));
    const double spread = *std::max_element(c.begin(), c.end()) - *std::min_element(c.begin(), c.end());
    return Outcome{spread < 1e-4, fmt("spread %.2e at 3 points, constant %.2e (< 1e-4)", spread, c[0])};
  });

  gate("7c", "j-744 lift: dd^c Phi vanishes", 600.0, [] {
    LiftOptions o;
    o.tol = 1e-9;
    const double m = lambda_B(j744(), grassmann_from_h2(lattice_UU(), {0.1, 1.3}, {-0.2, 0.9}), o).max_abs();
    return Outcome{m < 1e-3, fmt("max component %.2e (< 1e-3)", m)};
  });

  gate("7d", "j-744 lift: d^c Phi = -Phi(psi)", 600.0, [] {
    LiftOptions o;
    o.tol = 1e-9;
    GrassmannPoint z = grassmann_from_h2(lattice_UU(), {0.1, 1.3}, {-0.2, 0.9});
    FormValue dc = lift_dc(j744(), z, o);
    FormValue neg = to_form(lift_psi(j744(), z, o));
    for (auto& c : neg.components) c = -c;
    const double d = form_difference(dc, neg).max_abs();
    return Outcome{d < 1e-3 && neg.max_abs() > 0.1, fmt("max difference %.2e, |Phi(psi)| %.2e (< 1e-3)", d, neg.max_abs())};
  });

  gate("8", "q=1 wall crossing on diag(2,2,-2)", 300.0, [] {
    // Literal lattice: L#/L = (Z/2)^3, so h = -h, while q = 1 forces a+(-h,n) = -a+(h,n).
    // Every admissible f is zero and Theta(psi) cancels coset by coset.
    Lattice L = make_lattice({{2, 0, 0}, {0, 2, 0}, {0, 0, -2}});
    DiscriminantForm d(L);
    bool induce_refused = false;
    for (size_t h = 0; h < d.order(); ++h) {
      try {
        induce_from_scalar(eta_quotient_form(-3, 2, 1, -1, 20), make_weil_rep(L, true), h);
      } catch (const std::exception&) {
        induce_refused = true;
        continue;
      }
      induce_refused = false;
      break;
    }
    std::mt19937_64 rng(8);
    double theta_max = 0;
    for (int s = 0; s < 3; ++s) {
      ThetaValue t = theta_eval(make_kernel("psi", 2, 1), d, {0.1, 0.8}, moved(L, rng));
      for (size_t h = 0; h < d.order(); ++h) theta_max = std::max(theta_max, std::abs(t.at(h)));
    }
    std::string why = "unattainable: no nonzero odd-symmetric f exists";
    why += induce_refused ? " (induction refused every seed)" : " (an induction unexpectedly succeeded)";
    why += fmt(", max |Theta(psi)| = %.1e, so the jump and its prediction are both 0", theta_max);
    return Outcome{false, why};
  });

  gate("8*", "q=1 wall crossing, substitute lattice U+[4]", 300.0, [] {
    Lattice L = make_lattice({{0, 1, 0}, {1, 0, 0}, {0, 0, 4}});
    WeakMaassForm f =
        weakly_holomorphic(induce_from_scalar(eta_quotient_form(-3, 2, 1, -1, 30), make_weil_rep(L, true), 1));
    Eigen::VectorXd lam(3);
    lam << 0, 0, 0.25;
    LiftOptions o;
    o.tol = 1e-8;
    double worst = 0, predicted = 0, measured = 0;
    bool bounded = true;
    for (unsigned seed : {1u, 2u}) {
      JumpReport r = jump_check(f, wall_point(L, lam, seed), lam, 1, 0.02, o);
      worst = std::max(worst, r.relative_error);
      predicted = r.predicted;
      measured = r.measured;
      bounded = bounded && std::isfinite(r.left) && std::isfinite(r.right) && std::abs(r.left) < 1e3 &&
                std::abs(r.right) < 1e3;
    }
    return Outcome{worst < 0.05 && bounded && predicted != 0.0,
                   fmt("predicted %.4f, measured %.6f, worst relative error %.2e over 2 walls (< 5%%)", predicted,
                       measured, worst) +
                       (bounded ? ", bounded on both sides" : ", NOT bounded")};
  });

  gate("9", "incomplete-Gamma v-integrals vs direct quadrature", 30.0, [] {
    Lattice U = lattice_UU();
    DiscriminantForm d(U);
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> X(-0.5, 0.5), Y(0.7, 2.0);
    const double svals[] = {0.0, 0.5, 1.0, -1.0, 1.5, -0.5};
    boost::math::quadrature::exp_sinh<double> quad;
    double worst = 0;
    int pairs = 0;
    while (pairs < 50) {
      GrassmannPoint z = grassmann_from_h2(U, {X(rng), Y(rng)}, {X(rng), Y(rng)});
      auto vecs = enumerate(d, 0, z, 12.0);
      const auto& v = vecs[rng() % vecs.size()];
      const double A = kPi * (v.majorant - v.norm);
      if (!(A > 1e-3)) continue;
      const double s = svals[rng() % 6];
      const double closed = vint_closed(s, A);
      const double direct = quad.integrate(
          [&](double t) { return std::pow(1.0 + t, s - 1.0) * std::exp(-A * (1.0 + t)); }, 0.0,
          std::numeric_limits<double>::infinity());
      worst = std::max(worst, std::abs(closed - direct) / std::max(1.0, std::abs(closed)));
      ++pairs;
    }
    return Outcome{worst < 1e-8, fmt("max relative difference %.2e on 50 random (lambda, z) (< 1e-8)", worst)};
  });

  std::printf("%d criterion line(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
