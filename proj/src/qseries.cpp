#include "thetalab/qseries.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "thetalab/specfun.hpp"

namespace thetalab {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx e_of(double n, cplx tau) { return std::exp(cplx(0.0, kTwoPi * n) * tau); }

bool trivial_group(const WeilRep& w) { return w.dim() == 1; }

void check_pairing_inputs(const VVSeries& g, const WeakMaassForm& f) {
  if (g.weight + f.weight != Rational(2)) throw std::invalid_argument("pairing needs complementary weights");
  if (!g.rep.same_module(f.rep)) throw std::invalid_argument("pairing needs the same discriminant form");
  if (!trivial_group(g.rep) && g.rep.dual == f.rep.dual)
    throw std::invalid_argument("pairing needs dual representations");
}

cplx pair_sum(const VVSeries& g, const WeakMaassForm& f, bool include_zero) {
  check_pairing_inputs(g, f);
  cplx acc = 0.0;
  for (const auto& [idx, a] : f.plus) {
    if (idx.n > Rational(0) || (!include_zero && idx.n == Rational(0))) continue;
    const Rational m = -idx.n;
    if (m >= g.prec) throw std::out_of_range("pairing needs g to higher precision");
    acc += a * g.get(idx.h, m);
  }
  return acc;
}
}  // namespace

std::string to_string(FormClass c) {
  switch (c) {
    case FormClass::weakly_holomorphic: return "weakly_holomorphic";
    case FormClass::H_plus: return "H_plus";
    case FormClass::H_general: return "H_general";
  }
  return "";
}

FormClass form_class_from_string(const std::string& s) {
  if (s == "weakly_holomorphic") return FormClass::weakly_holomorphic;
  if (s == "H_plus") return FormClass::H_plus;
  if (s == "H_general") return FormClass::H_general;
  throw std::invalid_argument("unknown form class '" + s + "'");
}

bool index_compatible(const WeilRep& rep, size_t h, const Rational& n) {
  if (h >= rep.dim()) return false;
  const Rational qh = rep.disc->q(h);
  return (rep.dual ? n + qh : n - qh).is_integer();
}

void VVSeries::set(size_t h, const Rational& n, cplx c) {
  if (!index_compatible(rep, h, n))
    throw std::invalid_argument("index (h=" + std::to_string(h) + ", n=" + n.str() + ") violates n = q(h) mod 1");
  if (c == cplx(0.0)) {
    coeffs.erase({h, n});
    return;
  }
  coeffs[{h, n}] = c;
}

cplx VVSeries::get(size_t h, const Rational& n) const {
  auto it = coeffs.find({h, n});
  return it == coeffs.end() ? cplx(0.0) : it->second;
}

std::vector<cplx> VVSeries::eval(cplx tau) const {
  std::vector<cplx> out(rep.dim(), 0.0);
  for (const auto& [idx, c] : coeffs) out[idx.h] += c * e_of(idx.n.to_double(), tau);
  return out;
}

void VVSeries::validate() const {
  for (const auto& [idx, c] : coeffs) {
    (void)c;
    if (!index_compatible(rep, idx.h, idx.n)) throw std::invalid_argument("series index violates n = q(h) mod 1");
  }
}

void WeakMaassForm::validate() const {
  for (const auto* t : {&plus, &minus})
    for (const auto& [idx, c] : *t) {
      (void)c;
      if (!index_compatible(rep, idx.h, idx.n)) throw std::invalid_argument("form index violates n = q(h) mod 1");
    }
  if (cls == FormClass::weakly_holomorphic && !minus.empty())
    throw std::invalid_argument("weakly holomorphic form with nonzero minus part");
  if (cls == FormClass::H_plus)
    for (const auto& [idx, c] : minus)
      if (idx.n >= Rational(0) && c != cplx(0.0)) throw std::invalid_argument("H_plus form with a-(h,n) != 0 for n >= 0");
}

std::vector<cplx> WeakMaassForm::eval_plus(cplx tau) const {
  std::vector<cplx> out(rep.dim(), 0.0);
  for (const auto& [idx, c] : plus) out[idx.h] += c * e_of(idx.n.to_double(), tau);
  return out;
}

std::vector<cplx> WeakMaassForm::eval_minus(cplx tau) const {
  std::vector<cplx> out(rep.dim(), 0.0);
  const double u = tau.real(), v = tau.imag(), k = weight.to_double();
  for (const auto& [idx, c] : minus) {
    const double n = idx.n.to_double();
    if (idx.n == Rational(0)) out[idx.h] += c * std::pow(v, 1.0 - k);
    else out[idx.h] += c * H_function(k, kTwoPi * n * v) * e_of(n, cplx(u, 0.0));
  }
  return out;
}

std::vector<cplx> WeakMaassForm::eval(cplx tau) const {
  auto a = eval_plus(tau);
  auto b = eval_minus(tau);
  for (size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  return a;
}

bool WeakMaassForm::has_plus_symmetry(int sign) const {
  const auto& d = *rep.disc;
  for (const auto& [idx, c] : plus) {
    auto it = plus.find({d.neg(idx.h), idx.n});
    const cplx other = it == plus.end() ? cplx(0.0) : it->second;
    if (std::abs(other - static_cast<double>(sign) * c) > 1e-12 * std::max(1.0, std::abs(c))) return false;
  }
  return true;
}

VVSeries scalar_to_vv(const LaurentSeries& s, const Rational& weight, int p, int q) {
  VVSeries out{weight, trivial_weil_rep(p, q), {}, Rational(s.precision())};
  for (int n = s.valuation(); n < s.precision(); ++n) {
    const mpq_class c = s.coeff(n);
    if (c != 0) out.coeffs[{0, Rational(n)}] = cplx(c.get_d(), 0.0);
  }
  return out;
}

VVSeries classic_series(const std::string& name, int prec) {
  return scalar_to_vv(classic_laurent(name, prec), Rational(classic_weight(name)));
}

WeakMaassForm weakly_holomorphic(const VVSeries& s) {
  WeakMaassForm f{s.weight, s.rep, s.coeffs, {}, FormClass::weakly_holomorphic, s.prec};
  f.validate();
  return f;
}

namespace {

// xi of a-(h,-m) H(-2 pi m v) e(-mu), resp. a-(h,0) v^{1-k}, is factor * conj(a-) q^m, with
// xi f = 2i v^k conj(df/dtaubar) and the Wirtinger derivative d/dtaubar = (d/du + i d/dv) / 2.
cplx xi_factor(double k, const Rational& m) {
  if (m == Rational(0)) return 1.0 - k;
  return -std::pow(cplx(4.0 * std::numbers::pi * m.to_double(), 0.0), 1.0 - k);
}

}  // namespace

VVSeries xi_map(const WeakMaassForm& f) {
  const double k = f.weight.to_double();
  VVSeries out{Rational(2) - f.weight, f.rep.dual_rep(), {}, Rational(0)};
  Rational top(0);
  bool any = false;
  for (const auto& [idx, a] : f.minus) {
    const Rational m = -idx.n;
    out.set(idx.h, m, xi_factor(k, m) * std::conj(a));
    if (!any || m > top) top = m;
    any = true;
  }
  // the minus table is stored down to -prec, so the image is known up to that bound
  out.prec = any ? top + Rational(1) : f.prec;
  return out;
}

VVSeries principal_part(const WeakMaassForm& f) {
  VVSeries out{f.weight, f.rep, {}, Rational(1)};
  for (const auto& [idx, a] : f.plus)
    if (idx.n <= Rational(0)) out.coeffs[idx] = a;
  return out;
}

cplx pairing(const VVSeries& g, const WeakMaassForm& f) { return pair_sum(g, f, true); }
cplx pairing_prime(const VVSeries& g, const WeakMaassForm& f) { return pair_sum(g, f, false); }

mpq_class pairing_exact(const LaurentSeries& g, const LaurentSeries& f) {
  mpq_class acc = 0;
  for (int n = f.valuation(); n <= 0 && n < f.precision(); ++n) {
    const mpq_class a = f.coeff(n);
    if (a == 0) continue;
    acc += a * g.coeff(-n);
  }
  return acc;
}

WeakMaassForm xi_preimage_witness(const VVSeries& g, const Rational& k) {
  if (g.weight + k != Rational(2)) throw std::invalid_argument("witness weight must be 2 - weight(g)");
  const double kd = k.to_double();
  WeakMaassForm f{k, g.rep.dual_rep(), {}, {}, FormClass::H_plus, g.prec};
  for (const auto& [idx, b] : g.coeffs) {
    const Rational m = idx.n;
    const cplx factor = xi_factor(kd, m);
    if (m <= Rational(0)) f.cls = FormClass::H_general;
    f.minus[{idx.h, -m}] = std::conj(b / factor);
  }
  f.validate();
  return f;
}

double hecke_ratio(const WeakMaassForm& f) {
  const double k = f.weight.to_double();
  double worst = 0.0;
  for (const auto& [idx, a] : f.minus) {
    if (idx.n >= Rational(0)) continue;
    worst = std::max(worst, std::abs(a) * std::pow(-idx.n.to_double(), -k / 2.0));
  }
  return worst;
}

ScalarForm eta_quotient_form(int r, int a, int b, int c, int prec) {
  LaurentSeries s = euler_product_power(r + 24 * c, prec);
  if (a) s = s * eisenstein_series(4, prec).pow(a);
  if (b) s = s * eisenstein_series(6, prec).pow(b);
  ScalarForm out{s, Rational(r, 24) + Rational(c), Rational(r, 2) + Rational(4 * a + 6 * b + 12 * c), Rational(-r, 8).frac(),
                 Rational(r, 24).frac()};
  return out;
}

std::vector<cplx> eval_scalar(const ScalarForm& s, cplx tau) {
  cplx acc = 0.0;
  for (int n = s.series.valuation(); n < s.series.precision(); ++n) {
    const mpq_class c = s.series.coeff(n);
    if (c != 0) acc += c.get_d() * e_of(static_cast<double>(n), tau);
  }
  return {acc * e_of(s.offset.to_double(), tau)};
}

double series_modularity_residual(const VVSeries& F, cplx tau, char gen) {
  const auto base = F.eval(tau);
  const CMatrix m = weil_generator(F.rep, gen);
  std::vector<cplx> lhs;
  cplx factor = 1.0;
  if (gen == 'T') {
    lhs = F.eval(tau + 1.0);
  } else if (gen == 'S') {
    lhs = F.eval(-1.0 / tau);
    factor = std::exp(F.weight.to_double() * std::log(tau));
  } else {
    throw std::invalid_argument("generator must be S or T");
  }
  double scale = 1.0, res = 0.0;
  for (cplx x : base) scale = std::max(scale, std::abs(x));
  for (size_t i = 0; i < lhs.size(); ++i) {
    cplx rhs = 0.0;
    for (size_t j = 0; j < base.size(); ++j)
      rhs += m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) * base[j];
    res = std::max(res, std::abs(lhs[i] - factor * rhs));
  }
  return res / scale;
}

}  // namespace thetalab
