#include "thetalab/fock.hpp"

#include <algorithm>
#include <bit>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace thetalab {

namespace {
int sign_below(FockForm::Wedge w, int g) { return (std::popcount(w & ((1u << g) - 1u)) & 1) ? -1 : 1; }
}  // namespace

FockForm::FockForm(int p, int q) : p_(p), q_(q) {
  if (p < 0 || q < 0 || p + q > 8 || p * q > 32) throw std::invalid_argument("signature out of supported range");
}

int FockForm::gen(int alpha, int mu) const {
  if (alpha < 1 || alpha > p_ || mu <= p_ || mu > p_ + q_) throw std::invalid_argument("bad generator index");
  return (alpha - 1) * q_ + (mu - p_ - 1);
}

void FockForm::add(Mono m, Wedge w, const Coeff& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.emplace(Key{m, w}, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

void FockForm::check_same(const FockForm& o) const {
  if (p_ != o.p_ || q_ != o.q_) throw std::invalid_argument("signature mismatch");
}

FockForm FockForm::operator+(const FockForm& o) const {
  check_same(o);
  FockForm out = *this;
  for (const auto& [k, c] : o.terms_) out.add(k.first, k.second, c);
  return out;
}

FockForm FockForm::operator-(const FockForm& o) const { return *this + o * Coeff(-1L); }

FockForm FockForm::operator*(const Coeff& c) const {
  FockForm out(p_, q_);
  if (c.is_zero()) return out;
  for (const auto& [k, v] : terms_) out.add(k.first, k.second, v * c);
  return out;
}

FockForm::Mono FockForm::bump(Mono m, int var, int delta) {
  const int e = exponent(m, var) + delta;
  if (e < 0 || e > 255) throw std::overflow_error("monomial exponent out of range");
  m &= ~(Mono{0xff} << (8 * var));
  return m | (Mono(e) << (8 * var));
}

FockForm::Mono FockForm::monomial(const std::vector<int>& exps) {
  Mono m = 0;
  for (size_t i = 0; i < exps.size(); ++i) m = bump(m, static_cast<int>(i), exps[i]);
  return m;
}

Rational FockForm::weight() const {
  bool have = false;
  Rational w(0);
  for (const auto& [k, c] : terms_) {
    (void)c;
    int da = 0, dm = 0;
    for (int j = 0; j < p_; ++j) da += exponent(k.first, j);
    for (int j = p_; j < p_ + q_; ++j) dm += exponent(k.first, j);
    Rational t = Rational(p_ - q_, 2) + Rational(da - dm);
    if (have && t != w) throw std::invalid_argument("form is not K'-homogeneous");
    w = t;
    have = true;
  }
  if (!have) throw std::invalid_argument("zero form has no weight");
  return w;
}

std::string FockForm::str() const {
  std::ostringstream os;
  if (terms_.empty()) return "0";
  bool first = true;
  for (const auto& [k, c] : terms_) {
    if (!first) os << "\n";
    first = false;
    os << "(" << c.str() << ")";
    for (int j = 0; j < nvars(); ++j) {
      const int e = exponent(k.first, j);
      if (e) os << " z" << (j + 1) << (e > 1 ? "^" + std::to_string(e) : "");
    }
    for (int a = 1; a <= p_; ++a)
      for (int mu = p_ + 1; mu <= p_ + q_; ++mu)
        if (k.second & (1u << gen(a, mu))) os << " w" << a << "," << mu;
  }
  return os.str();
}

FockForm mul_z(const FockForm& f, int var) {
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms()) out.add(FockForm::bump(k.first, var, 1), k.second, c);
  return out;
}

FockForm d_z(const FockForm& f, int var) {
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms()) {
    const int e = FockForm::exponent(k.first, var);
    if (e) out.add(FockForm::bump(k.first, var, -1), k.second, c * Coeff(static_cast<long>(e)));
  }
  return out;
}

FockForm op_A(const FockForm& f, int alpha, int mu) {
  const int g = f.gen(alpha, mu);
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms()) {
    if (k.second & (1u << g)) continue;
    out.add(k.first, k.second | (1u << g), sign_below(k.second, g) < 0 ? -c : c);
  }
  return out;
}

FockForm op_Astar(const FockForm& f, int alpha, int mu) {
  const int g = f.gen(alpha, mu);
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms()) {
    if (!(k.second & (1u << g))) continue;
    out.add(k.first, k.second & ~(1u << g), sign_below(k.second, g) < 0 ? -c : c);
  }
  return out;
}

FockForm op_X(const FockForm& f, int alpha, int mu) {
  const int a = alpha - 1, m = mu - 1;
  return d_z(d_z(f, a), m) * Coeff::term(-4, 2) + mul_z(mul_z(f, a), m) * Coeff::term(mpq_class(1, 4), -2);
}

FockForm op_L(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (int a = 0; a < f.p(); ++a) out = out + d_z(d_z(f, a), a) * Coeff::term(2, 2);
  for (int m = f.p(); m < f.nvars(); ++m) out = out + mul_z(mul_z(f, m), m) * Coeff::term(mpq_class(-1, 8), -2);
  return out;
}

FockForm op_R(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (int a = 0; a < f.p(); ++a) out = out + mul_z(mul_z(f, a), a) * Coeff::term(mpq_class(-1, 8), -2);
  for (int m = f.p(); m < f.nvars(); ++m) out = out + d_z(d_z(f, m), m) * Coeff::term(2, 2);
  return out;
}

FockForm op_d(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (int a = 1; a <= f.p(); ++a)
    for (int mu = f.p() + 1; mu <= f.nvars(); ++mu) out = out + op_A(op_X(f, a, mu), a, mu);
  return out;
}

FockForm op_h(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (int a = 1; a <= f.p(); ++a)
    for (int mu = f.p() + 1; mu <= f.nvars(); ++mu) out = out + mul_z(d_z(op_Astar(f, a, mu), a - 1), mu - 1);
  return out;
}

namespace {
void need_q2(const FockForm& f) {
  if (f.q() != 2) throw std::invalid_argument("complex structure operators need q = 2");
}

// sign = +1 for del, -1 for delbar
FockForm del_impl(const FockForm& f, int sign) {
  need_q2(f);
  const int p = f.p();
  const Coeff si = Coeff::I() * Coeff(static_cast<long>(sign));
  const Coeff half = Coeff(mpq_class(1, 2));
  FockForm out(p, 2);
  for (int a = 1; a <= p; ++a) {
    FockForm y = op_X(f, a, p + 1) - op_X(f, a, p + 2) * si;
    out = out + (op_A(y, a, p + 1) + op_A(y, a, p + 2) * si) * half;
  }
  return out;
}
}  // namespace

FockForm op_del(const FockForm& f) { return del_impl(f, 1); }
FockForm op_delbar(const FockForm& f) { return del_impl(f, -1); }

FockForm op_dc(const FockForm& f) {
  // 1/(4 pi i) = -i/(4 pi)
  return (op_del(f) - op_delbar(f)) * Coeff::term(mpq_class(-1, 4), -2, 0, 1);
}

FockForm op_ddc(const FockForm& f) {
  // -(1/(2 pi i)) = i/(2 pi)
  return op_del(op_delbar(f)) * Coeff::term(mpq_class(1, 2), -2, 0, 1);
}

FockForm op_apply(const std::string& name, const FockForm& f, int alpha, int mu) {
  if (name == "L") return op_L(f);
  if (name == "R") return op_R(f);
  if (name == "X") return op_X(f, alpha, mu);
  if (name == "d") return op_d(f);
  if (name == "h") return op_h(f);
  if (name == "A") return op_A(f, alpha, mu);
  if (name == "Astar") return op_Astar(f, alpha, mu);
  if (name == "del") return op_del(f);
  if (name == "delbar") return op_delbar(f);
  if (name == "dc") return op_dc(f);
  if (name == "ddc") return op_ddc(f);
  throw std::invalid_argument("unknown operator '" + name + "'");
}

FockForm wedge(const FockForm& a, const FockForm& b) {
  if (a.p() != b.p() || a.q() != b.q()) throw std::invalid_argument("signature mismatch");
  FockForm out(a.p(), a.q());
  for (const auto& [ka, ca] : a.terms())
    for (const auto& [kb, cb] : b.terms()) {
      if (ka.second & kb.second) continue;
      int swaps = 0;
      for (FockForm::Wedge w = kb.second; w; w &= w - 1) swaps += std::popcount(ka.second >> (std::countr_zero(w) + 1));
      FockForm::Mono m = ka.first;
      for (int j = 0; j < a.nvars(); ++j) m = FockForm::bump(m, j, FockForm::exponent(kb.first, j));
      const Coeff c = ca * cb;
      out.add(m, ka.second | kb.second, (swaps & 1) ? -c : c);
    }
  return out;
}

FockForm build_phi0(int p, int q) {
  FockForm f(p, q);
  f.add(0, 0, Coeff(1L));
  return f;
}

namespace {
// (-sqrt2 / (4 pi))^q
Coeff km_prefactor(int q) {
  Coeff c(1L);
  const Coeff base = Coeff::term(mpq_class(-1, 4), -2, 1);
  for (int i = 0; i < q; ++i) c = c * base;
  return c;
}

void check_pq(int p, int q) {
  if (p < 1 || q < 1) throw std::invalid_argument("need p >= 1 and q >= 1");
}

// iterate over all tuples in {1..p}^len
template <class Fn>
void for_tuples(int p, int len, Fn fn) {
  std::vector<int> t(static_cast<size_t>(len), 1);
  for (;;) {
    fn(t);
    int i = len - 1;
    while (i >= 0 && t[static_cast<size_t>(i)] == p) t[static_cast<size_t>(i--)] = 1;
    if (i < 0) return;
    ++t[static_cast<size_t>(i)];
  }
}

// determinant of the omega block with rows alphas and columns mus, expanded along the first row
FockForm omega_det(int p, int q, const std::vector<int>& alphas, const std::vector<int>& mus) {
  if (alphas.empty()) return build_phi0(p, q);
  FockForm out(p, q);
  std::vector<int> rest(alphas.begin() + 1, alphas.end());
  for (size_t j = 0; j < mus.size(); ++j) {
    std::vector<int> cols;
    for (size_t c = 0; c < mus.size(); ++c)
      if (c != j) cols.push_back(mus[c]);
    FockForm minor = op_A(omega_det(p, q, rest, cols), alphas[0], mus[j]);
    out = (j % 2 == 0) ? out + minor : out - minor;
  }
  return out;
}
}  // namespace

FockForm build_phi_KM(int p, int q) {
  check_pq(p, q);
  FockForm f(p, q);
  for_tuples(p, q, [&](const std::vector<int>& al) {
    FockForm t = build_phi0(p, q);
    for (int i = q - 1; i >= 0; --i) t = op_A(t, al[static_cast<size_t>(i)], p + 1 + i);
    for (int i = 0; i < q; ++i) t = mul_z(t, al[static_cast<size_t>(i)] - 1);
    f = f + t;
  });
  return f * km_prefactor(q);
}

FockForm build_psi(int p, int q) {
  return op_h(build_phi_KM(p, q)) * Coeff(mpq_class(-1, 2 * (p + q - 1)));
}

FockForm build_psi_formula(int p, int q) {
  check_pq(p, q);
  FockForm f(p, q);
  std::vector<int> mus(static_cast<size_t>(q));
  std::iota(mus.begin(), mus.end(), p + 1);
  mpz_class fact = 1;
  for (int i = 2; i < q; ++i) fact *= i;
  for_tuples(p, q - 1, [&](const std::vector<int>& al) {
    // first row: z_{p+1} ... z_{p+q}
    FockForm det(p, q);
    for (int j = 0; j < q; ++j) {
      std::vector<int> cols;
      for (int c = 0; c < q; ++c)
        if (c != j) cols.push_back(p + 1 + c);
      FockForm minor = mul_z(omega_det(p, q, al, cols), p + j);
      det = (j % 2 == 0) ? det + minor : det - minor;
    }
    for (int a : al) det = mul_z(det, a - 1);
    f = f + det;
  });
  if (q == 1) return f * (km_prefactor(q) * Coeff(mpq_class(-1, 2)));
  return f * (km_prefactor(q) * Coeff(mpq_class(-1, 2) / mpq_class(fact)));
}

FockForm build_euler(int p, int q) {
  check_pq(p, q);
  FockForm out(p, q);
  if (q % 2) return out;
  const int l = q / 2;
  auto Omega = [&](int mu, int nu) {
    FockForm s(p, q);
    for (int a = 1; a <= p; ++a) s = s + op_A(op_A(build_phi0(p, q), a, nu), a, mu);
    return s;
  };
  std::vector<int> perm(static_cast<size_t>(q));
  std::iota(perm.begin(), perm.end(), 1);
  do {
    int inv = 0;
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        if (perm[static_cast<size_t>(i)] > perm[static_cast<size_t>(j)]) ++inv;
    FockForm t = build_phi0(p, q);
    for (int i = 0; i < l; ++i)
      t = wedge(t, Omega(p + perm[static_cast<size_t>(2 * i)], p + perm[static_cast<size_t>(2 * i + 1)]));
    out = (inv % 2) ? out - t : out + t;
  } while (std::next_permutation(perm.begin(), perm.end()));
  // (-1/(4 pi))^l / l!
  mpz_class fact = 1;
  for (int i = 2; i <= l; ++i) fact *= i;
  Coeff pre = Coeff::term(mpq_class(1) / mpq_class(fact), 0);
  for (int i = 0; i < l; ++i) pre = pre * Coeff::term(mpq_class(-1, 4), -2);
  return out * pre;
}

FockForm build_kahler(int p) { return build_euler(p, 2) * Coeff(-1L); }

namespace {
// (-2 pi)^n (x - d/(2 pi))^n applied to 1, as ascending coefficients
const std::vector<Coeff>& z_power_image(int n) {
  static std::map<int, std::vector<Coeff>> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  std::vector<Coeff> poly{Coeff(1L)};
  const Coeff inv2pi = Coeff::term(mpq_class(1, 2), -2);
  for (int k = 0; k < n; ++k) {
    std::vector<Coeff> next(poly.size() + 1);
    for (size_t j = 0; j < poly.size(); ++j) {
      next[j + 1] += poly[j] * Coeff(2L);
      if (j > 0) next[j - 1] += poly[j] * Coeff(static_cast<long>(j)) * inv2pi * Coeff(-1L);
    }
    poly = std::move(next);
  }
  Coeff scale(1L);
  for (int k = 0; k < n; ++k) scale = scale * Coeff::term(-2, 2);
  for (auto& c : poly) c = c * scale;
  return cache.emplace(n, std::move(poly)).first->second;
}
}  // namespace

FockForm fock_to_schrodinger(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms()) {
    // expand the product over variables
    std::vector<std::pair<FockForm::Mono, Coeff>> acc{{0, c}};
    for (int j = 0; j < f.nvars(); ++j) {
      const int e = FockForm::exponent(k.first, j);
      if (!e) continue;
      const auto& img = z_power_image(e);
      std::vector<std::pair<FockForm::Mono, Coeff>> next;
      for (const auto& [m, v] : acc)
        for (size_t d = 0; d < img.size(); ++d)
          if (!img[d].is_zero()) next.emplace_back(FockForm::bump(m, j, static_cast<int>(d)), v * img[d]);
      acc = std::move(next);
    }
    for (const auto& [m, v] : acc) out.add(m, k.second, v);
  }
  return out;
}

std::vector<mpz_class> hermite_coefficients(int n) {
  std::vector<mpz_class> h0{1}, h1{0, 2};
  if (n == 0) return h0;
  for (int k = 1; k < n; ++k) {
    std::vector<mpz_class> h2(static_cast<size_t>(k) + 2, 0);
    for (size_t j = 0; j < h1.size(); ++j) h2[j + 1] += 2 * h1[j];
    for (size_t j = 0; j < h0.size(); ++j) h2[j] -= 2 * k * h0[j];
    h0 = std::move(h1);
    h1 = std::move(h2);
  }
  return h1;
}

std::vector<Coeff> scaled_hermite(int n) {
  const auto h = hermite_coefficients(n);
  std::vector<Coeff> out(h.size());
  for (size_t j = 0; j < h.size(); ++j) {
    if (h[j] == 0) continue;
    // (4 pi)^{-n/2} * (2 pi)^{j/2}: 2^{j/2 - n} pi^{(j - n)/2}
    const int jj = static_cast<int>(j);
    mpq_class r(h[j]);
    r /= mpq_class(mpz_class(1) << static_cast<unsigned>(n));
    r *= mpq_class(mpz_class(1) << static_cast<unsigned>(jj / 2));
    out[j] = Coeff::term(r, jj - n, jj % 2);
  }
  return out;
}

namespace {
FockForm hermite_shape_diff(int p, int q) {
  const FockForm schr = fock_to_schrodinger(build_phi_KM(p, q));
  FockForm diff(p, q);
  std::vector<std::vector<Coeff>> herm;
  for (int m = 0; m <= q; ++m) herm.push_back(scaled_hermite(m));
  for_tuples(p, q, [&](const std::vector<int>& al) {
    FockForm::Wedge w = 0;
    std::vector<int> gens;
    for (int i = 0; i < q; ++i) {
      const int g = (al[static_cast<size_t>(i)] - 1) * q + i;
      gens.push_back(g);
      w |= 1u << g;
    }
    int inv = 0;
    for (int i = 0; i < q; ++i)
      for (int j = i + 1; j < q; ++j)
        if (gens[static_cast<size_t>(i)] > gens[static_cast<size_t>(j)]) ++inv;
    // expected product of Hermite factors, relative to the tuple-ordered wedge
    std::vector<int> mult(static_cast<size_t>(p), 0);
    for (int a : al) ++mult[static_cast<size_t>(a - 1)];
    std::vector<std::pair<FockForm::Mono, Coeff>> expect{{0, Coeff(1L)}};
    for (int a = 0; a < p; ++a) {
      const int m = mult[static_cast<size_t>(a)];
      if (!m) continue;
      std::vector<std::pair<FockForm::Mono, Coeff>> next;
      for (const auto& [mono, c] : expect)
        for (size_t d = 0; d < herm[static_cast<size_t>(m)].size(); ++d)
          if (!herm[static_cast<size_t>(m)][d].is_zero())
            next.emplace_back(FockForm::bump(mono, a, static_cast<int>(d)), c * herm[static_cast<size_t>(m)][d]);
      expect = std::move(next);
    }
    for (const auto& [mono, c] : expect) diff.add(mono, w, (inv % 2) ? -c : c);
    for (const auto& [k, c] : schr.terms())
      if (k.second == w) diff.add(k.first, w, -c);
  });
  return diff;
}

FockForm constant_part(const FockForm& f) {
  FockForm out(f.p(), f.q());
  for (const auto& [k, c] : f.terms())
    if (k.first == 0) out.add(0, k.second, c);
  return out;
}
}  // namespace

const std::vector<std::string>& identity_names() {
  static const std::vector<std::string> names{"closed", "kmpsi", "ddc", "psiformel", "euler", "hermite"};
  return names;
}

IdentityReport verify_identity(const std::string& name, int p, int q) {
  if (p < 1 || q < 1 || p + q > 8) throw std::invalid_argument("signature out of range (p,q >= 1, p+q <= 8)");
  IdentityReport r{name, p, q, false, 0, FockForm(p, q)};
  if (name == "closed") {
    r.diff = op_d(build_phi_KM(p, q));
  } else if (name == "kmpsi") {
    r.diff = op_L(build_phi_KM(p, q)) - op_d(build_psi(p, q));
  } else if (name == "ddc") {
    if (q != 2) throw std::invalid_argument("ddc identity needs q = 2");
    const FockForm phi0 = build_phi0(p, q);
    // both the lowering identity and psi = -d^c phi_0
    r.diff = (op_L(build_phi_KM(p, q)) + op_ddc(phi0)) + (build_psi(p, q) + op_dc(phi0));
  } else if (name == "psiformel") {
    r.diff = build_psi(p, q) - build_psi_formula(p, q);
  } else if (name == "euler") {
    r.diff = constant_part(fock_to_schrodinger(build_phi_KM(p, q))) - build_euler(p, q);
  } else if (name == "hermite") {
    r.diff = hermite_shape_diff(p, q);
  } else {
    throw std::invalid_argument("unknown identity '" + name + "'");
  }
  r.diff_term_count = r.diff.size();
  r.pass = r.diff.is_zero();
  return r;
}

FockForm random_invariant_form(int p, int q, std::mt19937_64& rng, int max_word) {
  const FockForm bases[3] = {build_phi0(p, q), build_phi_KM(p, q), build_psi(p, q)};
  std::uniform_int_distribution<int> pick_base(0, 2), pick_op(0, 3), pick_len(0, max_word), pick_num(-5, 5),
      pick_den(1, 4);
  FockForm out(p, q);
  for (int s = 0; s < 2; ++s) {
    FockForm t = bases[pick_base(rng)];
    const int len = pick_len(rng);
    for (int i = 0; i < len; ++i) {
      switch (pick_op(rng)) {
        case 0: t = op_L(t); break;
        case 1: t = op_R(t); break;
        case 2: t = op_d(t); break;
        default: t = op_h(t); break;
      }
    }
    out = out + t * Coeff(mpq_class(pick_num(rng), pick_den(rng)));
  }
  return out;
}

CompiledForm compile(const FockForm& f) {
  CompiledForm c;
  c.nvars = f.nvars();
  for (const auto& [k, v] : f.terms()) {
    CompiledForm::Term t;
    t.exps.resize(static_cast<size_t>(c.nvars));
    int deg = 0;
    for (int j = 0; j < c.nvars; ++j) {
      t.exps[static_cast<size_t>(j)] = FockForm::exponent(k.first, j);
      deg += t.exps[static_cast<size_t>(j)];
    }
    c.max_degree = std::max(c.max_degree, deg);
    t.wedge = k.second;
    t.c = v.to_complex();
    c.terms.push_back(std::move(t));
    c.wedges.push_back(k.second);
  }
  std::sort(c.wedges.begin(), c.wedges.end());
  c.wedges.erase(std::unique(c.wedges.begin(), c.wedges.end()), c.wedges.end());
  return c;
}

void evaluate(const CompiledForm& c, const double* x, std::complex<double>* out) {
  for (size_t k = 0; k < c.wedges.size(); ++k) out[k] = 0.0;
  for (const auto& t : c.terms) {
    double m = 1.0;
    for (int j = 0; j < c.nvars; ++j)
      for (int e = 0; e < t.exps[static_cast<size_t>(j)]; ++e) m *= x[j];
    const auto k = static_cast<size_t>(std::lower_bound(c.wedges.begin(), c.wedges.end(), t.wedge) - c.wedges.begin());
    out[k] += t.c * m;
  }
}

}  // namespace thetalab
