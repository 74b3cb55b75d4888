#include "thetalab/fqm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace thetalab {

namespace {
using i128 = __int128;

long long narrow(i128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("integer overflow in lattice arithmetic");
  return static_cast<long long>(v);
}

long long mod_pos(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}
}  // namespace

long long exact_determinant(const IntMatrix& m) {
  const size_t n = m.size();
  if (n == 0) return 1;
  std::vector<std::vector<i128>> a(n, std::vector<i128>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) a[i][j] = m[i][j];
  int sign = 1;
  i128 prev = 1;
  for (size_t k = 0; k + 1 < n; ++k) {
    if (a[k][k] == 0) {
      size_t r = k + 1;
      while (r < n && a[r][k] == 0) ++r;
      if (r == n) return 0;
      std::swap(a[k], a[r]);
      sign = -sign;
    }
    for (size_t i = k + 1; i < n; ++i)
      for (size_t j = k + 1; j < n; ++j) a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
    prev = a[k][k];
  }
  return narrow(sign * a[n - 1][n - 1]);
}

IntMatrix direct_sum(const IntMatrix& a, const IntMatrix& b) {
  const size_t n = a.size(), m = b.size();
  IntMatrix out(n + m, std::vector<long long>(n + m, 0));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) out[i][j] = a[i][j];
  for (size_t i = 0; i < m; ++i)
    for (size_t j = 0; j < m; ++j) out[n + i][n + j] = b[i][j];
  return out;
}

Lattice make_lattice(const IntMatrix& gram, const std::string& name) {
  const size_t n = gram.size();
  for (const auto& row : gram)
    if (row.size() != n) throw std::invalid_argument("gram matrix not square");
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (gram[i][j] != gram[j][i]) throw std::invalid_argument("gram matrix not symmetric");
  if (exact_determinant(gram) == 0) throw std::invalid_argument("singular lattice");
  for (size_t i = 0; i < n; ++i)
    if (gram[i][i] % 2 != 0) throw std::invalid_argument("lattice not even");
  Lattice lat{gram, 0, 0, name};
  if (n > 0) {
    Eigen::MatrixXd g(n, n);
    for (size_t i = 0; i < n; ++i)
      for (size_t j = 0; j < n; ++j) g(i, j) = static_cast<double>(gram[i][j]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) (es.eigenvalues()(i) > 0 ? lat.p : lat.q)++;
  }
  return lat;
}

SmithForm smith_normal_form(const IntMatrix& in) {
  const size_t n = in.size();
  std::vector<std::vector<i128>> a(n, std::vector<i128>(n)), u(n, std::vector<i128>(n, 0)),
      v(n, std::vector<i128>(n, 0));
  for (size_t i = 0; i < n; ++i) {
    u[i][i] = v[i][i] = 1;
    for (size_t j = 0; j < n; ++j) a[i][j] = in[i][j];
  }
  auto abs128 = [](i128 x) { return x < 0 ? -x : x; };
  auto row_axpy = [&](size_t dst, size_t src, i128 f) {  // row dst -= f * row src
    for (size_t j = 0; j < n; ++j) {
      a[dst][j] -= f * a[src][j];
      u[dst][j] -= f * u[src][j];
    }
  };
  auto col_axpy = [&](size_t dst, size_t src, i128 f) {
    for (size_t i = 0; i < n; ++i) {
      a[i][dst] -= f * a[i][src];
      v[i][dst] -= f * v[i][src];
    }
  };
  for (size_t t = 0; t < n; ++t) {
    for (;;) {
      size_t bi = n, bj = n;
      for (size_t i = t; i < n; ++i)
        for (size_t j = t; j < n; ++j)
          if (a[i][j] != 0 && (bi == n || abs128(a[i][j]) < abs128(a[bi][bj]))) {
            bi = i;
            bj = j;
          }
      if (bi == n) break;
      if (bi != t) {
        std::swap(a[bi], a[t]);
        std::swap(u[bi], u[t]);
      }
      if (bj != t) {
        for (size_t i = 0; i < n; ++i) {
          std::swap(a[i][bj], a[i][t]);
          std::swap(v[i][bj], v[i][t]);
        }
      }
      bool clean = true;
      for (size_t i = t + 1; i < n; ++i) {
        row_axpy(i, t, a[i][t] / a[t][t]);
        if (a[i][t] != 0) clean = false;
      }
      for (size_t j = t + 1; j < n; ++j) {
        col_axpy(j, t, a[t][j] / a[t][t]);
        if (a[t][j] != 0) clean = false;
      }
      if (!clean) continue;
      size_t oi = n;
      for (size_t i = t + 1; i < n && oi == n; ++i)
        for (size_t j = t + 1; j < n; ++j)
          if (a[i][j] % a[t][t] != 0) {
            oi = i;
            break;
          }
      if (oi == n) break;
      row_axpy(t, oi, -1);  // row t += row oi, then re-reduce
    }
    if (a[t][t] < 0) {
      for (size_t j = 0; j < n; ++j) {
        a[t][j] = -a[t][j];
        u[t][j] = -u[t][j];
      }
    }
  }
  SmithForm s;
  s.U.assign(n, std::vector<long long>(n));
  s.V.assign(n, std::vector<long long>(n));
  s.d.resize(n);
  for (size_t i = 0; i < n; ++i) {
    s.d[i] = narrow(a[i][i]);
    for (size_t j = 0; j < n; ++j) {
      s.U[i][j] = narrow(u[i][j]);
      s.V[i][j] = narrow(v[i][j]);
    }
  }
  return s;
}

cplx unit_phase(const Rational& r) {
  const Rational f = r.frac();
  // reduce to [-1/2, 1/2) before scaling by 2 pi
  double x = f.to_double();
  if (x >= 0.5) x -= 1.0;
  const double ang = 2.0 * std::numbers::pi * x;
  if (f == Rational(0)) return {1.0, 0.0};
  if (f == Rational(1, 2)) return {-1.0, 0.0};
  if (f == Rational(1, 4)) return {0.0, 1.0};
  if (f == Rational(3, 4)) return {0.0, -1.0};
  return {std::cos(ang), std::sin(ang)};
}

DiscriminantForm::DiscriminantForm(const Lattice& lat) : lat_(lat) {
  const size_t n = lat.gram.size();
  snf_ = smith_normal_form(lat.gram);
  for (size_t i = 0; i < n; ++i)
    if (snf_.d[i] > 1) {
      pos_.push_back(static_cast<int>(i));
      inv_.push_back(snf_.d[i]);
    }
  for (long long d : inv_) {
    if (order_ > (SIZE_MAX / static_cast<size_t>(d))) throw std::overflow_error("discriminant group too large");
    order_ *= static_cast<size_t>(d);
  }
  // exact inverse gram by Gauss-Jordan over Q
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(2 * n));
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) a[i][j] = Rational(lat.gram[i][j]);
    a[i][n + i] = Rational(1);
  }
  for (size_t c = 0; c < n; ++c) {
    size_t r = c;
    while (a[r][c] == Rational(0)) ++r;
    std::swap(a[r], a[c]);
    Rational piv = a[c][c];
    for (auto& x : a[c]) x = x / piv;
    for (size_t i = 0; i < n; ++i) {
      if (i == c || a[i][c] == Rational(0)) continue;
      Rational f = a[i][c];
      for (size_t j = 0; j < 2 * n; ++j) a[i][j] -= f * a[c][j];
    }
  }
  ginv_.assign(n, std::vector<Rational>(n));
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j) ginv_[i][j] = a[i][n + j];

  // level from generator data: q(sum r_k e_k) is determined by q(e_k) and b(e_k, e_l)
  const size_t k = inv_.size();
  for (size_t i = 0; i < k; ++i) {
    std::vector<long long> ei(k, 0);
    ei[i] = 1;
    level_ = lcm_ll(level_, quad_of(ei).den());
    for (size_t j = i + 1; j < k; ++j) {
      std::vector<long long> ej(k, 0);
      ej[j] = 1;
      level_ = lcm_ll(level_, bil_of(ei, ej).den());
    }
  }
  if (order_ <= kEagerLimit) {
    qcache_.reserve(order_);
    for (size_t idx = 0; idx < order_; ++idx) qcache_.push_back(quad_of(residues(idx)));
  }
}

std::vector<long long> DiscriminantForm::residues(size_t idx) const {
  std::vector<long long> r(inv_.size());
  for (size_t k = inv_.size(); k-- > 0;) {
    r[k] = static_cast<long long>(idx % static_cast<size_t>(inv_[k]));
    idx /= static_cast<size_t>(inv_[k]);
  }
  return r;
}

size_t DiscriminantForm::index(const std::vector<long long>& r) const {
  if (r.size() != inv_.size()) throw std::invalid_argument("residue tuple has wrong length");
  size_t idx = 0;
  for (size_t k = 0; k < inv_.size(); ++k) idx = idx * static_cast<size_t>(inv_[k]) + static_cast<size_t>(mod_pos(r[k], inv_[k]));
  return idx;
}

size_t DiscriminantForm::neg(size_t idx) const {
  auto r = residues(idx);
  for (auto& x : r) x = -x;
  return index(r);
}

size_t DiscriminantForm::add(size_t a, size_t b) const {
  auto r = residues(a), s = residues(b);
  for (size_t k = 0; k < r.size(); ++k) r[k] += s[k];
  return index(r);
}

std::vector<Rational> DiscriminantForm::representative(size_t idx) const {
  const auto r = residues(idx);
  const size_t n = lat_.gram.size();
  std::vector<Rational> y(n, Rational(0));
  for (size_t k = 0; k < inv_.size(); ++k) {
    if (r[k] == 0) continue;
    Rational c(r[k], inv_[k]);
    for (size_t i = 0; i < n; ++i) y[i] += Rational(snf_.V[i][pos_[k]]) * c;
  }
  return y;
}

Rational DiscriminantForm::quad_of(const std::vector<long long>& r) const {
  // 1/2 (y, y) needs the unreduced value, so it cannot come from bil_of
  std::vector<Rational> y(lat_.gram.size(), Rational(0));
  for (size_t k = 0; k < inv_.size(); ++k) {
    if (r[k] == 0) continue;
    Rational c(r[k], inv_[k]);
    for (size_t i = 0; i < y.size(); ++i) y[i] += Rational(snf_.V[i][pos_[k]]) * c;
  }
  Rational s(0);
  for (size_t i = 0; i < y.size(); ++i)
    for (size_t j = 0; j < y.size(); ++j)
      if (lat_.gram[i][j] != 0) s += y[i] * Rational(lat_.gram[i][j]) * y[j];
  return (s * Rational(1, 2)).frac();
}

Rational DiscriminantForm::bil_of(const std::vector<long long>& r, const std::vector<long long>& s) const {
  const size_t n = lat_.gram.size();
  std::vector<Rational> y(n, Rational(0)), z(n, Rational(0));
  for (size_t k = 0; k < inv_.size(); ++k) {
    for (size_t i = 0; i < n; ++i) {
      if (r[k] != 0) y[i] += Rational(snf_.V[i][pos_[k]]) * Rational(r[k], inv_[k]);
      if (s[k] != 0) z[i] += Rational(snf_.V[i][pos_[k]]) * Rational(s[k], inv_[k]);
    }
  }
  Rational acc(0);
  for (size_t i = 0; i < n; ++i)
    for (size_t j = 0; j < n; ++j)
      if (lat_.gram[i][j] != 0) acc += y[i] * Rational(lat_.gram[i][j]) * z[j];
  return acc.frac();
}

Rational DiscriminantForm::q(size_t idx) const {
  if (!qcache_.empty()) return qcache_[idx];
  return quad_of(residues(idx));
}

Rational DiscriminantForm::b(size_t a, size_t b) const { return bil_of(residues(a), residues(b)); }

size_t DiscriminantForm::coset_of_integral(const std::vector<long long>& x) const {
  std::vector<long long> r(inv_.size());
  for (size_t k = 0; k < inv_.size(); ++k) {
    i128 acc = 0;
    for (size_t j = 0; j < x.size(); ++j) acc += static_cast<i128>(snf_.U[pos_[k]][j]) * x[j];
    r[k] = mod_pos(narrow(acc % inv_[k]), inv_[k]);
  }
  return index(r);
}

size_t DiscriminantForm::coset_of(const std::vector<Rational>& y) const {
  const size_t n = lat_.gram.size();
  std::vector<long long> x(n);
  for (size_t i = 0; i < n; ++i) {
    Rational s(0);
    for (size_t j = 0; j < n; ++j) s += Rational(lat_.gram[i][j]) * y[j];
    if (!s.is_integer()) throw std::invalid_argument("vector is not in the dual lattice");
    x[i] = s.num();
  }
  return coset_of_integral(x);
}

bool WeilRep::same_module(const WeilRep& o) const {
  return disc == o.disc || (disc->lattice().gram == o.disc->lattice().gram);
}

WeilRep make_weil_rep(const Lattice& lat, bool dual) {
  return WeilRep{std::make_shared<const DiscriminantForm>(lat), lat.p, lat.q, dual};
}

WeilRep trivial_weil_rep(int p, int q) {
  if (((p - q) % 8 + 8) % 8 != 0) throw std::invalid_argument("trivial group needs signature 0 mod 8");
  Lattice empty{{}, 0, 0, "trivial"};
  return WeilRep{std::make_shared<const DiscriminantForm>(empty), p, q, false};
}

CMatrix weil_generator(const WeilRep& w, char gen) {
  const DiscriminantForm& d = *w.disc;
  const auto n = static_cast<Eigen::Index>(d.order());
  CMatrix m = CMatrix::Zero(n, n);
  if (gen == 'T') {
    for (Eigen::Index h = 0; h < n; ++h) m(h, h) = unit_phase(d.q(static_cast<size_t>(h)));
  } else if (gen == 'S') {
    const cplx pre = unit_phase(Rational(w.q - w.p, 8)) / std::sqrt(static_cast<double>(n));
    for (Eigen::Index h = 0; h < n; ++h)
      for (Eigen::Index h2 = 0; h2 < n; ++h2)
        m(h2, h) = pre * unit_phase(-d.b(static_cast<size_t>(h), static_cast<size_t>(h2)));
  } else {
    throw std::invalid_argument("generator must be S or T");
  }
  return w.dual ? CMatrix(m.conjugate()) : m;
}

// ---------------- metaplectic words ----------------

std::string MetaplecticWord::str() const {
  std::string s;
  for (Letter l : letters) s += (l == Letter::S ? 'S' : l == Letter::T ? 'T' : l == Letter::Sinv ? 's' : 't');
  return s;
}

MetaplecticWord MetaplecticWord::parse(const std::string& s) {
  MetaplecticWord w;
  for (char c : s) {
    switch (c) {
      case 'S': w.letters.push_back(Letter::S); break;
      case 'T': w.letters.push_back(Letter::T); break;
      case 's': w.letters.push_back(Letter::Sinv); break;
      case 't': w.letters.push_back(Letter::Tinv); break;
      case ' ': break;
      default: throw std::invalid_argument(std::string("bad letter in word: ") + c);
    }
  }
  return w;
}

cplx MpElement::multiplier(cplx tau) const {
  cplx r = std::sqrt(static_cast<double>(m[2]) * tau + static_cast<double>(m[3]));
  return branch ? -r : r;
}

cplx MpElement::act(cplx tau) const {
  return (static_cast<double>(m[0]) * tau + static_cast<double>(m[1])) /
         (static_cast<double>(m[2]) * tau + static_cast<double>(m[3]));
}

namespace {
const cplx kProbe(0.137, 1.291);

MpElement letter_element(Letter l) {
  switch (l) {
    case Letter::S: return MpElement{{0, -1, 1, 0}, 0};
    case Letter::T: return MpElement{{1, 1, 0, 1}, 0};
    case Letter::Tinv: return MpElement{{1, -1, 0, 1}, 0};
    case Letter::Sinv: {
      // inverse of (S, sqrt tau) is (S^-1, 1/sqrt(-1/tau)); compare with principal sqrt(-tau)
      MpElement e{{0, 1, -1, 0}, 0};
      cplx want = 1.0 / std::sqrt(-1.0 / kProbe);
      if (std::abs(want - e.multiplier(kProbe)) > 1e-9) e.branch = 1;
      return e;
    }
  }
  return {};
}
}  // namespace

MpElement mp_multiply(const MpElement& x, const MpElement& y) {
  const auto& a = x.m;
  const auto& b = y.m;
  MpElement r;
  auto mul = [](long long u, long long v) { return narrow(static_cast<i128>(u) * v); };
  r.m = {mul(a[0], b[0]) + mul(a[1], b[2]), mul(a[0], b[1]) + mul(a[1], b[3]), mul(a[2], b[0]) + mul(a[3], b[2]),
         mul(a[2], b[1]) + mul(a[3], b[3])};
  const cplx phi = x.multiplier(y.act(kProbe)) * y.multiplier(kProbe);
  r.branch = 0;
  if (std::abs(phi - r.multiplier(kProbe)) > 1e-6 * std::max(1.0, std::abs(phi))) r.branch = 1;
  return r;
}

MpElement word_element(const MetaplecticWord& w) {
  MpElement acc;
  for (Letter l : w.letters) acc = mp_multiply(acc, letter_element(l));
  return acc;
}

MetaplecticWord canonical_word(const MpElement& e) {
  long long a = e.m[0], b = e.m[1], c = e.m[2], d = e.m[3];
  if (narrow(static_cast<i128>(a) * d - static_cast<i128>(b) * c) != 1)
    throw std::invalid_argument("matrix is not in SL2(Z)");
  MetaplecticWord w;
  auto push_t = [&](long long n) {
    for (long long i = 0; i < (n < 0 ? -n : n); ++i) w.letters.push_back(n > 0 ? Letter::T : Letter::Tinv);
  };
  // M = T^n S M' with |c'| < |c|, continued-fraction style
  while (c != 0) {
    long long n = a / c;
    if ((a % c != 0) && ((a < 0) != (c < 0))) --n;  // floor
    push_t(n);
    w.letters.push_back(Letter::S);
    long long a1 = a - n * c, b1 = b - n * d;
    // S^-1 [[a1,b1],[c,d]] = [[c,d],[-a1,-b1]]
    a = c;
    b = d;
    c = -a1;
    d = -b1;
  }
  if (a == -1) {  // -I = S^2
    w.letters.push_back(Letter::S);
    w.letters.push_back(Letter::S);
    a = 1;
    b = -b;
  }
  push_t(b);
  MpElement got = word_element(w);
  if (got.m != e.m) throw std::logic_error("word canonicalization failed");
  if (got.branch != e.branch)
    for (int i = 0; i < 4; ++i) w.letters.push_back(Letter::S);  // S^4 = (I, -1)
  return w;
}

CMatrix weil_element(const WeilRep& w, const MetaplecticWord& word) {
  const auto n = static_cast<Eigen::Index>(w.dim());
  CMatrix acc = CMatrix::Identity(n, n);
  if (word.letters.empty()) return acc;
  const CMatrix s = weil_generator(w, 'S'), t = weil_generator(w, 'T');
  const CMatrix si = s.adjoint(), ti = t.adjoint();
  for (Letter l : word.letters) {
    switch (l) {
      case Letter::S: acc = acc * s; break;
      case Letter::T: acc = acc * t; break;
      case Letter::Sinv: acc = acc * si; break;
      case Letter::Tinv: acc = acc * ti; break;
    }
  }
  return acc;
}

CMatrix weil_element(const WeilRep& w, const MpElement& e) { return weil_element(w, canonical_word(e)); }

}  // namespace thetalab
