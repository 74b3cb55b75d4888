#include "thetalab/laurent.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace thetalab {

LaurentSeries::LaurentSeries(int val, std::vector<mpq_class> c, int prec) : val_(val), c_(std::move(c)), prec_(prec) {
  normalize();
}

void LaurentSeries::normalize() {
  if (val_ + static_cast<int>(c_.size()) > prec_) c_.resize(std::max(0, prec_ - val_));
  size_t lead = 0;
  while (lead < c_.size() && c_[lead] == 0) ++lead;
  if (lead > 0) {
    c_.erase(c_.begin(), c_.begin() + static_cast<long>(lead));
    val_ += static_cast<int>(lead);
  }
  if (c_.empty()) val_ = prec_;
}

LaurentSeries LaurentSeries::monomial(int exp, const mpq_class& c, int prec) {
  if (exp >= prec) return LaurentSeries(prec, {}, prec);
  return LaurentSeries(exp, {c}, prec);
}

mpq_class LaurentSeries::coeff(int n) const {
  if (n >= prec_) throw std::out_of_range("coefficient beyond series precision");
  if (n < val_ || n >= val_ + static_cast<int>(c_.size())) return 0;
  return c_[static_cast<size_t>(n - val_)];
}

int LaurentSeries::leading_exponent() const { return c_.empty() ? prec_ : val_; }

LaurentSeries LaurentSeries::operator+(const LaurentSeries& o) const {
  const int prec = std::min(prec_, o.prec_);
  const int lo = std::min(val_, o.val_);
  if (lo >= prec) return LaurentSeries(prec, {}, prec);
  std::vector<mpq_class> c(static_cast<size_t>(prec - lo));
  for (size_t i = 0; i < c_.size(); ++i)
    if (val_ + static_cast<int>(i) < prec) c[static_cast<size_t>(val_ - lo) + i] += c_[i];
  for (size_t i = 0; i < o.c_.size(); ++i)
    if (o.val_ + static_cast<int>(i) < prec) c[static_cast<size_t>(o.val_ - lo) + i] += o.c_[i];
  return LaurentSeries(lo, std::move(c), prec);
}

LaurentSeries LaurentSeries::operator*(const mpq_class& s) const {
  std::vector<mpq_class> c = c_;
  for (auto& x : c) x *= s;
  return LaurentSeries(val_, std::move(c), prec_);
}

LaurentSeries LaurentSeries::operator-(const LaurentSeries& o) const { return *this + o * mpq_class(-1); }

LaurentSeries LaurentSeries::operator*(const LaurentSeries& o) const {
  // precision: the first unknown term comes from a known leading term times an unknown tail
  const int prec = std::min(leading_exponent() + o.prec_, o.leading_exponent() + prec_);
  const int lo = val_ + o.val_;
  if (c_.empty() || o.c_.empty() || lo >= prec) return LaurentSeries(prec, {}, prec);
  std::vector<mpq_class> c(static_cast<size_t>(prec - lo));
  for (size_t i = 0; i < c_.size(); ++i) {
    if (c_[i] == 0) continue;
    for (size_t j = 0; j < o.c_.size() && i + j < c.size(); ++j) c[i + j] += c_[i] * o.c_[j];
  }
  return LaurentSeries(lo, std::move(c), prec);
}

LaurentSeries LaurentSeries::inverse() const {
  if (c_.empty()) throw std::domain_error("inverse of a zero series");
  // 1/(q^v (a0 + a1 q + ...)) known to relative precision prec - v
  const int rel = prec_ - val_;
  std::vector<mpq_class> b(static_cast<size_t>(rel));
  const mpq_class inv0 = 1 / c_[0];
  b[0] = inv0;
  for (int n = 1; n < rel; ++n) {
    mpq_class s = 0;
    for (int i = 1; i <= n && i < static_cast<int>(c_.size()); ++i) s += c_[static_cast<size_t>(i)] * b[static_cast<size_t>(n - i)];
    b[static_cast<size_t>(n)] = -s * inv0;
  }
  return LaurentSeries(-val_, std::move(b), -val_ + rel);
}

LaurentSeries LaurentSeries::pow(int e) const {
  if (e < 0) return inverse().pow(-e);
  LaurentSeries acc(0, {mpq_class(1)}, 1 << 30);  // exact 1
  LaurentSeries base = *this;
  while (e > 0) {
    if (e & 1) acc = acc * base;
    e >>= 1;
    if (e) base = base * base;
  }
  return acc;
}

LaurentSeries LaurentSeries::truncate(int prec) const { return LaurentSeries(val_, c_, std::min(prec, prec_)); }

std::string LaurentSeries::str(int max_terms) const {
  std::ostringstream os;
  int shown = 0;
  for (size_t i = 0; i < c_.size() && shown < max_terms; ++i) {
    if (c_[i] == 0) continue;
    if (shown) os << " + ";
    os << c_[i].get_str() << "*q^" << (val_ + static_cast<int>(i));
    ++shown;
  }
  if (!shown) os << "0";
  os << " + O(q^" << prec_ << ")";
  return os.str();
}

namespace {
mpz_class divisor_power_sum(int n, int k) {
  mpz_class s = 0;
  for (int d = 1; d * d <= n; ++d) {
    if (n % d) continue;
    mpz_class t;
    mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(d), static_cast<unsigned long>(k));
    s += t;
    const int e = n / d;
    if (e != d) {
      mpz_ui_pow_ui(t.get_mpz_t(), static_cast<unsigned long>(e), static_cast<unsigned long>(k));
      s += t;
    }
  }
  return s;
}
}  // namespace

LaurentSeries eisenstein_series(int k, int prec) {
  long c;
  if (k == 4) c = 240;
  else if (k == 6) c = -504;
  else throw std::invalid_argument("eisenstein_series supports k = 4, 6");
  std::vector<mpq_class> a(static_cast<size_t>(std::max(prec, 1)));
  a[0] = 1;
  for (int n = 1; n < prec; ++n) a[static_cast<size_t>(n)] = mpq_class(c * divisor_power_sum(n, k - 1));
  return LaurentSeries(0, std::move(a), prec);
}

LaurentSeries delta_series(int prec) {
  LaurentSeries e4 = eisenstein_series(4, prec), e6 = eisenstein_series(6, prec);
  return (e4.pow(3) - e6.pow(2)) * mpq_class(1, 1728);
}

LaurentSeries j_series(int prec) {
  // Delta has valuation 1, so its inverse loses nothing relative; need Delta to prec+2
  LaurentSeries e4 = eisenstein_series(4, prec + 2);
  return (e4.pow(3) * delta_series(prec + 2).inverse()).truncate(prec);
}

LaurentSeries euler_product_power(int e, int prec) {
  // logarithmic derivative: n b_n = -e sum_{m=1}^n sigma_1(m) b_{n-m}
  std::vector<mpq_class> b(static_cast<size_t>(std::max(prec, 1)));
  b[0] = 1;
  for (int n = 1; n < prec; ++n) {
    mpq_class s = 0;
    for (int m = 1; m <= n; ++m) s += mpq_class(divisor_power_sum(m, 1)) * b[static_cast<size_t>(n - m)];
    b[static_cast<size_t>(n)] = -mpq_class(e) * s / n;
  }
  return LaurentSeries(0, std::move(b), prec);
}

int classic_weight(const std::string& name) {
  if (name == "E4") return 4;
  if (name == "E6") return 6;
  if (name == "Delta") return 12;
  if (name == "j" || name == "j_minus_744") return 0;
  if (name == "E4sqE6_over_DeltaSq") return -10;
  throw std::invalid_argument("unknown series '" + name + "'");
}

LaurentSeries classic_laurent(const std::string& name, int prec) {
  if (prec < 1) throw std::invalid_argument("prec must be >= 1");
  if (name == "E4") return eisenstein_series(4, prec);
  if (name == "E6") return eisenstein_series(6, prec);
  if (name == "Delta") return delta_series(prec);
  if (name == "j") return j_series(prec);
  if (name == "j_minus_744") return j_series(prec) - LaurentSeries::monomial(0, 744, prec);
  if (name == "E4sqE6_over_DeltaSq") {
    LaurentSeries e4 = eisenstein_series(4, prec + 4), e6 = eisenstein_series(6, prec + 4);
    return (e4.pow(2) * e6 * delta_series(prec + 4).pow(-2)).truncate(prec);
  }
  throw std::invalid_argument("unknown series '" + name + "'");
}

}  // namespace thetalab
