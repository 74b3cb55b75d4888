#include "thetalab/rational.hpp"

#include <ostream>
#include <stdexcept>

namespace thetalab {

namespace {
long long narrow(__int128 v) {
  if (v > INT64_MAX || v < INT64_MIN) throw std::overflow_error("rational overflow");
  return static_cast<long long>(v);
}
__int128 gcd128(__int128 a, __int128 b) {
  if (a < 0) a = -a;
  if (b < 0) b = -b;
  while (b != 0) {
    __int128 t = a % b;
    a = b;
    b = t;
  }
  return a;
}
Rational make(__int128 n, __int128 d) {
  if (d == 0) throw std::domain_error("zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  __int128 g = gcd128(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  return Rational(narrow(n), narrow(d));
}
}  // namespace

long long gcd_ll(long long a, long long b) { return narrow(gcd128(a, b)); }
long long lcm_ll(long long a, long long b) {
  if (a == 0 || b == 0) return 0;
  __int128 g = gcd128(a, b);
  __int128 l = static_cast<__int128>(a) / g * b;
  return narrow(l < 0 ? -l : l);
}

Rational::Rational(long long n, long long d) {
  if (d == 0) throw std::domain_error("zero denominator");
  __int128 nn = n, dd = d;
  if (dd < 0) {
    nn = -nn;
    dd = -dd;
  }
  __int128 g = gcd128(nn, dd);
  if (g > 1) {
    nn /= g;
    dd /= g;
  }
  num_ = narrow(nn);
  den_ = narrow(dd);
}

Rational Rational::operator-() const { return make(-static_cast<__int128>(num_), den_); }
Rational Rational::operator+(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.den_ + static_cast<__int128>(o.num_) * den_,
              static_cast<__int128>(den_) * o.den_);
}
Rational Rational::operator-(const Rational& o) const { return *this + (-o); }
Rational Rational::operator*(const Rational& o) const {
  return make(static_cast<__int128>(num_) * o.num_, static_cast<__int128>(den_) * o.den_);
}
Rational Rational::operator/(const Rational& o) const {
  if (o.num_ == 0) throw std::domain_error("division by zero rational");
  return make(static_cast<__int128>(num_) * o.den_, static_cast<__int128>(den_) * o.num_);
}
bool Rational::operator<(const Rational& o) const {
  return static_cast<__int128>(num_) * o.den_ < static_cast<__int128>(o.num_) * den_;
}
long long Rational::floor() const {
  long long q = num_ / den_;
  if (num_ % den_ != 0 && num_ < 0) --q;
  return q;
}

std::string Rational::str() const { return std::to_string(num_) + "/" + std::to_string(den_); }

Rational Rational::parse(const std::string& s) {
  auto slash = s.find('/');
  try {
    size_t used = 0;
    if (slash == std::string::npos) {
      long long n = std::stoll(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return Rational(n);
    }
    std::string a = s.substr(0, slash), b = s.substr(slash + 1);
    long long n = std::stoll(a, &used);
    if (used != a.size()) throw std::invalid_argument(s);
    long long d = std::stoll(b, &used);
    if (used != b.size()) throw std::invalid_argument(s);
    return Rational(n, d);
  } catch (const std::logic_error&) {
    throw std::invalid_argument("malformed rational '" + s + "'");
  }
}

std::ostream& operator<<(std::ostream& os, const Rational& r) { return os << r.str(); }

}  // namespace thetalab
