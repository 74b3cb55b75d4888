#pragma once
// Small exact rationals on 64-bit integers with overflow detection.
// Used for q-values, Fourier indices and weights; big coefficient
// arithmetic goes through GMP instead.
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>

namespace thetalab {

class Rational {
 public:
  Rational() = default;
  Rational(long long n) : num_(n), den_(1) {}  // NOLINT implicit by design
  Rational(long long n, long long d);

  long long num() const { return num_; }
  long long den() const { return den_; }

  Rational operator-() const;
  Rational operator+(const Rational& o) const;
  Rational operator-(const Rational& o) const;
  Rational operator*(const Rational& o) const;
  Rational operator/(const Rational& o) const;
  Rational& operator+=(const Rational& o) { return *this = *this + o; }
  Rational& operator-=(const Rational& o) { return *this = *this - o; }
  Rational& operator*=(const Rational& o) { return *this = *this * o; }

  bool operator==(const Rational& o) const { return num_ == o.num_ && den_ == o.den_; }
  bool operator!=(const Rational& o) const { return !(*this == o); }
  bool operator<(const Rational& o) const;
  bool operator<=(const Rational& o) const { return !(o < *this); }
  bool operator>(const Rational& o) const { return o < *this; }
  bool operator>=(const Rational& o) const { return !(*this < o); }

  bool is_integer() const { return den_ == 1; }
  long long floor() const;
  Rational frac() const { return *this - Rational(floor()); }  // in [0,1)
  double to_double() const { return static_cast<double>(num_) / static_cast<double>(den_); }

  std::string str() const;                   // "a/b", always with denominator
  static Rational parse(const std::string&); // accepts "a/b" or "a"

 private:
  long long num_ = 0;
  long long den_ = 1;
};

std::ostream& operator<<(std::ostream&, const Rational&);

long long gcd_ll(long long a, long long b);
long long lcm_ll(long long a, long long b);

}  // namespace thetalab

template <>
struct std::hash<thetalab::Rational> {
  size_t operator()(const thetalab::Rational& r) const noexcept {
    return std::hash<long long>()(r.num()) * 1000003u ^ std::hash<long long>()(r.den());
  }
};
