#pragma once
// Exact scalars: finite Q-combinations of pi^{a/2} * sqrt(2)^b * i^c, b,c in {0,1}.
#include <gmpxx.h>

#include <complex>
#include <map>
#include <string>
#include <tuple>

namespace thetalab {

class Coeff {
 public:
  struct Key {
    int half_pi = 0;  // exponent of pi in half units
    int sqrt2 = 0;    // 0 or 1
    int imag = 0;     // 0 or 1
    bool operator<(const Key& o) const {
      return std::tie(half_pi, sqrt2, imag) < std::tie(o.half_pi, o.sqrt2, o.imag);
    }
    bool operator==(const Key& o) const = default;
  };

  Coeff() = default;
  Coeff(long v);  // NOLINT
  Coeff(const mpq_class& v);  // NOLINT
  // sqrt2 and imag are bits
  static Coeff term(const mpq_class& r, int half_pi = 0, int sqrt2 = 0, int imag = 0);
  static Coeff pi_pow(int e) { return term(1, 2 * e); }
  static Coeff sqrt_pi_pow(int e) { return term(1, e); }
  static Coeff sqrt2() { return term(1, 0, 1); }
  static Coeff I() { return term(1, 0, 0, 1); }

  bool is_zero() const { return terms_.empty(); }
  const std::map<Key, mpq_class>& terms() const { return terms_; }

  Coeff operator+(const Coeff& o) const;
  Coeff operator-(const Coeff& o) const;
  Coeff operator-() const;
  Coeff operator*(const Coeff& o) const;
  Coeff& operator+=(const Coeff& o);
  Coeff& operator*=(const Coeff& o) { return *this = *this * o; }
  bool operator==(const Coeff& o) const { return terms_ == o.terms_; }
  Coeff conj() const;

  std::complex<double> to_complex() const;
  std::string str() const;

 private:
  std::map<Key, mpq_class> terms_;
  void add_term(Key k, const mpq_class& r);
};

}  // namespace thetalab
