#pragma once
// Exact rational Laurent series in q with explicit precision.
#include <gmpxx.h>

#include <string>
#include <vector>

namespace thetalab {

class LaurentSeries {
 public:
  LaurentSeries() = default;
  // coefficients c[i] belong to q^{val+i}; known for exponents < prec
  LaurentSeries(int val, std::vector<mpq_class> c, int prec);
  static LaurentSeries monomial(int exp, const mpq_class& c, int prec);

  int valuation() const { return val_; }
  int precision() const { return prec_; }
  mpq_class coeff(int n) const;  // throws beyond precision
  int leading_exponent() const;  // first nonzero, or prec if none

  LaurentSeries operator+(const LaurentSeries& o) const;
  LaurentSeries operator-(const LaurentSeries& o) const;
  LaurentSeries operator*(const LaurentSeries& o) const;
  LaurentSeries operator*(const mpq_class& s) const;
  LaurentSeries inverse() const;
  LaurentSeries pow(int e) const;
  LaurentSeries truncate(int prec) const;

  std::string str(int max_terms = 8) const;

 private:
  int val_ = 0;
  std::vector<mpq_class> c_;
  int prec_ = 0;
  void normalize();
};

LaurentSeries eisenstein_series(int k, int prec);  // k in {4, 6}, constant term 1
LaurentSeries delta_series(int prec);              // (E4^3 - E6^2) / 1728
LaurentSeries j_series(int prec);                  // E4^3 / Delta
// prod_{n>=1} (1 - q^n)^e; eta^e = q^{e/24} times this
LaurentSeries euler_product_power(int e, int prec);
// Named classical series; throws std::invalid_argument on unknown names.
LaurentSeries classic_laurent(const std::string& name, int prec);
// weight of a named classical series
int classic_weight(const std::string& name);

}  // namespace thetalab
