#include "thetalab/coeff.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace thetalab {

Coeff::Coeff(long v) {
  if (v != 0) terms_[Key{}] = v;
}

Coeff::Coeff(const mpq_class& v) {
  if (v != 0) terms_[Key{}] = v;
}

Coeff Coeff::term(const mpq_class& r, int half_pi, int sqrt2, int imag) {
  Coeff c;
  c.add_term(Key{half_pi, sqrt2 & 1, imag & 1}, r);
  return c;
}

void Coeff::add_term(Key k, const mpq_class& r) {
  if (r == 0) return;
  auto [it, fresh] = terms_.emplace(k, r);
  if (!fresh) {
    it->second += r;
    if (it->second == 0) terms_.erase(it);
  }
}

Coeff Coeff::operator+(const Coeff& o) const {
  Coeff out = *this;
  out += o;
  return out;
}

Coeff& Coeff::operator+=(const Coeff& o) {
  for (const auto& [k, r] : o.terms_) add_term(k, r);
  return *this;
}

Coeff Coeff::operator-() const {
  Coeff out = *this;
  for (auto& [k, r] : out.terms_) r = -r;
  return out;
}

Coeff Coeff::operator-(const Coeff& o) const { return *this + (-o); }

Coeff Coeff::operator*(const Coeff& o) const {
  Coeff out;
  for (const auto& [ka, ra] : terms_)
    for (const auto& [kb, rb] : o.terms_) {
      mpq_class r = ra * rb;
      Key k{ka.half_pi + kb.half_pi, ka.sqrt2 + kb.sqrt2, ka.imag + kb.imag};
      if (k.sqrt2 == 2) {
        k.sqrt2 = 0;
        r *= 2;
      }
      if (k.imag == 2) {
        k.imag = 0;
        r = -r;
      }
      out.add_term(k, r);
    }
  return out;
}

Coeff Coeff::conj() const {
  Coeff out;
  for (const auto& [k, r] : terms_) out.add_term(k, k.imag ? mpq_class(-r) : r);
  return out;
}

std::complex<double> Coeff::to_complex() const {
  std::complex<double> acc = 0.0;
  for (const auto& [k, r] : terms_) {
    double v = r.get_d() * std::pow(std::numbers::pi, 0.5 * k.half_pi);
    if (k.sqrt2) v *= std::numbers::sqrt2;
    acc += k.imag ? std::complex<double>(0.0, v) : std::complex<double>(v, 0.0);
  }
  return acc;
}

std::string Coeff::str() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [k, r] : terms_) {
    if (!first) os << " + ";
    first = false;
    os << r.get_str();
    if (k.sqrt2) os << "*sqrt2";
    if (k.imag) os << "*i";
    if (k.half_pi) os << "*pi^(" << k.half_pi << "/2)";
  }
  return os.str();
}

}  // namespace thetalab
