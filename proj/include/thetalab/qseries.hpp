#pragma once
// Vector-valued q-series and weak Maass forms as coefficient tables.
#include <gmpxx.h>

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "thetalab/fqm.hpp"
#include "thetalab/laurent.hpp"
#include "thetalab/rational.hpp"

namespace thetalab {

enum class FormClass { weakly_holomorphic, H_plus, H_general };
std::string to_string(FormClass c);
FormClass form_class_from_string(const std::string& s);

struct CoeffIndex {
  size_t h;
  Rational n;
  bool operator<(const CoeffIndex& o) const { return h != o.h ? h < o.h : n < o.n; }
  bool operator==(const CoeffIndex& o) const { return h == o.h && n == o.n; }
};
using CoeffTable = std::map<CoeffIndex, cplx>;

// n - q(h) in Z for rho_L, n + q(h) in Z for the dual.
bool index_compatible(const WeilRep& rep, size_t h, const Rational& n);

struct VVSeries {
  Rational weight;
  WeilRep rep;
  CoeffTable coeffs;
  Rational prec;  // coefficients known for n < prec

  void set(size_t h, const Rational& n, cplx c);  // validates the index
  cplx get(size_t h, const Rational& n) const;
  std::vector<cplx> eval(cplx tau) const;
  void validate() const;
};

struct WeakMaassForm {
  Rational weight;
  WeilRep rep;
  CoeffTable plus, minus;
  FormClass cls = FormClass::weakly_holomorphic;
  Rational prec;

  void validate() const;
  std::vector<cplx> eval_plus(cplx tau) const;
  std::vector<cplx> eval_minus(cplx tau) const;
  std::vector<cplx> eval(cplx tau) const;
  // a+(-h,n) = sign * a+(h,n) on every stored index
  bool has_plus_symmetry(int sign) const;
};

// Scalar form on the trivial group, tagged with a signature (p,q), p-q = 0 mod 8.
VVSeries scalar_to_vv(const LaurentSeries& s, const Rational& weight, int p = 0, int q = 0);
VVSeries classic_series(const std::string& name, int prec);
WeakMaassForm weakly_holomorphic(const VVSeries& s);

VVSeries xi_map(const WeakMaassForm& f);
VVSeries principal_part(const WeakMaassForm& f);

cplx pairing(const VVSeries& g, const WeakMaassForm& f);
cplx pairing_prime(const VVSeries& g, const WeakMaassForm& f);
// exact scalar version: sum_{n<=0} a(n) b(-n)
mpq_class pairing_exact(const LaurentSeries& g, const LaurentSeries& f);

// f with xi(f) = g built from the inverted coefficient formula; f.plus left empty.
WeakMaassForm xi_preimage_witness(const VVSeries& g, const Rational& k);
// max over stored n<0 of |a-(h,n)| |n|^{-k/2}
double hecke_ratio(const WeakMaassForm& f);

// Scalar input for induction: q^{offset} * series, weight, multiplier on S and T
// given as exp(2 pi i * phase).
struct ScalarForm {
  LaurentSeries series;
  Rational offset;
  Rational weight;
  Rational chi_S, chi_T;
};
// eta^r * E4^a * E6^b * Delta^c with its multiplier
ScalarForm eta_quotient_form(int r, int a, int b, int c, int prec);
std::vector<cplx> eval_scalar(const ScalarForm& s, cplx tau);

// Projects seed e_h0 onto the subspace where W acts by the scalar multiplier; this is
// the coset average over the image of the metaplectic group. Throws if that subspace
// misses the seed or if the result fails a numeric modularity check.
VVSeries induce_from_scalar(const ScalarForm& f, const WeilRep& w, size_t h0);

// max-norm residual of F(g tau) - phi(tau)^{2k} rho(g) F(tau) for g = S or T.
double series_modularity_residual(const VVSeries& F, cplx tau, char gen);

}  // namespace thetalab
