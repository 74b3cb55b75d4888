#pragma once
// Even lattices, their discriminant forms L#/L and the Weil representation.
#include <Eigen/Dense>
#include <array>
#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "thetalab/rational.hpp"

namespace thetalab {

using IntMatrix = std::vector<std::vector<long long>>;
using CMatrix = Eigen::MatrixXcd;
using cplx = std::complex<double>;

struct Lattice {
  IntMatrix gram;
  int p = 0;  // positive eigenvalues
  int q = 0;  // negative eigenvalues
  std::string name;
  int rank() const { return static_cast<int>(gram.size()); }
};

// Validates and computes the signature. Throws std::invalid_argument.
Lattice make_lattice(const IntMatrix& gram, const std::string& name = "");
long long exact_determinant(const IntMatrix& m);
IntMatrix direct_sum(const IntMatrix& a, const IntMatrix& b);

// Smith form U*A*V = diag(d), d_i | d_{i+1}, U and V unimodular.
struct SmithForm {
  IntMatrix U, V;
  std::vector<long long> d;
};
SmithForm smith_normal_form(const IntMatrix& a);

// exp(2 pi i r) evaluated from the reduced fraction.
cplx unit_phase(const Rational& r);

class DiscriminantForm {
 public:
  explicit DiscriminantForm(const Lattice& lat);

  const Lattice& lattice() const { return lat_; }
  const std::vector<long long>& invariants() const { return inv_; }
  size_t order() const { return order_; }
  long long level() const { return level_; }

  std::vector<long long> residues(size_t idx) const;
  size_t index(const std::vector<long long>& residues) const;
  size_t neg(size_t idx) const;
  size_t add(size_t a, size_t b) const;

  Rational q(size_t idx) const;             // in [0,1)
  Rational b(size_t a, size_t b) const;     // in [0,1)
  std::vector<Rational> representative(size_t idx) const;  // in L#, lattice basis
  size_t coset_of(const std::vector<Rational>& dual_vec) const;
  size_t coset_of_integral(const std::vector<long long>& gram_times_vec) const;

  static constexpr size_t kEagerLimit = 1000000;

 private:
  Lattice lat_;
  SmithForm snf_;
  std::vector<int> pos_;        // Smith positions with d_i > 1
  std::vector<long long> inv_;  // the d_i > 1
  size_t order_ = 1;
  long long level_ = 1;
  std::vector<Rational> qcache_;
  Rational quad_of(const std::vector<long long>& r) const;
  Rational bil_of(const std::vector<long long>& r, const std::vector<long long>& s) const;
  std::vector<std::vector<Rational>> ginv_;  // exact inverse gram
};

struct WeilRep {
  std::shared_ptr<const DiscriminantForm> disc;
  int p = 0, q = 0;
  bool dual = false;
  int sig_mod8() const { return (((p - q) % 8) + 8) % 8; }
  size_t dim() const { return disc->order(); }
  WeilRep dual_rep() const { return WeilRep{disc, p, q, !dual}; }
  bool same_module(const WeilRep& o) const;
};

WeilRep make_weil_rep(const Lattice& lat, bool dual = false);
// Trivial group with a signature tag; requires p-q = 0 mod 8.
WeilRep trivial_weil_rep(int p, int q);

CMatrix weil_generator(const WeilRep& w, char gen);  // 'S' or 'T'

// Metaplectic group elements.
enum class Letter { S, T, Sinv, Tinv };
struct MetaplecticWord {
  std::vector<Letter> letters;
  std::string str() const;
  static MetaplecticWord parse(const std::string& s);  // chars S,T,s,t (lowercase = inverse)
};
// (matrix, branch): the multiplier is (-1)^branch times the principal sqrt(c tau + d).
struct MpElement {
  std::array<long long, 4> m{1, 0, 0, 1};  // a b c d
  int branch = 0;
  cplx multiplier(cplx tau) const;
  cplx act(cplx tau) const;
};
MpElement mp_multiply(const MpElement& x, const MpElement& y);
MpElement word_element(const MetaplecticWord& w);
MetaplecticWord canonical_word(const MpElement& e);  // throws if det != 1

CMatrix weil_element(const WeilRep& w, const MetaplecticWord& word);
CMatrix weil_element(const WeilRep& w, const MpElement& e);

}  // namespace thetalab
