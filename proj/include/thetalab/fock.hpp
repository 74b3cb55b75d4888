#pragma once
// Polynomial Fock space tensored with the exterior algebra on p*, with exact coefficients.
#include <complex>
#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "thetalab/coeff.hpp"
#include "thetalab/rational.hpp"

namespace thetalab {

// Variables z_1..z_{p+q} are indexed 0..p+q-1. Generator omega_{alpha,mu}
// (1 <= alpha <= p < mu <= p+q) has bit (alpha-1)*q + (mu-p-1) in the wedge mask,
// so increasing bits are (alpha, mu)-lexicographic.
class FockForm {
 public:
  using Mono = std::uint64_t;  // 8 bits of exponent per variable
  using Wedge = std::uint32_t;
  using Key = std::pair<Mono, Wedge>;

  FockForm() = default;
  FockForm(int p, int q);

  int p() const { return p_; }
  int q() const { return q_; }
  int nvars() const { return p_ + q_; }
  int gen(int alpha, int mu) const;  // 1-based alpha, mu as in the math

  const std::map<Key, Coeff>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  size_t size() const { return terms_.size(); }
  void add(Mono m, Wedge w, const Coeff& c);

  FockForm operator+(const FockForm& o) const;
  FockForm operator-(const FockForm& o) const;
  FockForm operator*(const Coeff& c) const;
  bool operator==(const FockForm& o) const { return p_ == o.p_ && q_ == o.q_ && terms_ == o.terms_; }

  static int exponent(Mono m, int var) { return static_cast<int>((m >> (8 * var)) & 0xff); }
  static Mono bump(Mono m, int var, int delta);
  static Mono monomial(const std::vector<int>& exps);

  // K'-weight (p-q)/2 + deg_alpha - deg_mu; throws if not homogeneous
  Rational weight() const;
  std::string str() const;

 private:
  int p_ = 0, q_ = 0;
  std::map<Key, Coeff> terms_;
  void check_same(const FockForm& o) const;
};

// Elementary operators.
FockForm mul_z(const FockForm& f, int var);
FockForm d_z(const FockForm& f, int var);
FockForm op_A(const FockForm& f, int alpha, int mu);      // left wedge by omega_{alpha mu}
FockForm op_Astar(const FockForm& f, int alpha, int mu);  // contraction
FockForm op_X(const FockForm& f, int alpha, int mu);      // omega(X_{alpha mu})
FockForm op_L(const FockForm& f);
FockForm op_R(const FockForm& f);
FockForm op_d(const FockForm& f);
FockForm op_h(const FockForm& f);
FockForm op_del(const FockForm& f);     // q = 2
FockForm op_delbar(const FockForm& f);  // q = 2
FockForm op_dc(const FockForm& f);      // (del - delbar) / (4 pi i)
FockForm op_ddc(const FockForm& f);     // -(1/(2 pi i)) del delbar
// Dispatch by name: L R X d h A Astar del delbar dc ddc (alpha, mu used by X, A, Astar).
FockForm op_apply(const std::string& name, const FockForm& f, int alpha = 0, int mu = 0);

FockForm wedge(const FockForm& a, const FockForm& b);

FockForm build_phi0(int p, int q);
FockForm build_phi_KM(int p, int q);
FockForm build_psi(int p, int q);          // via h
FockForm build_psi_formula(int p, int q);  // first-row determinant expansion
FockForm build_euler(int p, int q);
FockForm build_kahler(int p);              // Omega = -e_2 for signature (p,2)

// Schroedinger picture: polynomial P in x_1..x_{p+q} (same container, x in place of z)
// with F <-> P * phi_0.
FockForm fock_to_schrodinger(const FockForm& f);

// Physicists' Hermite polynomial coefficients (ascending powers).
std::vector<mpz_class> hermite_coefficients(int n);
// (4 pi)^{-n/2} H_n(sqrt(2 pi) x) as a univariate polynomial with exact coefficients.
std::vector<Coeff> scaled_hermite(int n);

struct IdentityReport {
  std::string name;
  int p = 0, q = 0;
  bool pass = false;
  size_t diff_term_count = 0;
  FockForm diff;
};
IdentityReport verify_identity(const std::string& name, int p, int q);
const std::vector<std::string>& identity_names();

// Random K-invariant form: random rational combination of short words in
// L, R, d, h applied to phi_0, phi_KM and psi.
FockForm random_invariant_form(int p, int q, std::mt19937_64& rng, int max_word = 2);

// Floating evaluation of a Schroedinger polynomial.
struct CompiledForm {
  int nvars = 0;
  struct Term {
    std::vector<int> exps;
    FockForm::Wedge wedge;
    std::complex<double> c;
  };
  std::vector<Term> terms;
  std::vector<FockForm::Wedge> wedges;  // distinct wedge words, sorted
  int max_degree = 0;
};
CompiledForm compile(const FockForm& schrodinger);
// out[k] = component for wedges[k] evaluated at x
void evaluate(const CompiledForm& c, const double* x, std::complex<double>* out);

}  // namespace thetalab
