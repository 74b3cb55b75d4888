#pragma once
// Theta series of Schwartz forms P * phi_0 over a lattice at a point of the Grassmannian.
#include <complex>
#include <string>
#include <vector>

#include "thetalab/fock.hpp"
#include "thetalab/fqm.hpp"
#include "thetalab/grassmann.hpp"

namespace thetalab {

struct ThetaKernel {
  std::string name;
  int p = 0, q = 0;
  FockForm fock;
  FockForm schrodinger;
  CompiledForm compiled;
  Rational weight;  // K'-weight r
  // v^{(p+q)/4 - r/2} in front of every lattice term
  double v_power() const { return (p + q) / 4.0 - weight.to_double() / 2.0; }
  const std::vector<FockForm::Wedge>& wedges() const { return compiled.wedges; }
};

// phi0, phikm, psi, ddcphi0 (= -dd^c phi_0, needs q = 2)
ThetaKernel make_kernel(const std::string& name, int p, int q);
ThetaKernel kernel_from_fock(const FockForm& f, const std::string& name);
std::string wedge_label(FockForm::Wedge w, int p, int q);  // "w(1,3)^w(2,3)", "1" for the empty word

struct ThetaOptions {
  double tol = 1e-8;
  int workers = 1;
  double radius = 0.0;       // > 0 forces the enumeration radius (no tail bound search)
  double radius_cap = 4000.0;
  bool zero_only = false;    // keep only lambda = 0 (v-power consistency check)
};

struct ThetaValue {
  std::vector<FockForm::Wedge> wedges;
  std::vector<std::vector<cplx>> components;  // [coset][wedge]
  double error_bound = 0.0;
  double radius = 0.0;
  size_t vector_count = 0;
  cplx at(size_t h, size_t w = 0) const { return components[h][w]; }
};

// Upper bound for the contribution of all lattice terms with (l,l)_z >= R,
// optionally for the termwise tau-bar derivative; includes the safety factor 10.
double theta_tail_bound(const ThetaKernel& k, const GrassmannPoint& z, double v, double R, bool derivative = false);
// Smallest radius whose tail bound is <= tol. Throws std::runtime_error above the cap.
double theta_radius(const ThetaKernel& k, const GrassmannPoint& z, double v, double tol, double cap = 4000.0,
                    bool derivative = false);

ThetaValue theta_eval(const ThetaKernel& k, const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                      const ThetaOptions& opt = {});

// max over components of |Theta(g tau) - phi(tau)^{2r} rho(g) Theta(tau)| / max(1, |Theta|), g in {S,T}
double modularity_residual(const ThetaKernel& k, const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                           char gen, const ThetaOptions& opt = {});

// q = 2: | L Theta(phi_KM) - Theta(-dd^c phi_0) |, L = -2 i v^2 d/dtau-bar applied termwise.
struct LoweringReport {
  double residual = 0.0;  // max component difference / max(1, |rhs|)
  double lhs_norm = 0.0;
  double error_bound = 0.0;
};
LoweringReport lowering_theta_check(const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                                    const ThetaOptions& opt = {});

// Sum of the contributions of one fixed lattice vector (symbolic termwise check of the lowering identity).
double lowering_single_term(const GrassmannPoint& z, const Eigen::VectorXd& lambda, cplx tau);

}  // namespace thetalab
