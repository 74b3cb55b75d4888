#pragma once
// Regularized theta lifts of weak Maass forms and their geometric checks.
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "thetalab/grassmann.hpp"
#include "thetalab/qseries.hpp"
#include "thetalab/theta.hpp"

namespace thetalab {

struct LiftOptions {
  double tol = 1e-6;
  double eps_min = 1e-4;  // minimal |lambda_z| for lambda defining Z(f)
  int workers = 1;
  int nodes = 12;         // Gauss-Legendre nodes per panel
  int max_level = 5;
  double fd_step = 1e-3;
};

struct LiftValue {
  bool is_form = false;
  int p = 0, q = 0;
  std::vector<FockForm::Wedge> wedges;
  std::vector<cplx> components;  // one entry for the scalar kind
  double error = 0.0;
  double regularization_constant = 0.0;  // integral of v^a dmu over F1, multiplies a+(0,0) P(0)
  double compact_part = 0.0;             // first component, F1 piece
  int quadrature_level = 0;
  double radius = 0.0;
  size_t vector_count = 0;
  double value() const { return components.empty() ? 0.0 : components[0].real(); }
  cplx get(FockForm::Wedge w) const;
};

struct SingularEntry {
  size_t h = 0;
  Rational n;
  std::vector<double> lambda;
  double q_z = 0.0;   // |q(lambda_z)|
  double dist = 0.0;  // |lambda_z|
};
struct SingularLocusReport {
  double eps = 0.0;
  std::vector<SingularEntry> entries;
  bool empty() const { return entries.empty(); }
};
class SingularLocusError : public std::runtime_error {
 public:
  explicit SingularLocusError(SingularLocusReport r);
  SingularLocusReport report;
};

// All lambda with a+(h, -q(lambda)) != 0, q(lambda) > 0 and |q(lambda_z)| < eps.
SingularLocusReport singular_set(const WeakMaassForm& f, const GrassmannPoint& z, double eps);

// Frozen lattice vectors and quadrature level; makes the lift a smooth function of z near the center.
struct LiftPlan {
  std::vector<size_t> coset;
  std::vector<Eigen::VectorXd> vectors;
  double radius = 0.0;
  int level = 0;
  double quad_error = 0.0;
};
LiftPlan make_lift_plan(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt,
                        double margin = 0.0);

// Throws SingularLocusError near Z(f), std::invalid_argument on bad input.
LiftValue lift_eval(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt,
                    const LiftPlan* plan = nullptr);
LiftValue lift_phi0(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt = {});
LiftValue lift_psi(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt = {});

// int_1^inf v^{s-1} e^{-A v} dv = A^{-s} Gamma(s, A)
double vint_closed(double s, double A);
// same integral: Gauss-Legendre on [1, vmax] plus an asymptotic tail estimate
double vint_numeric(double s, double A, double vmax = 40.0);

// Real form components over wedge words of w(alpha,mu) in the frame of z.
struct FormValue {
  int p = 0, q = 0;
  std::vector<FockForm::Wedge> wedges;
  std::vector<double> components;
  double error = 0.0;
  double get(FockForm::Wedge w) const;
  double max_abs() const;
};
FormValue to_form(const LiftValue& v);
FormValue form_difference(const FormValue& a, const FormValue& b);
// 1-form d^c Phi from the gradient X_{alpha mu} Phi (q = 2)
FormValue dc_from_gradient(int p, const std::vector<double>& grad);
FormValue kahler_form(int p);  // Omega = -e_2 in the frame

// central differences with Richardson extrapolation; all evaluations share one plan
FormValue lift_dc(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt = {});
FormValue lambda_B(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt = {});
FormValue lift_psi_d(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt = {});

struct JumpReport {
  double measured = 0.0;        // extrapolated Phi(+0) - Phi(-0)
  double measured_raw = 0.0;    // Phi(delta) - Phi(-delta)
  double measured_double = 0.0; // extrapolation with 2 delta
  double predicted = 0.0;       // signed, relative to the path orientation
  double relative_error = 0.0;  // | |measured| - |predicted| | / |predicted|
  double left = 0.0, right = 0.0;
  size_t wall_vectors = 0;
};
// q = 1: path t -> flow(z_wall, alpha, p+1, t) crossing the wall of lambda at t = 0.
JumpReport jump_check(const WeakMaassForm& f, const GrassmannPoint& z_wall, const Eigen::VectorXd& lambda, int alpha,
                      double delta, const LiftOptions& opt = {});
// Point on the wall of lambda (lambda_z = 0) with f_1 along lambda; seed picks the negative direction.
GrassmannPoint wall_point(const Lattice& lat, const Eigen::VectorXd& lambda, unsigned seed = 1);

struct LogSingularityReport {
  std::vector<double> t, value, dist, corrected;
  double variation = 0.0;
  bool bounded = false;
};
LogSingularityReport log_singularity_check(const WeakMaassForm& f, const std::function<GrassmannPoint(double)>& path,
                                           const Eigen::VectorXd& lambda, int multiplicity, double tmin, double tmax,
                                           int steps, const LiftOptions& opt = {}, double bound = 0.5);

// Klein j after reduction to the standard fundamental domain.
cplx klein_j(cplx z);

}  // namespace thetalab
