#pragma once
// Real special functions used by the weak Maass model and the lift.
#include <vector>

namespace thetalab {

// Upper incomplete gamma Gamma(a, x) for x > 0 and any real a.
double upper_gamma(double a, double x);
// e^x * Gamma(a, x); avoids underflow for large x.
double upper_gamma_escaled(double a, double x);
// Exponential integral E1(x) = Gamma(0, x), x > 0.
double expint_e1(double x);

// H(w) = e^{-w} * int_{-2w}^inf e^{-t} t^{-k} dt, continued in k.
// w < 0: any k. w > 0: only integer k <= 0 (finite sum). w == 0 throws.
double H_function(double k, double w);

struct QuadRule {
  std::vector<double> x, w;  // on [-1, 1]
};
// Gauss-Legendre rule with n nodes (cached, thread safe).
const QuadRule& gauss_legendre(int n);

}  // namespace thetalab
