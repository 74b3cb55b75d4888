#pragma once
// Points of the Grassmannian of negative q-planes, given by an orthonormal frame.
#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "thetalab/fqm.hpp"

namespace thetalab {

struct GrassmannPoint {
  IntMatrix gram_int;
  Eigen::MatrixXd gram;
  int p = 0, q = 0;
  // columns f_1..f_{p+q} in lattice coordinates; F^T G F = diag(1,..,1,-1,..,-1); f_{p+1..} span z
  Eigen::MatrixXd frame;
  Eigen::MatrixXd coord;     // x = coord * y: frame coordinates of a lattice-coordinate vector y
  Eigen::MatrixXd majorant;  // coord^T coord
  double frame_residual = 0.0;
  bool ill_conditioned = false;  // set near the boundary of the upper half planes

  int rank() const { return p + q; }
  Eigen::VectorXd coordinates(const Eigen::VectorXd& y) const { return coord * y; }
  double majorant_norm(const Eigen::VectorXd& y) const { return y.dot(majorant * y); }
  // |(y_z, y_z)|^{1/2}: length of the projection to the negative plane
  double negative_length(const Eigen::VectorXd& y) const;
};

// Orthonormal frame of the quadratic space attached to the gram matrix (positive directions first).
Eigen::MatrixXd base_frame(const Lattice& lat);

GrassmannPoint grassmann_from_frame(const Lattice& lat, const Eigen::MatrixXd& frame, double tol = 1e-10);
// g is a real isometry (g^T G g = G) in lattice coordinates; the point is g z_0.
GrassmannPoint grassmann_from_group(const Lattice& lat, const Eigen::MatrixXd& g, double tol = 1e-10);

// U + U with gram blockdiag([[0,1],[1,0]], [[0,1],[1,0]]).
Lattice lattice_UU();
// Point attached to (z1, z2) in H x H.
GrassmannPoint grassmann_from_h2(const Lattice& lat, std::complex<double> z1, std::complex<double> z2);
// Integer isometry s with plane(gamma z1, z2) = s^{-1}-image... returns the matrix A such that
// majorant at (gamma z1, z2) equals A^T M A where M is the majorant at (z1, z2).
IntMatrix h2_isometry_z1(long a, long b, long c, long d);
IntMatrix h2_isometry_z2(long a, long b, long c, long d);
// swap z1 <-> z2
IntMatrix h2_swap();

// Flow z -> g exp(t X_{alpha mu}) z_0 (1-based alpha <= p < mu <= p+q).
GrassmannPoint flow(const GrassmannPoint& z, int alpha, int mu, double t);
// Composite flow exp(s X_a) exp(t X_b) applied on the right.
GrassmannPoint flow2(const GrassmannPoint& z, int a1, int m1, double s, int a2, int m2, double t);

struct LatticeVector {
  std::vector<long long> k;  // integer part: y = rep_h + k
  Eigen::VectorXd y;         // lattice coordinates
  double majorant;           // (y,y)_z
  double norm;               // (y,y)
  long long norm_key;        // round(norm * level)
};

// All y in L + h with (y,y)_z < R (strict).
std::vector<LatticeVector> enumerate(const DiscriminantForm& disc, size_t h, const GrassmannPoint& z, double R);

}  // namespace thetalab
