#include "thetalab/grassmann.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

namespace thetalab {

namespace {

Eigen::MatrixXd to_double(const IntMatrix& m) {
  const int n = static_cast<int>(m.size());
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j) = static_cast<double>(m[i][j]);
  return out;
}

Eigen::VectorXd signature_diag(int p, int q) {
  Eigen::VectorXd j(p + q);
  for (int i = 0; i < p + q; ++i) j(i) = i < p ? 1.0 : -1.0;
  return j;
}

}  // namespace

double GrassmannPoint::negative_length(const Eigen::VectorXd& y) const {
  Eigen::VectorXd x = coord * y;
  double s = 0.0;
  for (int i = p; i < p + q; ++i) s += x(i) * x(i);
  return std::sqrt(s);
}

Eigen::MatrixXd base_frame(const Lattice& lat) {
  const int n = lat.rank();
  if (n == 0) return Eigen::MatrixXd(0, 0);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(to_double(lat.gram));
  const Eigen::VectorXd& ev = es.eigenvalues();  // ascending
  Eigen::MatrixXd f(n, n);
  int col = 0;
  for (int i = n - 1; i >= 0; --i)
    if (ev(i) > 0) f.col(col++) = es.eigenvectors().col(i) / std::sqrt(ev(i));
  for (int i = 0; i < n; ++i)
    if (ev(i) < 0) f.col(col++) = es.eigenvectors().col(i) / std::sqrt(-ev(i));
  return f;
}

GrassmannPoint grassmann_from_frame(const Lattice& lat, const Eigen::MatrixXd& frame, double tol) {
  GrassmannPoint z;
  z.gram_int = lat.gram;
  z.gram = to_double(lat.gram);
  z.p = lat.p;
  z.q = lat.q;
  const int n = lat.rank();
  if (frame.rows() != n || frame.cols() != n) throw std::invalid_argument("frame has wrong shape");
  z.frame = frame;
  Eigen::VectorXd j = signature_diag(z.p, z.q);
  Eigen::MatrixXd gram_f = frame.transpose() * z.gram * frame;
  Eigen::MatrixXd target = j.asDiagonal();
  z.frame_residual = n ? (gram_f - target).cwiseAbs().maxCoeff() : 0.0;
  double scale = n ? std::max(1.0, frame.cwiseAbs().maxCoeff() * frame.cwiseAbs().maxCoeff()) : 1.0;
  if (z.frame_residual > tol * scale) throw std::invalid_argument("frame is not orthonormal for the gram matrix");
  z.coord = j.asDiagonal() * frame.transpose() * z.gram;
  z.majorant = z.coord.transpose() * z.coord;
  return z;
}

GrassmannPoint grassmann_from_group(const Lattice& lat, const Eigen::MatrixXd& g, double tol) {
  const int n = lat.rank();
  if (g.rows() != n || g.cols() != n) throw std::invalid_argument("group element has wrong shape");
  Eigen::MatrixXd gram = to_double(lat.gram);
  double res = n ? (g.transpose() * gram * g - gram).cwiseAbs().maxCoeff() : 0.0;
  if (res > tol) throw std::invalid_argument("not an isometry of the gram matrix");
  GrassmannPoint z = grassmann_from_frame(lat, g * base_frame(lat), 1e-8);
  return z;
}

Lattice lattice_UU() {
  return make_lattice({{0, 1, 0, 0}, {1, 0, 0, 0}, {0, 0, 0, 1}, {0, 0, 1, 0}}, "U+U");
}

GrassmannPoint grassmann_from_h2(const Lattice& lat, std::complex<double> z1, std::complex<double> z2) {
  if (lat.gram != lattice_UU().gram) throw std::invalid_argument("H x H coordinates need the U+U gram matrix");
  if (!(z1.imag() > 0) || !(z2.imag() > 0)) throw std::invalid_argument("points must lie in the upper half plane");
  using C = std::complex<double>;
  const double y1 = z1.imag(), y2 = z2.imag();
  Eigen::Vector4cd w(z1 * z2, C(1, 0), z1, -z2);
  Eigen::MatrixXd gram = to_double(lat.gram);
  const double s = std::sqrt(2.0 * y1 * y2);
  Eigen::MatrixXd f(4, 4);
  f.col(2) = w.real() / s;
  f.col(3) = w.imag() / s;
  auto bil = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(gram * b); };
  int col = 0;
  for (int e = 0; e < 4 && col < 2; ++e) {
    Eigen::VectorXd v = Eigen::VectorXd::Unit(4, e);
    for (int m = 2; m < 4; ++m) v += bil(v, f.col(m)) * f.col(m);
    for (int a = 0; a < col; ++a) v -= bil(v, f.col(a)) * f.col(a);
    double nv = bil(v, v);
    if (nv < 1e-6) continue;
    f.col(col++) = v / std::sqrt(nv);
  }
  GrassmannPoint z = grassmann_from_frame(lat, f, 1e-8);
  z.ill_conditioned = std::min(y1, y2) < 1e-6 || std::max(y1, y2) > 1e6;
  return z;
}

namespace {

// N(l) = [[l1, -l3], [l4, l2]]; det N = q(l)
IntMatrix from_N_action(const std::function<std::array<long, 4>(const std::array<long, 4>&)>& act) {
  IntMatrix s(4, std::vector<long long>(4, 0));
  for (int i = 0; i < 4; ++i) {
    long l[4] = {0, 0, 0, 0};
    l[i] = 1;
    std::array<long, 4> n{l[0], -l[2], l[3], l[1]};
    std::array<long, 4> m = act(n);
    long out[4] = {m[0], m[3], -m[1], m[2]};
    for (int r = 0; r < 4; ++r) s[r][i] = out[r];
  }
  return s;
}

std::array<long, 4> mul2(const std::array<long, 4>& a, const std::array<long, 4>& b) {
  return {a[0] * b[0] + a[1] * b[2], a[0] * b[1] + a[1] * b[3], a[2] * b[0] + a[3] * b[2],
          a[2] * b[1] + a[3] * b[3]};
}

}  // namespace

IntMatrix h2_isometry_z1(long a, long b, long c, long d) {
  if (a * d - b * c != 1) throw std::invalid_argument("matrix not in SL2(Z)");
  std::array<long, 4> left{d, b, c, a};
  return from_N_action([&](const std::array<long, 4>& n) { return mul2(left, n); });
}

IntMatrix h2_isometry_z2(long a, long b, long c, long d) {
  if (a * d - b * c != 1) throw std::invalid_argument("matrix not in SL2(Z)");
  std::array<long, 4> right{d, c, b, a};
  return from_N_action([&](const std::array<long, 4>& n) { return mul2(n, right); });
}

IntMatrix h2_swap() {
  return from_N_action([](const std::array<long, 4>& n) { return std::array<long, 4>{n[0], n[2], n[1], n[3]}; });
}

GrassmannPoint flow(const GrassmannPoint& z, int alpha, int mu, double t) {
  if (alpha < 1 || alpha > z.p || mu <= z.p || mu > z.p + z.q) throw std::invalid_argument("flow indices out of range");
  const int n = z.rank();
  Eigen::MatrixXd e = Eigen::MatrixXd::Identity(n, n);
  const int a = alpha - 1, m = mu - 1;
  e(a, a) = e(m, m) = std::cosh(t);
  e(a, m) = e(m, a) = std::sinh(t);
  Lattice lat{z.gram_int, z.p, z.q, ""};
  GrassmannPoint out = grassmann_from_frame(lat, z.frame * e, 1e-7);
  out.ill_conditioned = z.ill_conditioned;
  return out;
}

GrassmannPoint flow2(const GrassmannPoint& z, int a1, int m1, double s, int a2, int m2, double t) {
  return flow(flow(z, a1, m1, s), a2, m2, t);
}

// Strict: vectors on the boundary sphere (up to rounding) are excluded.
std::vector<LatticeVector> enumerate(const DiscriminantForm& disc, size_t h, const GrassmannPoint& z, double R) {
  std::vector<LatticeVector> out;
  const int n = z.rank();
  if (!(R > 0)) throw std::invalid_argument("enumeration radius must be positive");
  std::vector<Rational> rep = disc.representative(h);
  Eigen::VectorXd c(n);
  for (int i = 0; i < n; ++i) c(i) = rep[i].to_double();
  const double level = static_cast<double>(disc.level());
  if (n == 0) {
    out.push_back({{}, Eigen::VectorXd(0), 0.0, 0.0, 0});
    return out;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(z.majorant);
  Eigen::MatrixXd r = llt.matrixU();
  Eigen::VectorXd y = c;
  std::vector<long long> k(n, 0);
  const double pad = 1e-9 * (1.0 + R);

  std::function<void(int, double)> rec = [&](int i, double rem) {
    double s = 0.0;
    for (int j = i + 1; j < n; ++j) s += r(i, j) * y(j);
    double w = std::sqrt(std::max(rem, 0.0) + pad);
    double lo = (-s - w) / r(i, i) - c(i), hi = (-s + w) / r(i, i) - c(i);
    for (long long kk = static_cast<long long>(std::ceil(lo)); kk <= static_cast<long long>(std::floor(hi)); ++kk) {
      k[i] = kk;
      y(i) = c(i) + static_cast<double>(kk);
      double t = r(i, i) * y(i) + s;
      double rem2 = rem - t * t;
      if (i == 0) {
        double m = z.majorant_norm(y);
        if (m < R * (1.0 - 1e-12)) {
          double nr = y.dot(z.gram * y);
          out.push_back({k, y, m, nr, std::llround(nr * level)});
        }
      } else {
        rec(i - 1, rem2);
      }
    }
    y(i) = c(i);
    k[i] = 0;
  };
  rec(n - 1, R);
  return out;
}

}  // namespace thetalab
