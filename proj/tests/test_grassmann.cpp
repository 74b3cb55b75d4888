#include "doctest.h"

#include <random>
#include <set>

#include "thetalab/grassmann.hpp"

using namespace thetalab;

namespace {

Eigen::MatrixXd to_d(const IntMatrix& m) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(m.size()), static_cast<Eigen::Index>(m.size()));
  for (size_t i = 0; i < m.size(); ++i)
    for (size_t j = 0; j < m.size(); ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = static_cast<double>(m[i][j]);
  return out;
}

std::complex<double> mobius(long a, long b, long c, long d, std::complex<double> z) {
  return (static_cast<double>(a) * z + static_cast<double>(b)) / (static_cast<double>(c) * z + static_cast<double>(d));
}

}  // namespace

TEST_CASE("base frame and points are orthonormal") {
  for (IntMatrix g : {IntMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, -2}}, lattice_UU().gram,
                      IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 4}}, IntMatrix{{2, -1, 0}, {-1, 2, 0}, {0, 0, -4}}}) {
    Lattice lat = make_lattice(g);
    Eigen::MatrixXd F = base_frame(lat);
    Eigen::MatrixXd J = Eigen::MatrixXd::Identity(lat.rank(), lat.rank());
    for (int i = lat.p; i < lat.rank(); ++i) J(i, i) = -1;
    CHECK((F.transpose() * to_d(g) * F - J).cwiseAbs().maxCoeff() < 1e-12);
    GrassmannPoint z = grassmann_from_frame(lat, F);
    // majorant is positive definite and (y,y) = |y+|^2 - |y-|^2
    Eigen::LLT<Eigen::MatrixXd> llt(z.majorant);
    CHECK(llt.info() == Eigen::Success);
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(lat.rank(), 0.3, 1.7);
    Eigen::VectorXd x = z.coordinates(y);
    double pos = 0, neg = 0;
    for (int i = 0; i < lat.p; ++i) pos += x(i) * x(i);
    for (int i = lat.p; i < lat.rank(); ++i) neg += x(i) * x(i);
    CHECK(std::abs(pos - neg - y.dot(to_d(g) * y)) < 1e-12);
    CHECK(std::abs(pos + neg - z.majorant_norm(y)) < 1e-12);
    CHECK(std::abs(std::sqrt(neg) - z.negative_length(y)) < 1e-12);
  }
}

TEST_CASE("non-isometries and bad frames are rejected") {
  Lattice U = lattice_UU();
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(4, 4) * 1.1;
  CHECK_THROWS_AS(grassmann_from_group(U, g), std::invalid_argument);
  CHECK_THROWS_AS(grassmann_from_frame(U, Eigen::MatrixXd::Identity(4, 4)), std::invalid_argument);
  CHECK_THROWS_AS(grassmann_from_h2(U, {0.0, -1.0}, {0.0, 1.0}), std::invalid_argument);
  CHECK(grassmann_from_h2(U, {0.0, 1e-8}, {0.0, 1.0}).ill_conditioned);
}

TEST_CASE("H x H model: majorant equivariance under SL2 x SL2 and the swap") {
  Lattice U = lattice_UU();
  const std::complex<double> z1(0.21, 1.13), z2(-0.37, 0.82);
  const Eigen::MatrixXd M = grassmann_from_h2(U, z1, z2).majorant;
  const long mats[][4] = {{1, 1, 0, 1}, {0, -1, 1, 0}, {2, 1, 1, 1}, {1, -2, 2, -3}};
  for (const auto& m : mats) {
    Eigen::MatrixXd A1 = to_d(h2_isometry_z1(m[0], m[1], m[2], m[3]));
    Eigen::MatrixXd Mg = grassmann_from_h2(U, mobius(m[0], m[1], m[2], m[3], z1), z2).majorant;
    CHECK((Mg - A1.transpose() * M * A1).cwiseAbs().maxCoeff() < 1e-11);
    Eigen::MatrixXd A2 = to_d(h2_isometry_z2(m[0], m[1], m[2], m[3]));
    Eigen::MatrixXd Mg2 = grassmann_from_h2(U, z1, mobius(m[0], m[1], m[2], m[3], z2)).majorant;
    CHECK((Mg2 - A2.transpose() * M * A2).cwiseAbs().maxCoeff() < 1e-11);
    // integer isometries of the gram matrix
    CHECK((A1.transpose() * to_d(U.gram) * A1 - to_d(U.gram)).cwiseAbs().maxCoeff() == 0.0);
  }
  Eigen::MatrixXd Sw = to_d(h2_swap());
  Eigen::MatrixXd Ms = grassmann_from_h2(U, z2, z1).majorant;
  CHECK((Ms - Sw.transpose() * M * Sw).cwiseAbs().maxCoeff() < 1e-11);
}

TEST_CASE("the diagonal vector has (lambda, W) = z2 - z1 and vanishes on the diagonal") {
  Lattice U = lattice_UU();
  Eigen::VectorXd lam(4);
  lam << 0, 0, -1, -1;
  for (double t : {0.5, 0.1, 0.01}) {
    GrassmannPoint z = grassmann_from_h2(U, {0.1, 1.3}, {0.1 + t * 0.6, 1.3 + t * 0.8});
    // |lambda_z|^2 = |z1 - z2|^2 / (2 y1 y2) for q(lambda) = 1
    const double expect = std::sqrt(t * t / (2 * 1.3 * (1.3 + t * 0.8)));
    CHECK(std::abs(z.negative_length(lam) - expect) < 1e-12);
  }
  GrassmannPoint on = grassmann_from_h2(U, {0.1, 1.3}, {0.1, 1.3});
  CHECK(on.negative_length(lam) < 1e-12);
}

TEST_CASE("enumeration agrees with a brute-force box search") {
  std::mt19937_64 rng(41);
  for (IntMatrix g : {IntMatrix{{2, 0}, {0, -2}}, IntMatrix{{2, 0, 0}, {0, 2, 0}, {0, 0, -2}}, lattice_UU().gram,
                      IntMatrix{{0, 1, 0}, {1, 0, 0}, {0, 0, 4}}}) {
    Lattice lat = make_lattice(g);
    DiscriminantForm d(lat);
    const int n = lat.rank();
    // a random isometry-moved point: random boost through flow
    GrassmannPoint z = grassmann_from_frame(lat, base_frame(lat));
    std::uniform_real_distribution<double> T(-0.6, 0.6);
    for (int a = 1; a <= lat.p; ++a)
      for (int m = lat.p + 1; m <= n; ++m) z = flow(z, a, m, T(rng));
    const double R = 9.0;
    for (size_t h = 0; h < d.order(); ++h) {
      auto vecs = enumerate(d, h, z, R);
      std::set<std::vector<long long>> ours;
      for (const auto& v : vecs) {
        CHECK(v.majorant < R);
        CHECK(std::abs(v.majorant - z.majorant_norm(v.y)) < 1e-9);
        CHECK(std::abs(v.norm - v.y.dot(z.gram * v.y)) < 1e-9);
        ours.insert(v.k);
      }
      CHECK(ours.size() == vecs.size());
      // brute force: y = rep + k, k in a box large enough for the majorant ellipsoid
      auto rep = d.representative(h);
      Eigen::VectorXd r(n);
      for (int i = 0; i < n; ++i) r(i) = rep[static_cast<size_t>(i)].to_double();
      Eigen::MatrixXd Minv = z.majorant.inverse();
      std::vector<long long> lo(static_cast<size_t>(n)), hi(static_cast<size_t>(n));
      for (int i = 0; i < n; ++i) {
        const double w = std::sqrt(R * Minv(i, i));
        lo[static_cast<size_t>(i)] = static_cast<long long>(std::floor(-w - r(i))) - 1;
        hi[static_cast<size_t>(i)] = static_cast<long long>(std::ceil(w - r(i))) + 1;
      }
      std::set<std::vector<long long>> brute;
      std::vector<long long> k(lo);
      while (true) {
        Eigen::VectorXd y = r;
        for (int i = 0; i < n; ++i) y(i) += static_cast<double>(k[static_cast<size_t>(i)]);
        const double m = z.majorant_norm(y);
        // skip the razor-thin shell where the strict comparison is decided by rounding
        if (m < R * (1 - 1e-9)) brute.insert(k);
        if (m >= R * (1 - 1e-9) && m < R * (1 + 1e-9)) ours.erase(k);
        int i = 0;
        while (i < n && ++k[static_cast<size_t>(i)] > hi[static_cast<size_t>(i)]) {
          k[static_cast<size_t>(i)] = lo[static_cast<size_t>(i)];
          ++i;
        }
        if (i == n) break;
      }
      CHECK(ours == brute);
    }
  }
}

TEST_CASE("strict enumeration at the boundary: diag(2,-2) at R = 4") {
  Lattice lat = make_lattice({{2, 0}, {0, -2}});
  DiscriminantForm d(lat);
  GrassmannPoint z = grassmann_from_frame(lat, base_frame(lat));
  // majorant 2(a^2 + b^2) < 4 in L + 0: (0,0), (+-1,0), (0,+-1)
  CHECK(enumerate(d, 0, z, 4.0).size() == 5);
}

TEST_CASE("flow derivative is the boost generator") {
  Lattice U = lattice_UU();
  GrassmannPoint z = grassmann_from_h2(U, {0.3, 1.2}, {-0.1, 0.7});
  Eigen::VectorXd y(4);
  y << 1, -2, 0.5, 3;
  const double h = 1e-5;
  for (int a = 1; a <= 2; ++a)
    for (int m = 3; m <= 4; ++m) {
      // d/dt (y,y)_{z_t} = 4 x_a x_m at t = 0 (majorant = x+^2 + x-^2, boost mixes the two)
      const double d = (flow(z, a, m, h).majorant_norm(y) - flow(z, a, m, -h).majorant_norm(y)) / (2 * h);
      Eigen::VectorXd x = z.coordinates(y);
      CHECK(std::abs(std::abs(d) - std::abs(4 * x(a - 1) * x(m - 1))) < 1e-6);
      // composite flows commute to first order
      GrassmannPoint z12 = flow2(z, a, m, 1e-3, 3 - a, m, 1e-3);
      GrassmannPoint z21 = flow2(z, 3 - a, m, 1e-3, a, m, 1e-3);
      CHECK((z12.majorant - z21.majorant).cwiseAbs().maxCoeff() < 1e-4);
    }
}
