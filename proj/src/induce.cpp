#include "thetalab/qseries.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace thetalab {

namespace {
double snap(double x) {
  const double r = std::round(x);
  return std::fabs(x - r) < 1e-12 ? r : x;
}
}  // namespace

VVSeries induce_from_scalar(const ScalarForm& f, const WeilRep& w, size_t h0) {
  const auto n = static_cast<Eigen::Index>(w.dim());
  if (h0 >= w.dim()) throw std::invalid_argument("seed index out of range");
  // Averaging chi(g)^{-1} rho(g) over the (finite) image group is the orthogonal projector onto
  // {x : rho(S) x = chi(S) x, rho(T) x = chi(T) x}; compute it as a null space.
  CMatrix stacked(2 * n, n);
  stacked.topRows(n) = weil_generator(w, 'S') - unit_phase(f.chi_S) * CMatrix::Identity(n, n);
  stacked.bottomRows(n) = weil_generator(w, 'T') - unit_phase(f.chi_T) * CMatrix::Identity(n, n);
  Eigen::JacobiSVD<CMatrix> svd(stacked, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  CMatrix proj = CMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    if (sv(i) < 1e-9) proj += svd.matrixV().col(i) * svd.matrixV().col(i).adjoint();
  Eigen::VectorXcd v = proj.col(h0);
  if (v.norm() < 1e-9) {
    std::ostringstream os;
    os << "inconsistent multiplier system: seed " << h0 << " has no component where the representation acts by the scalar multiplier";
    throw std::invalid_argument(os.str());
  }
  v /= v(h0);
  VVSeries out{f.weight, w, {}, f.offset + Rational(f.series.precision())};
  for (Eigen::Index h = 0; h < n; ++h) {
    const cplx vh(snap(v(h).real()), snap(v(h).imag()));
    if (std::abs(vh) < 1e-12) continue;
    for (int m = f.series.valuation(); m < f.series.precision(); ++m) {
      const mpq_class c = f.series.coeff(m);
      if (c != 0) out.set(static_cast<size_t>(h), f.offset + Rational(m), vh * c.get_d());
    }
  }
  const cplx probe(0.1, 1.1);
  for (char g : {'S', 'T'}) {
    const double r = series_modularity_residual(out, probe, g);
    if (!(r < 1e-8)) {
      std::ostringstream os;
      os << "inconsistent multiplier system: " << g << "-residual " << r;
      throw std::runtime_error(os.str());
    }
  }
  return out;
}

}  // namespace thetalab
