#include "thetalab/theta.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <memory>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "thetalab/gauss_sum.hpp"

namespace thetalab {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr size_t kBatch = 512;

struct DegreeBounds {
  std::vector<double> by_degree;  // max over wedges of sum |c| for monomials of that degree
  int max_degree = 0;
};

DegreeBounds degree_bounds(const CompiledForm& c) {
  DegreeBounds b;
  b.max_degree = c.max_degree;
  std::vector<std::vector<double>> per(c.wedges.size(), std::vector<double>(c.max_degree + 1, 0.0));
  for (const auto& t : c.terms) {
    int deg = 0;
    for (int e : t.exps) deg += e;
    auto w = std::lower_bound(c.wedges.begin(), c.wedges.end(), t.wedge) - c.wedges.begin();
    per[w][deg] += std::abs(t.c);
  }
  b.by_degree.assign(c.max_degree + 1, 0.0);
  for (const auto& row : per)
    for (int d = 0; d <= c.max_degree; ++d) b.by_degree[d] = std::max(b.by_degree[d], row[d]);
  return b;
}

CompiledForm euler_weighted(const CompiledForm& c) {
  CompiledForm e = c;
  for (auto& t : e.terms) {
    int deg = 0;
    for (int x : t.exps) deg += x;
    t.c *= 0.5 * deg;
  }
  return e;
}

double pairwise_sum(const std::vector<double>& v, size_t lo, size_t hi) {
  if (hi - lo == 0) return 0.0;
  if (hi - lo == 1) return v[lo];
  size_t mid = lo + (hi - lo) / 2;
  return pairwise_sum(v, lo, mid) + pairwise_sum(v, mid, hi);
}

// Per-vector weight callback: fills 2*nw doubles (re, im per wedge) given the vector.
using WeightFn = std::function<void(const LatticeVector&, double*)>;

// sum over vectors of weight * exp(-pi v m), batched, bit-stable for any worker count
std::vector<cplx> batched_sum(const std::vector<LatticeVector>& vecs, size_t nw, double v, const WeightFn& wf,
                              int workers) {
  const size_t nb = (vecs.size() + kBatch - 1) / kBatch;
  const size_t K = 2 * nw;
  std::vector<std::vector<double>> partial(nb, std::vector<double>(K, 0.0));
  auto run = [&](size_t t, size_t stride) {
    std::vector<double> m(kBatch), w(K * kBatch), tmp(2 * nw);
    for (size_t b = t; b < nb; b += stride) {
      const size_t lo = b * kBatch, n = std::min(kBatch, vecs.size() - lo);
      for (size_t i = 0; i < n; ++i) {
        m[i] = vecs[lo + i].majorant;
        wf(vecs[lo + i], tmp.data());
        for (size_t k = 0; k < K; ++k) w[k * n + i] = tmp[k];
      }
      simd::gauss_weighted_sums(m.data(), n, kPi * v, w.data(), K, n, partial[b].data());
    }
  };
  const size_t nt = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(std::max(workers, 1)), nb));
  if (nt == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> th;
    for (size_t t = 0; t < nt; ++t) th.emplace_back(run, t, nt);
    for (auto& x : th) x.join();
  }
  std::vector<cplx> out(nw);
  std::vector<double> col(nb);
  for (size_t k = 0; k < nw; ++k) {
    for (size_t b = 0; b < nb; ++b) col[b] = partial[b][2 * k];
    double re = pairwise_sum(col, 0, nb);
    for (size_t b = 0; b < nb; ++b) col[b] = partial[b][2 * k + 1];
    double im = pairwise_sum(col, 0, nb);
    out[k] = {re, im};
  }
  return out;
}

WeilRep rep_of(const DiscriminantForm& disc) {
  const Lattice& l = disc.lattice();
  return WeilRep{std::make_shared<DiscriminantForm>(disc), l.p, l.q, false};
}

}  // namespace

ThetaKernel kernel_from_fock(const FockForm& f, const std::string& name) {
  ThetaKernel k;
  k.name = name;
  k.p = f.p();
  k.q = f.q();
  k.fock = f;
  k.weight = f.weight();
  k.schrodinger = fock_to_schrodinger(f);
  k.compiled = compile(k.schrodinger);
  return k;
}

ThetaKernel make_kernel(const std::string& name, int p, int q) {
  if (name == "phi0") return kernel_from_fock(build_phi0(p, q), name);
  if (name == "phikm") return kernel_from_fock(build_phi_KM(p, q), name);
  if (name == "psi") return kernel_from_fock(build_psi(p, q), name);
  if (name == "ddcphi0") {
    if (q != 2) throw std::invalid_argument("ddcphi0 needs q = 2");
    return kernel_from_fock(op_ddc(build_phi0(p, q)) * Coeff(-1), name);
  }
  throw std::invalid_argument("unknown theta kernel '" + name + "'");
}

std::string wedge_label(FockForm::Wedge w, int p, int q) {
  if (w == 0) return "1";
  std::ostringstream os;
  bool first = true;
  for (; w; w &= w - 1) {
    int bit = std::countr_zero(w);
    if (!first) os << "^";
    first = false;
    os << "w(" << bit / q + 1 << "," << bit % q + p + 1 << ")";
  }
  return os.str();
}

double theta_tail_bound(const ThetaKernel& k, const GrassmannPoint& z, double v, double R, bool derivative) {
  const int n = z.rank();
  if (n == 0) return 0.0;
  const DegreeBounds db = degree_bounds(k.compiled);
  const double covol = std::sqrt(std::abs(z.majorant.determinant()));
  double diam = 0.0;
  for (int i = 0; i < n; ++i) diam += std::sqrt(z.majorant(i, i));
  const double vn = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  const double a = k.v_power();
  auto count = [&](double t) { return vn * std::pow(std::sqrt(t) + diam, n) / covol; };
  auto poly = [&](double t) {
    double s = v * t, acc = 0.0;
    for (int d = 0; d <= db.max_degree; ++d) acc += db.by_degree[d] * std::pow(s, d / 2.0);
    if (derivative) acc *= 2.0 * kPi * v * v * t + v * (std::abs(a) + db.max_degree / 2.0);
    return acc;
  };
  double total = 0.0;
  for (int j = 0; j < 100000; ++j) {
    double t0 = R + j, t1 = R + j + 1;
    double term = count(t1) * poly(t1) * std::exp(-kPi * v * t0);
    total += term;
    if (j > 4 && term < 1e-6 * total) break;
  }
  return 10.0 * std::pow(v, a) * total;
}

double theta_radius(const ThetaKernel& k, const GrassmannPoint& z, double v, double tol, double cap, bool derivative) {
  if (!(tol > 0)) throw std::invalid_argument("tolerance must be positive");
  double hi = 1.0;
  while (theta_tail_bound(k, z, v, hi, derivative) > tol) {
    hi *= 1.5;
    if (hi > cap) throw std::runtime_error("tolerance too small for the radius cap");
  }
  double lo = hi / 1.5;
  if (hi == 1.0) return hi;
  for (int it = 0; it < 40; ++it) {
    double mid = 0.5 * (lo + hi);
    if (theta_tail_bound(k, z, v, mid, derivative) > tol)
      lo = mid;
    else
      hi = mid;
  }
  return hi;
}

ThetaValue theta_eval(const ThetaKernel& k, const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                      const ThetaOptions& opt) {
  if (!(tau.imag() > 0)) throw std::invalid_argument("tau must lie in the upper half plane");
  if (k.p != z.p || k.q != z.q) throw std::invalid_argument("kernel signature differs from the lattice");
  const double u = tau.real(), v = tau.imag();
  ThetaValue out;
  out.wedges = k.wedges();
  const size_t nw = out.wedges.size();
  // half of tol for the tail, the rest covers the rounding term added below
  out.radius = opt.radius > 0 ? opt.radius : theta_radius(k, z, v, 0.5 * opt.tol, opt.radius_cap);
  out.error_bound = opt.zero_only ? 0.0 : theta_tail_bound(k, z, v, out.radius);
  const double vp = std::pow(v, k.v_power()), sv = std::sqrt(v);
  const int n = z.rank();
  WeightFn wf = [&](const LatticeVector& lv, double* w) {
    Eigen::VectorXd x = sv * (z.coord * lv.y);
    std::vector<cplx> pv(nw);
    evaluate(k.compiled, x.data(), pv.data());
    const cplx ph = std::polar(vp, kPi * u * lv.norm);
    for (size_t i = 0; i < nw; ++i) {
      cplx c = pv[i] * ph;
      w[2 * i] = c.real();
      w[2 * i + 1] = c.imag();
    }
  };
  double mag = 0.0;
  for (size_t h = 0; h < disc.order(); ++h) {
    std::vector<LatticeVector> vecs;
    if (opt.zero_only) {
      if (h == 0) vecs.push_back({std::vector<long long>(n, 0), Eigen::VectorXd::Zero(n), 0.0, 0.0, 0});
    } else {
      vecs = enumerate(disc, h, z, out.radius);
    }
    out.vector_count += vecs.size();
    out.components.push_back(batched_sum(vecs, nw, v, wf, opt.workers));
    for (const auto& c : out.components.back()) mag = std::max(mag, std::abs(c));
  }
  if (!opt.zero_only) out.error_bound += 1e-14 * std::max(1.0, mag);
  return out;
}

double modularity_residual(const ThetaKernel& k, const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                           char gen, const ThetaOptions& opt) {
  if (gen != 'S' && gen != 'T') throw std::invalid_argument("generator must be S or T");
  WeilRep rep = rep_of(disc);
  CMatrix rho = weil_generator(rep, gen);
  cplx gtau = gen == 'T' ? tau + 1.0 : -1.0 / tau;
  cplx factor = gen == 'T' ? cplx(1.0) : std::exp(k.weight.to_double() * std::log(tau));
  ThetaValue a = theta_eval(k, disc, gtau, z, opt);
  ThetaValue b = theta_eval(k, disc, tau, z, opt);
  const size_t N = disc.order(), nw = a.wedges.size();
  double res = 0.0, mag = 1.0;
  for (size_t w = 0; w < nw; ++w)
    for (size_t i = 0; i < N; ++i) {
      cplx rhs = 0.0;
      for (size_t j = 0; j < N; ++j) rhs += rho(i, j) * b.components[j][w];
      rhs *= factor;
      res = std::max(res, std::abs(a.components[i][w] - rhs));
      mag = std::max(mag, std::abs(a.components[i][w]));
    }
  return res / mag;
}

namespace {

struct LoweringTerms {
  std::vector<cplx> lhs, rhs;
};

}  // namespace

LoweringReport lowering_theta_check(const DiscriminantForm& disc, cplx tau, const GrassmannPoint& z,
                                    const ThetaOptions& opt) {
  if (z.q != 2) throw std::invalid_argument("the lowering check needs q = 2");
  ThetaKernel km = make_kernel("phikm", z.p, z.q);
  ThetaKernel dd = make_kernel("ddcphi0", z.p, z.q);
  CompiledForm ep = euler_weighted(km.compiled);
  const double u = tau.real(), v = tau.imag();
  const double a = km.v_power();
  const double R = opt.radius > 0 ? opt.radius
                                  : std::max(theta_radius(km, z, v, opt.tol, opt.radius_cap, true),
                                             theta_radius(dd, z, v, opt.tol, opt.radius_cap));
  ThetaOptions o2 = opt;
  o2.radius = R;
  ThetaValue rhs = theta_eval(dd, disc, tau, z, o2);

  const size_t nw = km.wedges().size();
  const double sv = std::sqrt(v), vp = std::pow(v, a);
  WeightFn wf = [&](const LatticeVector& lv, double* w) {
    Eigen::VectorXd x = sv * (z.coord * lv.y);
    std::vector<cplx> pv(nw), ev(nw);
    evaluate(km.compiled, x.data(), pv.data());
    evaluate(ep, x.data(), ev.data());
    const cplx ph = std::polar(vp, kPi * u * lv.norm);
    const cplx I(0, 1);
    for (size_t i = 0; i < nw; ++i) {
      cplx du = I * kPi * lv.norm * pv[i];
      cplx dv = (a / v) * pv[i] + ev[i] / v - kPi * lv.majorant * pv[i];
      cplx c = (-I * v * v * du + v * v * dv) * ph;
      w[2 * i] = c.real();
      w[2 * i + 1] = c.imag();
    }
  };
  LoweringReport rep;
  rep.error_bound = theta_tail_bound(km, z, v, R, true) + rhs.error_bound;
  double res = 0.0, mag = 1.0;
  for (size_t h = 0; h < disc.order(); ++h) {
    std::vector<LatticeVector> vecs = enumerate(disc, h, z, R);
    std::vector<cplx> lhs = batched_sum(vecs, nw, v, wf, opt.workers);
    auto comp = [&](const std::vector<FockForm::Wedge>& ws, const std::vector<cplx>& vals, FockForm::Wedge w) {
      auto it = std::lower_bound(ws.begin(), ws.end(), w);
      return (it != ws.end() && *it == w) ? vals[it - ws.begin()] : cplx(0.0);
    };
    std::vector<FockForm::Wedge> all = km.wedges();
    all.insert(all.end(), rhs.wedges.begin(), rhs.wedges.end());
    std::sort(all.begin(), all.end());
    all.erase(std::unique(all.begin(), all.end()), all.end());
    for (auto w : all) {
      cplx l = comp(km.wedges(), lhs, w), r = comp(rhs.wedges, rhs.components[h], w);
      res = std::max(res, std::abs(l - r));
      mag = std::max(mag, std::abs(r));
      rep.lhs_norm = std::max(rep.lhs_norm, std::abs(l));
    }
  }
  rep.residual = res / mag;
  return rep;
}

double lowering_single_term(const GrassmannPoint& z, const Eigen::VectorXd& lambda, cplx tau) {
  if (z.q != 2) throw std::invalid_argument("the lowering check needs q = 2");
  ThetaKernel km = make_kernel("phikm", z.p, z.q);
  ThetaKernel dd = make_kernel("ddcphi0", z.p, z.q);
  CompiledForm ep = euler_weighted(km.compiled);
  const double u = tau.real(), v = tau.imag(), a = km.v_power();
  const double m = z.majorant_norm(lambda), nr = lambda.dot(z.gram * lambda);
  Eigen::VectorXd x = std::sqrt(v) * (z.coord * lambda);
  const size_t nw = km.wedges().size(), nd = dd.wedges().size();
  std::vector<cplx> pv(nw), ev(nw), rv(nd);
  evaluate(km.compiled, x.data(), pv.data());
  evaluate(ep, x.data(), ev.data());
  evaluate(dd.compiled, x.data(), rv.data());
  const cplx I(0, 1);
  const cplx g = std::exp(I * kPi * u * nr - kPi * v * m);
  double res = 0.0;
  for (size_t i = 0; i < nw; ++i) {
    cplx du = I * kPi * nr * pv[i];
    cplx dv = (a / v) * pv[i] + ev[i] / v - kPi * m * pv[i];
    cplx l = std::pow(v, a) * (-I * v * v * du + v * v * dv) * g;
    auto it = std::lower_bound(dd.wedges().begin(), dd.wedges().end(), km.wedges()[i]);
    cplx r = (it != dd.wedges().end() && *it == km.wedges()[i]) ? std::pow(v, dd.v_power()) * rv[it - dd.wedges().begin()] * g
                                                                 : cplx(0.0);
    res = std::max(res, std::abs(l - r));
  }
  for (size_t j = 0; j < nd; ++j)
    if (!std::binary_search(km.wedges().begin(), km.wedges().end(), dd.wedges()[j]))
      res = std::max(res, std::abs(std::pow(v, dd.v_power()) * rv[j] * g));
  return res;
}

}  // namespace thetalab
