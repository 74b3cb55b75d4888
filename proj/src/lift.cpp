#include "thetalab/lift.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "thetalab/gauss_sum.hpp"
#include "thetalab/laurent.hpp"
#include "thetalab/specfun.hpp"

namespace thetalab {

namespace {

constexpr double kPi = std::numbers::pi;
const double kVmin = std::sqrt(3.0) / 2.0;

Lattice lattice_of(const GrassmannPoint& z) { return make_lattice(z.gram_int); }

// disc must index cosets the same way as f's representation
void check_input(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const DiscriminantForm& disc) {
  if (k.p != z.p || k.q != z.q) throw std::invalid_argument("kernel signature differs from the lattice");
  if (f.cls == FormClass::H_general) throw std::invalid_argument("lifts accept only H_plus or weakly holomorphic input");
  if (f.rep.dim() != disc.order()) throw std::invalid_argument("form lives on a different discriminant group");
  if (disc.order() > 1) {
    if (!f.rep.dual) throw std::invalid_argument("lift input must transform with the dual Weil representation");
    if (f.rep.disc->lattice().gram != z.gram_int) throw std::invalid_argument("form lives on a different lattice");
  }
  if (f.weight + k.weight != Rational(0))
    throw std::invalid_argument("form weight " + f.weight.str() + " does not match kernel weight " + k.weight.str());
  if (!f.has_plus_symmetry(z.q % 2 ? -1 : 1)) throw std::invalid_argument("a+(-h,n) = (-1)^q a+(h,n) violated");
}

cplx coeff(const CoeffTable& t, size_t h, const Rational& n) {
  auto it = t.find({h, n});
  return it == t.end() ? cplx(0.0) : it->second;
}

// Theta kernel split by polynomial degree, all sharing the wedge list.
struct DegreeSplit {
  std::vector<int> degrees;
  std::vector<CompiledForm> forms;
  size_t nw = 0;
};

DegreeSplit split_by_degree(const ThetaKernel& k) {
  DegreeSplit s;
  s.nw = k.wedges().size();
  std::map<int, CompiledForm> m;
  for (const auto& t : k.compiled.terms) {
    int d = 0;
    for (int e : t.exps) d += e;
    auto [it, fresh] = m.try_emplace(d);
    if (fresh) {
      it->second.nvars = k.compiled.nvars;
      it->second.wedges = k.compiled.wedges;
      it->second.max_degree = d;
    }
    it->second.terms.push_back(t);
  }
  for (auto& [d, c] : m) {
    s.degrees.push_back(d);
    s.forms.push_back(std::move(c));
  }
  return s;
}

struct Prepared {
  const ThetaKernel* k = nullptr;
  const WeakMaassForm* f = nullptr;
  DegreeSplit split;
  double a = 0.0;  // v-power
  size_t n = 0;
  std::vector<size_t> h;
  std::vector<double> m, norm;
  std::vector<long long> key;
  std::vector<char> zero;
  std::vector<int> group;           // index into group_norm
  std::vector<double> group_norm;
  std::vector<cplx> P;              // [i][d][w]
  long long level = 1;
};

Prepared prepare(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const DiscriminantForm& disc,
                 const LiftPlan& plan) {
  Prepared pr;
  pr.k = &k;
  pr.f = &f;
  pr.split = split_by_degree(k);
  pr.a = k.v_power();
  pr.level = disc.level();
  pr.n = plan.vectors.size();
  const size_t nd = pr.split.degrees.size(), nw = pr.split.nw;
  pr.P.assign(pr.n * nd * nw, 0.0);
  std::map<long long, int> groups;
  std::vector<cplx> tmp(nw);
  for (size_t i = 0; i < pr.n; ++i) {
    const Eigen::VectorXd& y = plan.vectors[i];
    pr.h.push_back(plan.coset[i]);
    pr.m.push_back(z.majorant_norm(y));
    const double nr = y.dot(z.gram * y);
    pr.norm.push_back(nr);
    const long long key = std::llround(nr * static_cast<double>(pr.level));
    pr.key.push_back(key);
    pr.zero.push_back(y.cwiseAbs().maxCoeff() == 0.0);
    auto [it, fresh] = groups.try_emplace(key, static_cast<int>(pr.group_norm.size()));
    if (fresh) pr.group_norm.push_back(static_cast<double>(key) / static_cast<double>(pr.level));
    pr.group.push_back(it->second);
    Eigen::VectorXd x = z.coord * y;
    for (size_t d = 0; d < nd; ++d) {
      evaluate(pr.split.forms[d], x.data(), tmp.data());
      for (size_t w = 0; w < nw; ++w) pr.P[(i * nd + d) * nw + w] = tmp[w];
    }
  }
  return pr;
}

struct F1Result {
  std::vector<cplx> value;
  double reg_constant = 0.0;
};

// tensor Gauss-Legendre over |u| <= 1/2, sqrt(1-u^2) <= v <= 1 with 2^level u-panels, 2^(level-1) v-panels
F1Result integrate_f1(const Prepared& pr, int level, int nodes, int workers) {
  const QuadRule& gl = gauss_legendre(nodes);
  const int nu = 1 << level, nt = 1 << (level - 1);
  const size_t nw = pr.split.nw, nd = pr.split.degrees.size();
  struct Node {
    double u, v, w;
  };
  std::vector<Node> grid;
  for (int pu = 0; pu < nu; ++pu)
    for (int iu = 0; iu < nodes; ++iu) {
      const double hu = 1.0 / nu;
      const double u = -0.5 + hu * (pu + 0.5 * (gl.x[iu] + 1.0));
      const double wu = 0.5 * hu * gl.w[iu];
      const double b = std::sqrt(1.0 - u * u);
      for (int pt = 0; pt < nt; ++pt)
        for (int it = 0; it < nodes; ++it) {
          const double ht = 1.0 / nt;
          const double t = ht * (pt + 0.5 * (gl.x[it] + 1.0));
          const double wt = 0.5 * ht * gl.w[it];
          const double v = b + t * (1.0 - b);
          grid.push_back({u, v, wu * wt * (1.0 - b) / (v * v)});
        }
    }
  std::vector<std::vector<cplx>> per(grid.size());
  auto run = [&](size_t t0, size_t stride) {
    std::vector<double> w(2 * nw * pr.n), out(2 * nw);
    std::vector<cplx> phase(pr.group_norm.size());
    std::vector<double> vpow(nd);
    for (size_t g = t0; g < grid.size(); g += stride) {
      const Node& nd_ = grid[g];
      const cplx tau(nd_.u, nd_.v);
      const std::vector<cplx> fv = pr.f->eval(tau);
      for (size_t j = 0; j < phase.size(); ++j) phase[j] = std::polar(1.0, kPi * nd_.u * pr.group_norm[j]);
      const double va = std::pow(nd_.v, pr.a);
      for (size_t d = 0; d < nd; ++d) vpow[d] = std::pow(nd_.v, 0.5 * pr.split.degrees[d]);
      for (size_t i = 0; i < pr.n; ++i) {
        const cplx pre = fv[pr.h[i]] * phase[pr.group[i]] * va;
        for (size_t k = 0; k < nw; ++k) {
          cplx s = 0.0;
          for (size_t d = 0; d < nd; ++d) s += vpow[d] * pr.P[(i * nd + d) * nw + k];
          s *= pre;
          w[(2 * k) * pr.n + i] = s.real();
          w[(2 * k + 1) * pr.n + i] = s.imag();
        }
      }
      simd::gauss_weighted_sums(pr.m.data(), pr.n, kPi * nd_.v, w.data(), 2 * nw, pr.n, out.data());
      per[g].resize(nw);
      for (size_t k = 0; k < nw; ++k) per[g][k] = cplx(out[2 * k], out[2 * k + 1]) * nd_.w;
    }
  };
  const size_t nthreads = std::max<size_t>(1, std::min<size_t>(static_cast<size_t>(std::max(1, workers)), grid.size()));
  if (nthreads == 1) {
    run(0, 1);
  } else {
    std::vector<std::thread> th;
    for (size_t t = 0; t < nthreads; ++t) th.emplace_back(run, t, nthreads);
    for (auto& x : th) x.join();
  }
  F1Result r;
  r.value.assign(nw, 0.0);
  for (size_t g = 0; g < grid.size(); ++g) {
    for (size_t k = 0; k < nw; ++k) r.value[k] += per[g][k];
    r.reg_constant += grid[g].w * std::pow(grid[g].v, pr.a);
  }
  return r;
}

// int_1^inf H(2 pi n v) v^{s-1} e^{-pi m v} dv for n < 0
double minus_vint(double k, double n, double s, double m) {
  const double rate = kPi * (m + 2.0 * std::abs(n));
  const double vmax = 1.0 + 60.0 / rate;
  const int panels = std::max(4, static_cast<int>(std::ceil((vmax - 1.0) * rate / 2.0)));
  const QuadRule& gl = gauss_legendre(20);
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    const double a = 1.0 + (vmax - 1.0) * p / panels, b = 1.0 + (vmax - 1.0) * (p + 1) / panels;
    for (size_t i = 0; i < gl.x.size(); ++i) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
      acc += 0.5 * (b - a) * gl.w[i] * H_function(k, 2.0 * kPi * n * v) * std::pow(v, s - 1.0) * std::exp(-kPi * m * v);
    }
  }
  return acc;
}

// v >= 1 piece: constant-in-u terms, one per lattice vector
std::vector<cplx> upper_part(const Prepared& pr, const GrassmannPoint& z, const LiftOptions& opt) {
  const size_t nw = pr.split.nw, nd = pr.split.degrees.size();
  std::vector<cplx> out(nw, 0.0);
  const WeakMaassForm& f = *pr.f;
  const double k = f.weight.to_double();
  for (size_t i = 0; i < pr.n; ++i) {
    const Rational n(-pr.key[i], 2 * pr.level);
    const cplx cp = coeff(f.plus, pr.h[i], n);
    const cplx cm = coeff(f.minus, pr.h[i], n);
    if (cp == 0.0 && cm == 0.0) continue;
    const double A = kPi * (pr.m[i] - pr.norm[i]);
    for (size_t d = 0; d < nd; ++d) {
      const double deg = pr.split.degrees[d];
      const double s = pr.a + 0.5 * deg - 1.0;
      cplx factor = 0.0;
      if (pr.zero[i]) {
        if (deg != 0) continue;
        // regularized int_1^inf v^{s-1-t} dv at t = 0: Laurent constant
        if (cp != 0.0 && s != 0.0) factor += cp * (-1.0 / s);
        const double sm = s + 1.0 - k;  // f- constant term carries v^{1-k}
        if (cm != 0.0 && sm != 0.0) factor += cm * (-1.0 / sm);
      } else {
        if (!(A > 0.0)) {
          SingularLocusReport rep;
          rep.eps = 0.0;
          rep.entries.push_back({pr.h[i], n, {}, 0.0, 0.0});
          throw SingularLocusError(rep);
        }
        if (cp != 0.0) factor += cp * vint_closed(s, A);
        if (cm != 0.0) {
          if (n == Rational(0))
            factor += cm * vint_closed(s + 1.0 - k, kPi * pr.m[i]);
          else
            factor += cm * minus_vint(k, n.to_double(), s, pr.m[i]);
        }
      }
      if (factor == 0.0) continue;
      for (size_t w = 0; w < nw; ++w) out[w] += factor * pr.P[(i * nd + d) * nw + w];
    }
  }
  (void)z;
  (void)opt;
  return out;
}

struct CoeffGrowth {
  double nmin_abs = 0.0;  // |most negative principal index|
  double known_max_n = 0.0;
  double c = 0.0;
  double exponent_k = 0.0;
  double growth(double n) const {
    return nmin_abs > 0 ? std::exp(4.0 * kPi * std::sqrt(nmin_abs * std::max(n, 0.0)))
                        : std::pow(1.0 + std::max(n, 0.0), 2.0 + std::abs(exponent_k));
  }
  std::map<double, double> running_max;
  double amax(double n) const {
    double best = 0.0;
    auto it = running_max.upper_bound(n);
    if (it != running_max.begin()) best = std::prev(it)->second;
    if (n > known_max_n) best = std::max(best, c * growth(n));
    return best;
  }
};

CoeffGrowth coeff_growth(const WeakMaassForm& f) {
  CoeffGrowth g;
  g.exponent_k = f.weight.to_double();
  std::map<double, double> maxima;
  for (const auto& [idx, c] : f.plus) {
    const double n = idx.n.to_double();
    if (std::abs(c) == 0.0) continue;
    if (n < 0) g.nmin_abs = std::max(g.nmin_abs, -n);
    maxima[n] = std::max(maxima[n], std::abs(c));
  }
  double run = 0.0;
  for (auto& [n, a] : maxima) {
    run = std::max(run, a);
    g.running_max[n] = run;
  }
  g.known_max_n = f.prec.to_double() - 1.0;
  for (auto& [n, a] : maxima)
    if (n >= 1) g.c = std::max(g.c, a / g.growth(n));
  return g;
}

double closed_tail(const ThetaKernel& k, const GrassmannPoint& z, const CoeffGrowth& g, double R) {
  const int n = z.rank();
  const double covol = std::sqrt(std::abs(z.majorant.determinant()));
  double diam = 0.0;
  for (int i = 0; i < n; ++i) diam += std::sqrt(z.majorant(i, i));
  const double vn = std::pow(kPi, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
  std::vector<double> cdeg(k.compiled.max_degree + 1, 0.0);
  for (const auto& t : k.compiled.terms) {
    int d = 0;
    for (int e : t.exps) d += e;
    cdeg[d] += std::abs(t.c);
  }
  double total = 0.0;
  for (int j = 0; j < 10000; ++j) {
    const double t0 = R + j, t1 = R + j + 1;
    double poly = 0.0;
    for (size_t d = 0; d < cdeg.size(); ++d) poly += cdeg[d] * std::pow(t1, d / 2.0);
    const double A = kPi * std::max(t0 - 2.0 * g.nmin_abs, 1e-3);
    const double term = vn * std::pow(std::sqrt(t1) + diam, n) / covol * g.amax(t1 / 2.0) * poly * 2.0 *
                        std::exp(-A) / std::min(A, 1.0);
    total += term;
    if (j > 4 && term < 1e-6 * total) break;
  }
  return total;
}

double f_bound(const WeakMaassForm& f) {
  double s = 0.0;
  const double k = f.weight.to_double();
  for (const auto& [idx, c] : f.plus) {
    const double n = idx.n.to_double();
    s += std::abs(c) * std::exp(-2.0 * kPi * n * (n < 0 ? 1.0 : kVmin));
  }
  for (const auto& [idx, c] : f.minus) {
    const double n = idx.n.to_double();
    s += std::abs(c) * (n == 0 ? std::max(1.0, std::pow(kVmin, 1.0 - k)) : std::abs(H_function(k, 2.0 * kPi * n * kVmin)));
  }
  return s;
}

struct Built {
  LiftPlan plan;
  F1Result f1;
  bool have_f1 = false;
};

Built build_plan(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const DiscriminantForm& disc,
                 const LiftOptions& opt, double margin, bool adapt) {
  Built b;
  const double tol = opt.tol;
  const double fmax = std::max(1.0, f_bound(f));
  double R = theta_radius(k, z, kVmin, tol / (10.0 * fmax));
  CoeffGrowth g = coeff_growth(f);
  double Rc = std::max(1.0, 2.0 * g.nmin_abs + 1.0);
  while (closed_tail(k, z, g, Rc) > tol / 10.0) {
    Rc *= 1.25;
    if (Rc > 4000.0) throw std::runtime_error("tolerance too small for the radius cap");
  }
  R = std::max(R, Rc) * (1.0 + margin);
  if (!(f.prec > Rational(static_cast<long long>(std::ceil(R / 2.0)))))
    throw std::runtime_error("q-expansion precision too low for the requested tolerance (need n up to " +
                             std::to_string(static_cast<long long>(std::ceil(R / 2.0))) + ")");
  b.plan.radius = R;
  for (size_t h = 0; h < disc.order(); ++h)
    for (const auto& lv : enumerate(disc, h, z, R)) {
      b.plan.coset.push_back(h);
      b.plan.vectors.push_back(lv.y);
    }
  if (!adapt) return b;
  Prepared pr = prepare(k, f, z, disc, b.plan);
  F1Result prev = integrate_f1(pr, 1, opt.nodes, opt.workers);
  for (int level = 2; level <= std::max(2, opt.max_level); ++level) {
    F1Result cur = integrate_f1(pr, level, opt.nodes, opt.workers);
    double diff = 0.0;
    for (size_t w = 0; w < cur.value.size(); ++w) diff = std::max(diff, std::abs(cur.value[w] - prev.value[w]));
    b.plan.level = level;
    b.plan.quad_error = diff;
    b.f1 = cur;
    b.have_f1 = true;
    if (diff <= tol / 4.0) break;
    prev = cur;
  }
  return b;
}

}  // namespace

SingularLocusError::SingularLocusError(SingularLocusReport r)
    : std::runtime_error("point lies within the exclusion distance of the singular locus"), report(std::move(r)) {}

cplx LiftValue::get(FockForm::Wedge w) const {
  auto it = std::lower_bound(wedges.begin(), wedges.end(), w);
  return (it != wedges.end() && *it == w) ? components[it - wedges.begin()] : cplx(0.0);
}

SingularLocusReport singular_set(const WeakMaassForm& f, const GrassmannPoint& z, double eps) {
  SingularLocusReport rep;
  rep.eps = eps;
  DiscriminantForm disc(lattice_of(z));
  double nmax = 0.0;
  for (const auto& [idx, c] : f.plus)
    if (idx.n < Rational(0) && std::abs(c) > 0) nmax = std::max(nmax, -idx.n.to_double());
  if (nmax == 0.0) return rep;
  const double R = 2.0 * nmax + 4.0 * eps + 1e-6;
  for (size_t h = 0; h < disc.order(); ++h)
    for (const auto& lv : enumerate(disc, h, z, R)) {
      const Rational n(-lv.norm_key, 2 * disc.level());
      if (!(n < Rational(0))) continue;
      if (std::abs(coeff(f.plus, h, n)) == 0.0) continue;
      const double qz = std::max(0.0, (lv.majorant - lv.norm) / 4.0);
      if (qz < eps) {
        SingularEntry e;
        e.h = h;
        e.n = n;
        e.lambda.assign(lv.y.data(), lv.y.data() + lv.y.size());
        e.q_z = qz;
        e.dist = std::sqrt(2.0 * qz);
        rep.entries.push_back(e);
      }
    }
  return rep;
}

LiftPlan make_lift_plan(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt,
                        double margin) {
  DiscriminantForm disc(lattice_of(z));
  check_input(k, f, z, disc);
  return build_plan(k, f, z, disc, opt, margin, true).plan;
}

LiftValue lift_eval(const ThetaKernel& k, const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt,
                    const LiftPlan* plan) {
  DiscriminantForm disc(lattice_of(z));
  check_input(k, f, z, disc);
  SingularLocusReport near = singular_set(f, z, 0.5 * opt.eps_min * opt.eps_min);
  if (!near.empty()) throw SingularLocusError(near);

  Built b;
  if (plan) {
    b.plan = *plan;
  } else {
    b = build_plan(k, f, z, disc, opt, 0.0, true);
  }
  Prepared pr = prepare(k, f, z, disc, b.plan);
  F1Result f1 = b.have_f1 ? b.f1 : integrate_f1(pr, b.plan.level, opt.nodes, opt.workers);
  std::vector<cplx> upper = upper_part(pr, z, opt);

  LiftValue out;
  out.p = z.p;
  out.q = z.q;
  out.wedges = k.wedges();
  out.is_form = !(out.wedges.size() == 1 && out.wedges[0] == 0);
  out.components.resize(out.wedges.size());
  for (size_t w = 0; w < out.wedges.size(); ++w) out.components[w] = f1.value[w] + upper[w];
  out.compact_part = f1.value.empty() ? 0.0 : f1.value[0].real();
  out.regularization_constant = f1.reg_constant;
  out.quadrature_level = b.plan.level;
  out.radius = b.plan.radius;
  out.vector_count = b.plan.vectors.size();
  double mag = 0.0;
  for (const auto& c : out.components) mag = std::max(mag, std::abs(c));
  out.error = b.plan.quad_error + opt.tol / 5.0 + 1e-13 * std::max(1.0, mag);
  return out;
}

LiftValue lift_phi0(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt) {
  if (z.q != 2) throw std::invalid_argument("the Gaussian-kernel lift needs q = 2");
  return lift_eval(make_kernel("phi0", z.p, z.q), f, z, opt);
}

LiftValue lift_psi(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt) {
  if (z.q < 1) throw std::invalid_argument("psi lift needs q >= 1");
  return lift_eval(make_kernel("psi", z.p, z.q), f, z, opt);
}

double vint_closed(double s, double A) {
  if (!(A > 0)) throw std::invalid_argument("v-integral needs A > 0");
  return std::exp(-s * std::log(A)) * upper_gamma(s, A);
}

double vint_numeric(double s, double A, double vmax) {
  if (!(A > 0)) throw std::invalid_argument("v-integral needs A > 0");
  // panels scaled to the decay length, Gauss-Legendre 30 per panel
  const double len = std::min(vmax - 1.0, std::max(0.05, 1.0 / A));
  const int panels = std::min(4000, static_cast<int>(std::ceil((vmax - 1.0) / len)));
  const QuadRule& gl = gauss_legendre(30);
  double acc = 0.0;
  for (int p = 0; p < panels; ++p) {
    // geometric grading near v = 1 helps small A
    const double a = 1.0 + (vmax - 1.0) * p / panels, b = 1.0 + (vmax - 1.0) * (p + 1) / panels;
    double part = 0.0;
    for (size_t i = 0; i < gl.x.size(); ++i) {
      const double v = 0.5 * (a + b) + 0.5 * (b - a) * gl.x[i];
      part += gl.w[i] * std::exp((s - 1.0) * std::log(v) - A * v);
    }
    acc += 0.5 * (b - a) * part;
  }
  // tail int_vmax^inf v^{s-1} e^{-Av}: leading asymptotic term of the incomplete gamma
  double tail = std::exp((s - 1.0) * std::log(vmax) - A * vmax) / A;
  double term = tail, corr = tail;
  for (int j = 1; j < 30; ++j) {
    term *= (s - j) / (A * vmax);
    if (std::abs(term) < 1e-18 * std::abs(corr)) break;
    corr += term;
  }
  return acc + corr;
}

double FormValue::get(FockForm::Wedge w) const {
  auto it = std::lower_bound(wedges.begin(), wedges.end(), w);
  return (it != wedges.end() && *it == w) ? components[it - wedges.begin()] : 0.0;
}

double FormValue::max_abs() const {
  double m = 0.0;
  for (double c : components) m = std::max(m, std::abs(c));
  return m;
}

namespace {

FormValue from_map(int p, int q, const std::map<FockForm::Wedge, double>& m) {
  FormValue f;
  f.p = p;
  f.q = q;
  for (const auto& [w, c] : m) {
    f.wedges.push_back(w);
    f.components.push_back(c);
  }
  return f;
}

// sign of moving bit b in front of word w
int insert_sign(FockForm::Wedge w, int b) { return (std::popcount(w & ((1u << b) - 1)) % 2) ? -1 : 1; }

void add_wedge(std::map<FockForm::Wedge, double>& m, int b, const FormValue& eta, double scale = 1.0) {
  for (size_t i = 0; i < eta.wedges.size(); ++i) {
    const FockForm::Wedge w = eta.wedges[i];
    if (w & (1u << b)) continue;
    m[w | (1u << b)] += scale * insert_sign(w, b) * eta.components[i];
  }
}

struct Gen {
  int alpha, mu, bit;
};

std::vector<Gen> generators(int p, int q) {
  std::vector<Gen> g;
  for (int a = 1; a <= p; ++a)
    for (int m = p + 1; m <= p + q; ++m) g.push_back({a, m, (a - 1) * q + (m - p - 1)});
  return g;
}

// Richardson-extrapolated first and mixed second derivatives of a vector-valued function of the flows
using Eval = std::function<std::vector<double>(const GrassmannPoint&)>;

std::vector<double> first_derivative(const Eval& ev, const GrassmannPoint& z, const Gen& g, double h, double* err) {
  auto central = [&](double s) {
    auto a = ev(flow(z, g.alpha, g.mu, s));
    auto b = ev(flow(z, g.alpha, g.mu, -s));
    for (size_t i = 0; i < a.size(); ++i) a[i] = (a[i] - b[i]) / (2.0 * s);
    return a;
  };
  auto d1 = central(h), d2 = central(h / 2.0);
  for (size_t i = 0; i < d1.size(); ++i) {
    const double r = (4.0 * d2[i] - d1[i]) / 3.0;
    if (err) *err = std::max(*err, std::abs(r - d2[i]));
    d1[i] = r;
  }
  return d1;
}

double mixed_derivative(const std::function<double(const GrassmannPoint&)>& ev, const GrassmannPoint& z, const Gen& b,
                        const Gen& a, double h, double* err) {
  auto m = [&](double s) {
    const double pp = ev(flow2(z, b.alpha, b.mu, s, a.alpha, a.mu, s));
    const double pm = ev(flow2(z, b.alpha, b.mu, s, a.alpha, a.mu, -s));
    const double mp = ev(flow2(z, b.alpha, b.mu, -s, a.alpha, a.mu, s));
    const double mm = ev(flow2(z, b.alpha, b.mu, -s, a.alpha, a.mu, -s));
    return (pp - pm - mp + mm) / (4.0 * s * s);
  };
  const double m1 = m(h), m2 = m(h / 2.0);
  const double r = (4.0 * m2 - m1) / 3.0;
  if (err) *err = std::max(*err, std::abs(r - m2));
  return r;
}

}  // namespace

FormValue to_form(const LiftValue& v) {
  FormValue f;
  f.p = v.p;
  f.q = v.q;
  f.wedges = v.wedges;
  for (const auto& c : v.components) f.components.push_back(c.real());
  f.error = v.error;
  return f;
}

FormValue form_difference(const FormValue& a, const FormValue& b) {
  std::map<FockForm::Wedge, double> m;
  for (size_t i = 0; i < a.wedges.size(); ++i) m[a.wedges[i]] += a.components[i];
  for (size_t i = 0; i < b.wedges.size(); ++i) m[b.wedges[i]] -= b.components[i];
  FormValue d = from_map(a.p, a.q, m);
  d.error = a.error + b.error;
  return d;
}

FormValue dc_from_gradient(int p, const std::vector<double>& grad) {
  const int q = 2;
  std::map<FockForm::Wedge, double> m;
  for (int a = 1; a <= p; ++a) {
    const int b1 = (a - 1) * q, b2 = (a - 1) * q + 1;  // w(a,p+1), w(a,p+2)
    m[1u << b2] += grad[b1] / (4.0 * kPi);
    m[1u << b1] -= grad[b2] / (4.0 * kPi);
  }
  return from_map(p, q, m);
}

FormValue kahler_form(int p) {
  std::map<FockForm::Wedge, double> m;
  const FockForm omega = build_kahler(p);
  for (const auto& [key, c] : omega.terms()) {
    if (key.first != 0) throw std::logic_error("Kahler form has a polynomial part");
    m[key.second] += c.to_complex().real();
  }
  return from_map(p, 2, m);
}

FormValue lift_dc(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt) {
  if (z.q != 2) throw std::invalid_argument("d^c needs q = 2");
  ThetaKernel k = make_kernel("phi0", z.p, z.q);
  LiftPlan plan = make_lift_plan(k, f, z, opt, 0.05);
  Eval ev = [&](const GrassmannPoint& x) { return std::vector<double>{lift_eval(k, f, x, opt, &plan).value()}; };
  std::vector<double> grad;
  double err = 0.0;
  for (const Gen& g : generators(z.p, z.q)) grad.push_back(first_derivative(ev, z, g, opt.fd_step, &err)[0]);
  FormValue out = dc_from_gradient(z.p, grad);
  out.error = err / (4.0 * kPi) + plan.quad_error;
  return out;
}

FormValue lambda_B(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt) {
  if (z.q != 2) throw std::invalid_argument("dd^c needs q = 2");
  ThetaKernel k = make_kernel("phi0", z.p, z.q);
  LiftPlan plan = make_lift_plan(k, f, z, opt, 0.05);
  auto ev = [&](const GrassmannPoint& x) { return lift_eval(k, f, x, opt, &plan).value(); };
  const auto gens = generators(z.p, z.q);
  const size_t ng = gens.size();
  std::vector<std::vector<double>> hess(ng, std::vector<double>(ng, 0.0));
  double err = 0.0;
  for (size_t i = 0; i < ng; ++i)
    for (size_t j = i; j < ng; ++j) hess[i][j] = hess[j][i] = mixed_derivative(ev, z, gens[i], gens[j], opt.fd_step, &err);
  std::map<FockForm::Wedge, double> m;
  for (size_t i = 0; i < ng; ++i) add_wedge(m, gens[i].bit, dc_from_gradient(z.p, hess[i]));
  FormValue out = from_map(z.p, z.q, m);
  out.error = err / (4.0 * kPi) + plan.quad_error;
  return out;
}

FormValue lift_psi_d(const WeakMaassForm& f, const GrassmannPoint& z, const LiftOptions& opt) {
  ThetaKernel k = make_kernel("psi", z.p, z.q);
  LiftPlan plan = make_lift_plan(k, f, z, opt, 0.05);
  const auto wedges = k.wedges();
  Eval ev = [&](const GrassmannPoint& x) {
    LiftValue v = lift_eval(k, f, x, opt, &plan);
    std::vector<double> r;
    for (const auto& c : v.components) r.push_back(c.real());
    return r;
  };
  std::map<FockForm::Wedge, double> m;
  double err = 0.0;
  for (const Gen& g : generators(z.p, z.q)) {
    FormValue eta;
    eta.p = z.p;
    eta.q = z.q;
    eta.wedges = wedges;
    eta.components = first_derivative(ev, z, g, opt.fd_step, &err);
    add_wedge(m, g.bit, eta);
  }
  FormValue out = from_map(z.p, z.q, m);
  out.error = err + plan.quad_error;
  return out;
}

GrassmannPoint wall_point(const Lattice& lat, const Eigen::VectorXd& lambda, unsigned seed) {
  const int n = lat.rank(), p = lat.p, q = lat.q;
  Eigen::MatrixXd G(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) G(i, j) = static_cast<double>(lat.gram[i][j]);
  auto bil = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) { return a.dot(G * b); };
  const double ll = bil(lambda, lambda);
  if (!(ll > 0)) throw std::invalid_argument("wall vector must have positive norm");
  Eigen::MatrixXd base = base_frame(lat);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd(0.0, 0.3);
  Eigen::MatrixXd f(n, n);
  std::vector<double> sq(n, 0.0);
  f.col(0) = lambda / std::sqrt(ll);
  sq[0] = 1.0;
  auto orth = [&](Eigen::VectorXd v, int upto) {
    for (int j = 0; j < upto; ++j) v -= sq[j] * bil(v, f.col(j)) * f.col(j);
    return v;
  };
  // negative directions first, then the remaining positive ones
  int done = 1;
  for (int m = 0; m < q; ++m) {
    for (int attempt = 0;; ++attempt) {
      if (attempt > 100) throw std::runtime_error("could not build a wall point");
      Eigen::VectorXd r = base.col(p + m);
      for (int i = 0; i < n; ++i) r(i) += nd(rng);
      r = orth(r, done);
      const double rr = bil(r, r);
      if (rr < -1e-3) {
        f.col(done) = r / std::sqrt(-rr);
        sq[done] = -1.0;
        break;
      }
    }
    ++done;
  }
  for (int e = 0; e < n && done < n; ++e) {
    Eigen::VectorXd r = orth(Eigen::VectorXd::Unit(n, e) + 0.1 * base.col(e % n), done);
    const double rr = bil(r, r);
    if (rr > 1e-6) {
      f.col(done) = r / std::sqrt(rr);
      sq[done] = 1.0;
      ++done;
    }
  }
  if (done < n) throw std::runtime_error("could not build a wall point");
  // reorder to positive first
  Eigen::MatrixXd frame(n, n);
  int c = 0;
  for (int j = 0; j < n; ++j)
    if (sq[j] > 0) frame.col(c++) = f.col(j);
  for (int j = 0; j < n; ++j)
    if (sq[j] < 0) frame.col(c++) = f.col(j);
  return grassmann_from_frame(lat, frame, 1e-8);
}

JumpReport jump_check(const WeakMaassForm& f, const GrassmannPoint& z_wall, const Eigen::VectorXd& lambda, int alpha,
                      double delta, const LiftOptions& opt) {
  if (z_wall.q != 1) throw std::invalid_argument("the jump check needs q = 1");
  const int mu = z_wall.p + 1;
  ThetaKernel k = make_kernel("psi", z_wall.p, z_wall.q);
  SingularLocusReport on = singular_set(f, z_wall, 1e-10);
  JumpReport rep;
  // vectors on the wall must all be multiples of lambda
  const double ll = lambda.dot(z_wall.gram * lambda);
  Eigen::VectorXd G = z_wall.gram * lambda;
  if (alpha < 1 || alpha > z_wall.p) throw std::invalid_argument("flow index out of range");
  if (std::abs(z_wall.frame.col(alpha - 1).dot(G)) < 1e-6 * std::sqrt(std::abs(ll)))
    throw std::invalid_argument("path does not cross the wall transversally");
  const auto zp = flow(z_wall, alpha, mu, delta), zm = flow(z_wall, alpha, mu, -delta);
  for (const auto& e : on.entries) {
    Eigen::VectorXd m = Eigen::Map<const Eigen::VectorXd>(e.lambda.data(), static_cast<Eigen::Index>(e.lambda.size()));
    Eigen::VectorXd perp = m - (m.dot(G) / ll) * lambda;
    if (perp.cwiseAbs().maxCoeff() > 1e-8) throw std::invalid_argument("path crosses more than one wall");
    auto sgn = [&](const GrassmannPoint& z) {
      const double s = z.frame.col(z.p + z.q - 1).dot(z.gram * m);
      return s > 0 ? 1.0 : (s < 0 ? -1.0 : 0.0);
    };
    rep.predicted += coeff(f.plus, e.h, e.n).real() * (sgn(zp) - sgn(zm)) / 2.0;
    ++rep.wall_vectors;
  }
  LiftPlan plan = make_lift_plan(k, f, z_wall, opt, 0.1 + 4.0 * std::abs(delta));
  auto phi = [&](double t) { return lift_eval(k, f, flow(z_wall, alpha, mu, t), opt, &plan).value(); };
  auto D = [&](double s) { return phi(s) - phi(-s); };
  const double d1 = D(delta), dh = D(delta / 2.0), d2 = D(2.0 * delta);
  rep.measured_raw = d1;
  rep.measured = 2.0 * dh - d1;
  rep.measured_double = 2.0 * d1 - d2;
  rep.left = phi(-delta);
  rep.right = phi(delta);
  rep.relative_error = rep.predicted != 0.0
                           ? std::abs(std::abs(rep.measured) - std::abs(rep.predicted)) / std::abs(rep.predicted)
                           : std::abs(rep.measured);
  return rep;
}

LogSingularityReport log_singularity_check(const WeakMaassForm& f, const std::function<GrassmannPoint(double)>& path,
                                           const Eigen::VectorXd& lambda, int multiplicity, double tmin, double tmax,
                                           int steps, const LiftOptions& opt, double bound) {
  if (!(tmin > 0) || !(tmax > tmin) || steps < 2) throw std::invalid_argument("bad path parameters");
  LogSingularityReport rep;
  for (int i = 0; i < steps; ++i) {
    const double t = tmax * std::pow(tmin / tmax, static_cast<double>(i) / (steps - 1));
    GrassmannPoint z = path(t);
    const double d = z.negative_length(lambda);
    if (d < 1e-12) throw std::invalid_argument("path meets the wall");
    const double val = lift_phi0(f, z, opt).value();
    rep.t.push_back(t);
    rep.value.push_back(val);
    rep.dist.push_back(d);
    rep.corrected.push_back(val + 2.0 * multiplicity * std::log(d));
  }
  for (size_t i = 1; i < rep.corrected.size(); ++i) rep.variation += std::abs(rep.corrected[i] - rep.corrected[i - 1]);
  rep.bounded = rep.variation < bound;
  return rep;
}

cplx klein_j(cplx z) {
  if (!(z.imag() > 0)) throw std::invalid_argument("j needs Im z > 0");
  for (int it = 0; it < 1000; ++it) {
    z -= std::round(z.real());
    if (std::norm(z) < 1.0 - 1e-15)
      z = -1.0 / z;
    else
      break;
  }
  static const std::vector<double> coeffs = [] {
    LaurentSeries j = j_series(60);
    std::vector<double> c;
    for (int n = -1; n < 60; ++n) c.push_back(j.coeff(n).get_d());
    return c;
  }();
  const cplx q = std::exp(cplx(0, 2.0 * kPi) * z);
  cplx acc = 0.0, qn = 1.0 / q;
  for (double c : coeffs) {
    acc += c * qn;
    qn *= q;
  }
  return acc;
}

}  // namespace thetalab
