#include "thetalab/specfun.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace thetalab {

namespace {
constexpr double kEps = 1e-16;

bool is_nonpos_integer(double a) { return a <= 0 && a == std::floor(a); }

// Modified Lentz for e^x x^{-a} Gamma(a,x); good for x >= 1.
double cf_scaled(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny, d = 1.0 / b, h = d;
  for (int i = 1; i < 100000; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::fabs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw std::runtime_error("incomplete gamma continued fraction did not converge");
}

// lower gamma(a,x) for a > 0 by the power series
double lower_series(double a, double x) {
  double ap = a, del = 1.0 / a, sum = del;
  for (int n = 0; n < 100000; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::fabs(del) < std::fabs(sum) * kEps) return sum * std::exp(-x + a * std::log(x));
  }
  throw std::runtime_error("incomplete gamma series did not converge");
}

double e1_series(double x) {
  double sum = 0.0, term = 1.0;
  for (int n = 1; n < 1000; ++n) {
    term *= -x / n;
    const double add = term / n;
    sum += add;
    if (std::fabs(add) < kEps * std::fabs(sum)) break;
  }
  return -std::numbers::egamma - std::log(x) - sum;
}

// Gamma(a, x) off the continued-fraction region
double small_x(double a, double x) {
  if (a > 0) return std::tgamma(a) - lower_series(a, x);
  if (a == 0) return e1_series(x);
  // downward recurrence Gamma(a,x) = (Gamma(a+1,x) - x^a e^{-x}) / a from a+m in [0,1)
  const int m = static_cast<int>(std::ceil(-a));
  double s = a + m;
  double g = (s == 0.0) ? e1_series(x) : small_x(s, x);
  for (int i = m - 1; i >= 0; --i) {
    const double ai = a + i;
    g = (g - std::exp(ai * std::log(x) - x)) / ai;
  }
  return g;
}
}  // namespace

bool use_cf(double a, double x) { return x >= 1.0 && !(a > 0 && x < a + 1.0); }

double upper_gamma_escaled(double a, double x) {
  if (!(x > 0)) throw std::domain_error("upper_gamma needs x > 0");
  if (use_cf(a, x)) return std::exp(a * std::log(x)) * cf_scaled(a, x);
  return std::exp(x) * small_x(a, x);
}

double upper_gamma(double a, double x) {
  if (!(x > 0)) throw std::domain_error("upper_gamma needs x > 0");
  if (use_cf(a, x)) return std::exp(a * std::log(x) - x) * cf_scaled(a, x);
  return small_x(a, x);
}

double expint_e1(double x) { return upper_gamma(0.0, x); }

double H_function(double k, double w) {
  if (w == 0.0) throw std::domain_error("H undefined at 0");
  if (w < 0) {
    // e^{-w} Gamma(1-k, 2|w|) = e^{-|w|} * [e^{2|w|} Gamma(1-k, 2|w|)]
    const double x = -2.0 * w;
    return std::exp(w) * upper_gamma_escaled(1.0 - k, x);
  }
  if (!is_nonpos_integer(k)) throw std::domain_error("H(w) for w > 0 needs integer k <= 0");
  const int m = static_cast<int>(-k);
  // m! e^{w} sum_{j<=m} (-2w)^j / j!
  double term = 1.0, sum = 1.0, fact = 1.0;
  for (int j = 1; j <= m; ++j) {
    term *= -2.0 * w / j;
    sum += term;
    fact *= j;
  }
  return fact * std::exp(w) * sum;
}

const QuadRule& gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (slot) return *slot;
  if (n < 1) throw std::invalid_argument("gauss_legendre needs n >= 1");
  auto rule = std::make_unique<QuadRule>();
  rule->x.resize(n);
  rule->w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = z;
      for (int j = 2; j <= n; ++j) {
        const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (z * p1 - p0) / (z * z - 1.0);
      const double dz = p1 / dp;
      z -= dz;
      if (std::fabs(dz) < 1e-16) break;
    }
    double p0 = 1.0, p1 = z;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * z * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (z * p1 - p0) / (z * z - 1.0);
    const double wt = 2.0 / ((1.0 - z * z) * dp * dp);
    rule->x[i] = -z;
    rule->x[n - 1 - i] = z;
    rule->w[i] = rule->w[n - 1 - i] = wt;
  }
  slot = std::move(rule);
  return *slot;
}

}  // namespace thetalab
