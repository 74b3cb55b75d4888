#include "doctest.h"

#include <random>
#include <vector>

#include "thetalab/gauss_sum.hpp"

using namespace thetalab;

namespace {

// long double reference for the same sums
std::vector<long double> naive(const std::vector<double>& m, double c, const std::vector<double>& w, size_t K,
                               size_t stride) {
  std::vector<long double> out(K, 0.0L);
  for (size_t k = 0; k < K; ++k)
    for (size_t i = 0; i < m.size(); ++i)
      out[k] += static_cast<long double>(w[k * stride + i]) * std::exp(-static_cast<long double>(c) * m[i]);
  return out;
}

}  // namespace

TEST_CASE("gauss weighted sums: scalar and AVX2 match a long double reference") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> M(0.0, 40.0), W(-3.0, 3.0), C(0.05, 2.0);
  for (size_t n : {0u, 1u, 3u, 4u, 7u, 64u, 513u}) {
    const size_t K = 1 + n % 5, stride = n + 3;
    std::vector<double> m(n), w(K * stride);
    for (auto& x : m) x = M(rng);
    for (auto& x : w) x = W(rng);
    const double c = C(rng);
    auto ref = naive(m, c, w, K, stride);
    std::vector<double> a(K), b(K);
    simd::gauss_weighted_sums_scalar(m.data(), n, c, w.data(), K, stride, a.data());
    double scale = 0;
    for (size_t i = 0; i < n; ++i) scale += std::exp(-c * m[i]) * 3.0;
    for (size_t k = 0; k < K; ++k) CHECK(std::abs(a[k] - static_cast<double>(ref[k])) <= 1e-14 * std::max(1.0, scale));
    if (simd::backend_available(simd::Backend::avx2)) {
      simd::gauss_weighted_sums_avx2(m.data(), n, c, w.data(), K, stride, b.data());
      for (size_t k = 0; k < K; ++k) CHECK(std::abs(b[k] - static_cast<double>(ref[k])) <= 1e-14 * std::max(1.0, scale));
    }
  }
}

TEST_CASE("vectorised exp stays accurate deep into the tail") {
  if (!simd::backend_available(simd::Backend::avx2)) return;
  for (double mm : {0.0, 1e-3, 5.0, 200.0, 700.0, 745.0, 800.0}) {
    std::vector<double> m(8, mm), w(8, 1.0);
    double out = 0;
    simd::gauss_weighted_sums_avx2(m.data(), 8, 1.0, w.data(), 1, 8, &out);
    const double expect = 8.0 * std::exp(-mm);
    CAPTURE(mm);
    CHECK(std::abs(out - expect) <= 4e-16 * expect + 1e-320);
  }
}

TEST_CASE("backend selection") {
  CHECK(simd::backend_available(simd::Backend::scalar));
  CHECK(std::string(simd::backend_name(simd::Backend::scalar)) == "scalar");
  const auto b = simd::active_backend();
  CHECK(simd::backend_available(b));
}
