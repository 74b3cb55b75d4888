#include <cmath>

#include "thetalab/gauss_sum.hpp"

#if defined(__x86_64__) || defined(__i386__)
#include <immintrin.h>

namespace thetalab::simd {

namespace {
// exp(x) for x <= 0; flushes to 0 below -708. Cody-Waite reduction, degree-13 Taylor on |r| <= ln2/2.
__attribute__((target("avx2,fma"))) inline __m256d exp_nonpos(__m256d x) {
  const __m256d lo = _mm256_set1_pd(-708.0);
  const __m256d under = _mm256_cmp_pd(x, lo, _CMP_LT_OQ);
  x = _mm256_max_pd(x, lo);
  const __m256d n = _mm256_round_pd(_mm256_mul_pd(x, _mm256_set1_pd(1.4426950408889634)),
                                    _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(n, _mm256_set1_pd(6.93147180369123816490e-01), x);
  r = _mm256_fnmadd_pd(n, _mm256_set1_pd(1.90821492927058770002e-10), r);
  __m256d p = _mm256_set1_pd(1.0 / 6227020800.0);
  const double inv_fact[] = {1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0, 1.0 / 40320.0,
                             1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,      1.0 / 24.0,     1.0 / 6.0,
                             0.5,               1.0,              1.0};
  for (double f : inv_fact) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(f));
  // scale by 2^n through the exponent field
  const __m128i ni = _mm256_cvtpd_epi32(n);
  __m256i e = _mm256_cvtepi32_epi64(ni);
  e = _mm256_slli_epi64(_mm256_add_epi64(e, _mm256_set1_epi64x(1023)), 52);
  const __m256d res = _mm256_mul_pd(p, _mm256_castsi256_pd(e));
  return _mm256_andnot_pd(under, res);
}
}  // namespace

__attribute__((target("avx2,fma"))) void gauss_weighted_sums_avx2(const double* m, std::size_t n, double c,
                                                                  const double* w, std::size_t K, std::size_t stride,
                                                                  double* out) {
  // weights are consumed in blocks of up to 8 accumulators; exp is recomputed per block
  constexpr std::size_t kBlock = 8;
  const __m256d negc = _mm256_set1_pd(-c);
  for (std::size_t k0 = 0; k0 < K; k0 += kBlock) {
    const std::size_t kb = K - k0 < kBlock ? K - k0 : kBlock;
    __m256d acc[kBlock];
    for (std::size_t k = 0; k < kb; ++k) acc[k] = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
      const __m256d g = exp_nonpos(_mm256_mul_pd(negc, _mm256_loadu_pd(m + i)));
      for (std::size_t k = 0; k < kb; ++k)
        acc[k] = _mm256_fmadd_pd(_mm256_loadu_pd(w + (k0 + k) * stride + i), g, acc[k]);
    }
    for (std::size_t k = 0; k < kb; ++k) {
      alignas(32) double lanes[4];
      _mm256_store_pd(lanes, acc[k]);
      out[k0 + k] = (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
    }
    for (; i < n; ++i) {
      const double g = std::exp(-c * m[i]);
      for (std::size_t k = 0; k < kb; ++k) out[k0 + k] += w[(k0 + k) * stride + i] * g;
    }
  }
}

}  // namespace thetalab::simd

#else

namespace thetalab::simd {
void gauss_weighted_sums_avx2(const double* m, std::size_t n, double c, const double* w, std::size_t K,
                              std::size_t stride, double* out) {
  gauss_weighted_sums_scalar(m, n, c, w, K, stride, out);
}
}  // namespace thetalab::simd

#endif
