#pragma once
// out[k] = sum_i w[k*stride + i] * exp(-c * m[i]), the inner loop of every lattice sum.
#include <cstddef>

namespace thetalab::simd {

enum class Backend { scalar, avx2 };

// AVX2+FMA when the CPU has it, unless THETALAB_SIMD=scalar is set.
Backend active_backend();
const char* backend_name(Backend b);
bool backend_available(Backend b);

void gauss_weighted_sums(const double* m, std::size_t n, double c, const double* w, std::size_t K, std::size_t stride,
                         double* out, Backend b);
inline void gauss_weighted_sums(const double* m, std::size_t n, double c, const double* w, std::size_t K,
                                std::size_t stride, double* out) {
  gauss_weighted_sums(m, n, c, w, K, stride, out, active_backend());
}

void gauss_weighted_sums_scalar(const double* m, std::size_t n, double c, const double* w, std::size_t K,
                                std::size_t stride, double* out);
void gauss_weighted_sums_avx2(const double* m, std::size_t n, double c, const double* w, std::size_t K,
                              std::size_t stride, double* out);

}  // namespace thetalab::simd
