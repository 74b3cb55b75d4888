#include <cmath>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "thetalab/gauss_sum.hpp"

namespace thetalab::simd {

bool backend_available(Backend b) {
  if (b == Backend::scalar) return true;
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Backend active_backend() {
  static const Backend chosen = [] {
    const char* env = std::getenv("THETALAB_SIMD");
    if (env && std::strcmp(env, "scalar") == 0) return Backend::scalar;
    return backend_available(Backend::avx2) ? Backend::avx2 : Backend::scalar;
  }();
  return chosen;
}

const char* backend_name(Backend b) { return b == Backend::avx2 ? "avx2" : "scalar"; }

void gauss_weighted_sums_scalar(const double* m, std::size_t n, double c, const double* w, std::size_t K,
                                std::size_t stride, double* out) {
  for (std::size_t k = 0; k < K; ++k) out[k] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = std::exp(-c * m[i]);
    for (std::size_t k = 0; k < K; ++k) out[k] += w[k * stride + i] * g;
  }
}

void gauss_weighted_sums(const double* m, std::size_t n, double c, const double* w, std::size_t K, std::size_t stride,
                         double* out, Backend b) {
  if (b == Backend::avx2) {
    if (!backend_available(b)) throw std::runtime_error("avx2 backend not available on this CPU");
    gauss_weighted_sums_avx2(m, n, c, w, K, stride, out);
  } else {
    gauss_weighted_sums_scalar(m, n, c, w, K, stride, out);
  }
}

}  // namespace thetalab::simd
