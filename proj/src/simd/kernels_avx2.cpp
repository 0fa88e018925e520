// Compiled with -mavx2 -mfma; only reached through the dispatcher after a CPU check.
#include <immintrin.h>

#include "kernels_internal.hpp"

namespace xaif::simd::detail {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d pair = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(pair, _mm_unpackhi_pd(pair, pair)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  if (i + 4 <= n) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    i += 4;
  }
  double sum = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot_rows_avx2(const double* matrix, std::size_t rows, std::size_t dim, const double* query,
                   double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_avx2(matrix + r * dim, query, dim);
}

void rank1_update_upper_avx2(double weight, const double* x, double* gram, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weight * x[i];
    if (wi == 0.0) continue;
    axpy_avx2(wi, x + i, gram + i * n + i, n - i);
  }
}

constexpr KernelTable kAvx2{Level::avx2, dot_avx2, axpy_avx2, dot_rows_avx2,
                            rank1_update_upper_avx2};

}  // namespace

const KernelTable& avx2_table() { return kAvx2; }

}  // namespace xaif::simd::detail
