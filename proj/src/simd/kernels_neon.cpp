#include <arm_neon.h>

#include "kernels_internal.hpp"

namespace xaif::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double sum = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void dot_rows_neon(const double* matrix, std::size_t rows, std::size_t dim, const double* query,
                   double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_neon(matrix + r * dim, query, dim);
}

void rank1_update_upper_neon(double weight, const double* x, double* gram, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weight * x[i];
    if (wi == 0.0) continue;
    axpy_neon(wi, x + i, gram + i * n + i, n - i);
  }
}

constexpr KernelTable kNeon{Level::neon, dot_neon, axpy_neon, dot_rows_neon,
                            rank1_update_upper_neon};

}  // namespace

const KernelTable& neon_table() { return kNeon; }

}  // namespace xaif::simd::detail
