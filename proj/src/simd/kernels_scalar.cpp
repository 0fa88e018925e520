#include "kernels_internal.hpp"

namespace xaif::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) sum += a[i] * b[i];
  return sum;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void dot_rows_scalar(const double* matrix, std::size_t rows, std::size_t dim, const double* query,
                     double* out) {
  for (std::size_t r = 0; r < rows; ++r) out[r] = dot_scalar(matrix + r * dim, query, dim);
}

void rank1_update_upper_scalar(double weight, const double* x, double* gram, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = weight * x[i];
    if (wi == 0.0) continue;
    double* row = gram + i * n;
    for (std::size_t j = i; j < n; ++j) row[j] += wi * x[j];
  }
}

constexpr KernelTable kScalar{Level::scalar, dot_scalar, axpy_scalar, dot_rows_scalar,
                              rank1_update_upper_scalar};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

}  // namespace xaif::simd::detail
