#pragma once

// Dense double-precision kernels used by the embedding scan, the logistic
// victim and the surrogate fit. Each kernel has a scalar reference and
// optional vectorised variants; the active table is chosen once at startup
// from the CPU feature bits and can be overridden with XAIF_SIMD=scalar|avx2|neon.

#include <cstddef>
#include <span>
#include <string_view>

namespace xaif::simd {

enum class Level { scalar, avx2, neon };

std::string_view to_string(Level level);

struct KernelTable {
  Level level;
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // out[r] = dot(matrix[r, :], query) for a row-major rows x dim matrix
  void (*dot_rows)(const double* matrix, std::size_t rows, std::size_t dim, const double* query,
                   double* out);
  // gram[i, j] += weight * x[i] * x[j] over the upper triangle (j >= i), row-major n x n
  void (*rank1_update_upper)(double weight, const double* x, double* gram, std::size_t n);
};

const KernelTable& scalar_kernels();
// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* avx2_kernels();
const KernelTable* neon_kernels();

Level best_supported_level();
bool is_supported(Level level);

const KernelTable& active();
// Throws xaif::ParameterError for an unsupported level.
void set_active_level(Level level);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace xaif::simd
