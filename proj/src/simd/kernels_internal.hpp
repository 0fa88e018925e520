#pragma once

#include "xaif/simd/kernels.hpp"

namespace xaif::simd::detail {

const KernelTable& scalar_table();
#if defined(XAIF_HAVE_AVX2_KERNELS)
const KernelTable& avx2_table();
#endif
#if defined(XAIF_HAVE_NEON_KERNELS)
const KernelTable& neon_table();
#endif

}  // namespace xaif::simd::detail
