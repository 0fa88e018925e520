#include <atomic>
#include <cstdlib>
#include <string>

#include "kernels_internal.hpp"
#include "xaif/errors.hpp"

namespace xaif::simd {
namespace {

bool cpu_has_avx2() {
#if defined(XAIF_HAVE_AVX2_KERNELS) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* table_for(Level level) {
  switch (level) {
    case Level::scalar:
      return &detail::scalar_table();
    case Level::avx2:
      return avx2_kernels();
    case Level::neon:
      return neon_kernels();
  }
  return nullptr;
}

const KernelTable* initial_table() {
  Level level = best_supported_level();
  if (const char* env = std::getenv("XAIF_SIMD")) {
    const std::string requested{env};
    if (requested == "scalar") {
      level = Level::scalar;
    } else if (requested == "avx2" && is_supported(Level::avx2)) {
      level = Level::avx2;
    } else if (requested == "neon" && is_supported(Level::neon)) {
      level = Level::neon;
    }
  }
  return table_for(level);
}

std::atomic<const KernelTable*>& active_slot() {
  static std::atomic<const KernelTable*> slot{initial_table()};
  return slot;
}

}  // namespace

std::string_view to_string(Level level) {
  switch (level) {
    case Level::scalar:
      return "scalar";
    case Level::avx2:
      return "avx2";
    case Level::neon:
      return "neon";
  }
  return "unknown";
}

const KernelTable& scalar_kernels() { return detail::scalar_table(); }

const KernelTable* avx2_kernels() {
#if defined(XAIF_HAVE_AVX2_KERNELS)
  static const bool supported = cpu_has_avx2();
  return supported ? &detail::avx2_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable* neon_kernels() {
#if defined(XAIF_HAVE_NEON_KERNELS)
  return &detail::neon_table();  // NEON is baseline on aarch64
#else
  return nullptr;
#endif
}

bool is_supported(Level level) { return table_for(level) != nullptr; }

Level best_supported_level() {
  if (avx2_kernels() != nullptr) return Level::avx2;
  if (neon_kernels() != nullptr) return Level::neon;
  return Level::scalar;
}

const KernelTable& active() { return *active_slot().load(std::memory_order_acquire); }

void set_active_level(Level level) {
  const KernelTable* table = table_for(level);
  if (table == nullptr) {
    throw ParameterError("SIMD level '" + std::string(to_string(level)) +
                         "' is not available on this machine");
  }
  active_slot().store(table, std::memory_order_release);
}

}  // namespace xaif::simd
