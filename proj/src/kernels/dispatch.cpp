#include <atomic>
#include <stdexcept>
#include <string>

#include "catbranch/simd/kernels.hpp"

namespace catbranch::simd {

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return "scalar";
    case Isa::kAvx2: return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::kScalar: return true;
    case Isa::kAvx2:
#if defined(CATBRANCH_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
  }
  return false;
}

const KernelSet& kernels_for(Isa isa) {
  if (!isa_supported(isa)) throw std::runtime_error("kernel set '" + std::string(isa_name(isa)) + "' not supported here");
#if defined(CATBRANCH_HAVE_AVX2)
  if (isa == Isa::kAvx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

namespace {

// -1: runtime detection; otherwise the forced Isa value.
std::atomic<int> g_forced{-1};

}  // namespace

void force_isa(std::optional<Isa> isa) {
  if (isa) kernels_for(*isa);
  g_forced.store(isa ? static_cast<int>(*isa) : -1);
}

const KernelSet& active_kernels() {
  const int forced = g_forced.load();
  if (forced >= 0) return kernels_for(static_cast<Isa>(forced));
  static const KernelSet& detected = isa_supported(Isa::kAvx2) ? kernels_for(Isa::kAvx2) : scalar_kernels();
  return detected;
}

}  // namespace catbranch::simd
