#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "catbranch/rng.hpp"
#include "catbranch/simd/scalar_math.hpp"

namespace catbranch::simd {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa);

/// Structure-of-arrays state for a contiguous block of replications.
struct SystemLanes {
  double* x = nullptr;
  double* y = nullptr;
  double* eta = nullptr;
  double* x_sum = nullptr;  // optional: accumulates pre-step catalyst values
};

/// Advances `lanes` replications [rep_begin, rep_begin + lanes) through steps
/// [step_begin, step_begin + steps). Normals for (rep, step) come from normal_pair.
using AdvanceSystemFn = void (*)(const SystemCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin,
                                 std::size_t lanes, std::uint64_t step_begin, std::uint64_t steps,
                                 const SystemLanes& state);

using AdvanceAveragedFn = void (*)(const AveragedCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin,
                                   std::size_t lanes, std::uint64_t step_begin, std::uint64_t steps, double* y);

/// Fills xi[i], zeta[i] with normal_pair(key, rep_begin + i, step).
using NormalBlockFn = void (*)(const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes, std::uint64_t step,
                               double* xi, double* zeta);

struct KernelSet {
  Isa isa;
  AdvanceSystemFn advance_system;
  AdvanceAveragedFn advance_averaged;
  NormalBlockFn normal_block;
};

bool isa_supported(Isa isa);

/// Kernel set for a specific instruction set; throws if unsupported on this CPU or build.
const KernelSet& kernels_for(Isa isa);

/// Best supported set, unless overridden with force_isa.
const KernelSet& active_kernels();

/// Pins the active set (std::nullopt restores runtime detection).
void force_isa(std::optional<Isa> isa);

// Per-ISA entry points.
const KernelSet& scalar_kernels();
#if defined(CATBRANCH_HAVE_AVX2)
const KernelSet& avx2_kernels();
#endif

}  // namespace catbranch::simd
