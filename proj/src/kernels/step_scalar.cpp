#include "catbranch/simd/kernels.hpp"
#include <tuple>

namespace catbranch::simd {

namespace {

void advance_system_scalar(const SystemCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes,
                           std::uint64_t step_begin, std::uint64_t steps, const SystemLanes& st) {
  for (std::size_t i = 0; i < lanes; ++i) {
    const std::uint64_t rep = rep_begin + i;
    double x = st.x[i], y = st.y[i], eta = st.eta[i];
    double xsum = st.x_sum ? st.x_sum[i] : 0.0;
    for (std::uint64_t s = step_begin; s < step_begin + steps; ++s) {
      double xi = 0.0, zeta = 0.0;
      if (k.noise) std::tie(xi, zeta) = normal_pair(key, rep, s);
      xsum += x;
      system_step(k, x, y, eta, xi, zeta);
    }
    st.x[i] = x;
    st.y[i] = y;
    st.eta[i] = eta;
    if (st.x_sum) st.x_sum[i] = xsum;
  }
}

void advance_averaged_scalar(const AveragedCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin,
                             std::size_t lanes, std::uint64_t step_begin, std::uint64_t steps, double* y) {
  for (std::size_t i = 0; i < lanes; ++i) {
    const std::uint64_t rep = rep_begin + i;
    double v = y[i];
    for (std::uint64_t s = step_begin; s < step_begin + steps; ++s) {
      const double zeta = k.noise ? normal_pair(key, rep, s).first : 0.0;
      averaged_step(k, v, zeta);
    }
    y[i] = v;
  }
}

void normal_block_scalar(const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes, std::uint64_t step,
                         double* xi, double* zeta) {
  for (std::size_t i = 0; i < lanes; ++i) std::tie(xi[i], zeta[i]) = normal_pair(key, rep_begin + i, step);
}

}  // namespace

const KernelSet& scalar_kernels() {
  static const KernelSet set{Isa::kScalar, advance_system_scalar, advance_averaged_scalar, normal_block_scalar};
  return set;
}

}  // namespace catbranch::simd
