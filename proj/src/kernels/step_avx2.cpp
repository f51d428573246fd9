// AVX2 variants of the Euler step kernels: four replications per register.
// Each lane performs exactly the scalar operation sequence of scalar_math.hpp.

#include <immintrin.h>
#include <initializer_list>

#include "catbranch/simd/kernels.hpp"

namespace catbranch::simd {

namespace {

constexpr std::size_t kWidth = 4;

struct Normals4 {
  __m256d xi;
  __m256d zeta;
};

inline __m256i mask32() { return _mm256_set1_epi64x(0xFFFFFFFFll); }

inline __m256d uniform_open4(__m256i bits) {
  const __m256i v = _mm256_srli_epi64(bits, 12);
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  const __m256d d = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, _mm256_castpd_si256(magic))), magic);
  return _mm256_mul_pd(_mm256_add_pd(d, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1.0p-52));
}

inline __m256d log4(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  const __m256i e = _mm256_srli_epi64(bits, 52);
  const __m256d biased = _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(e, _mm256_castpd_si256(magic))), magic);
  __m256d m = _mm256_castsi256_pd(_mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(0x000FFFFFFFFFFFFFll)),
                                                  _mm256_set1_epi64x(0x3FF0000000000000ll)));
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  const __m256d k = _mm256_add_pd(_mm256_sub_pd(biased, _mm256_set1_pd(1023.0)), _mm256_and_pd(big, _mm256_set1_pd(1.0)));
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d f = _mm256_sub_pd(m, one);
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  const __m256d w = _mm256_mul_pd(z, z);
  const __m256d t1 = _mm256_mul_pd(
      w, _mm256_add_pd(_mm256_set1_pd(kLg2),
                       _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg4), _mm256_mul_pd(w, _mm256_set1_pd(kLg6))))));
  const __m256d t2 = _mm256_mul_pd(
      z, _mm256_add_pd(
             _mm256_set1_pd(kLg1),
             _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg3),
                                            _mm256_mul_pd(w, _mm256_add_pd(_mm256_set1_pd(kLg5),
                                                                           _mm256_mul_pd(w, _mm256_set1_pd(kLg7))))))));
  const __m256d r = _mm256_add_pd(t2, t1);
  const __m256d hfsq = _mm256_mul_pd(_mm256_mul_pd(_mm256_set1_pd(0.5), f), f);
  const __m256d inner = _mm256_add_pd(_mm256_mul_pd(s, _mm256_add_pd(hfsq, r)), _mm256_mul_pd(k, _mm256_set1_pd(kLn2Lo)));
  return _mm256_sub_pd(_mm256_mul_pd(k, _mm256_set1_pd(kLn2Hi)), _mm256_sub_pd(_mm256_sub_pd(hfsq, inner), f));
}

inline void sincos_2pi4(__m256d v, __m256d& so, __m256d& co) {
  const __m256d q = _mm256_round_pd(_mm256_mul_pd(v, _mm256_set1_pd(4.0)), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  const __m256d x = _mm256_mul_pd(_mm256_sub_pd(v, _mm256_mul_pd(q, _mm256_set1_pd(0.25))), _mm256_set1_pd(kTwoPi));
  const __m256d z = _mm256_mul_pd(x, x);
  const __m256d v3 = _mm256_mul_pd(z, x);
  auto c = [](double a) { return _mm256_set1_pd(a); };
  auto horner = [&](std::initializer_list<double> cs) {
    // cs = {a0, a1, ..., am}: a0 + z * (a1 + z * (... + z * am))
    const double* p = cs.end() - 1;
    __m256d acc = c(*p);
    while (p != cs.begin()) {
      --p;
      acc = _mm256_add_pd(c(*p), _mm256_mul_pd(z, acc));
    }
    return acc;
  };
  const __m256d rs = horner({kS2, kS3, kS4, kS5, kS6});
  const __m256d s = _mm256_add_pd(x, _mm256_mul_pd(v3, _mm256_add_pd(c(kS1), _mm256_mul_pd(z, rs))));
  const __m256d rc = _mm256_mul_pd(z, horner({kC1, kC2, kC3, kC4, kC5, kC6}));
  const __m256d hz = _mm256_mul_pd(c(0.5), z);
  const __m256d w = _mm256_sub_pd(c(1.0), hz);
  const __m256d cs = _mm256_add_pd(w, _mm256_add_pd(_mm256_sub_pd(_mm256_sub_pd(c(1.0), w), hz), _mm256_mul_pd(z, rc)));
  const __m256d qm = _mm256_sub_pd(q, _mm256_and_pd(_mm256_cmp_pd(q, c(3.5), _CMP_GT_OQ), c(4.0)));
  const __m256d is1 = _mm256_cmp_pd(qm, c(1.0), _CMP_EQ_OQ);
  const __m256d is2 = _mm256_cmp_pd(qm, c(2.0), _CMP_EQ_OQ);
  const __m256d is3 = _mm256_cmp_pd(qm, c(3.0), _CMP_EQ_OQ);
  const __m256d swap = _mm256_or_pd(is1, is3);
  const __m256d sign = c(-0.0);
  so = _mm256_blendv_pd(s, cs, swap);
  co = _mm256_blendv_pd(cs, s, swap);
  so = _mm256_xor_pd(so, _mm256_and_pd(_mm256_cmp_pd(qm, c(2.0), _CMP_GE_OQ), sign));
  co = _mm256_xor_pd(co, _mm256_and_pd(_mm256_or_pd(is1, is2), sign));
}

inline Normals4 normal_pair4(const PhiloxKey& key, std::uint64_t rep_begin, std::uint64_t step) {
  const __m256i m32 = mask32();
  const __m256i reps = _mm256_add_epi64(_mm256_set1_epi64x(static_cast<long long>(rep_begin)), _mm256_set_epi64x(3, 2, 1, 0));
  __m256i c0 = _mm256_and_si256(reps, m32);
  __m256i c1 = _mm256_srli_epi64(reps, 32);
  __m256i c2 = _mm256_set1_epi64x(static_cast<long long>(step & 0xFFFFFFFFull));
  __m256i c3 = _mm256_set1_epi64x(static_cast<long long>(step >> 32));
  const __m256i mul0 = _mm256_set1_epi64x(kPhiloxM0);
  const __m256i mul1 = _mm256_set1_epi64x(kPhiloxM1);
  std::uint32_t k0 = key[0], k1 = key[1];
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      k0 += kPhiloxW0;
      k1 += kPhiloxW1;
    }
    const __m256i p0 = _mm256_mul_epu32(mul0, c0);
    const __m256i p1 = _mm256_mul_epu32(mul1, c2);
    const __m256i key0 = _mm256_set1_epi64x(k0);
    const __m256i key1 = _mm256_set1_epi64x(k1);
    const __m256i n0 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p1, 32), c1), key0);
    const __m256i n1 = _mm256_and_si256(p1, m32);
    const __m256i n2 = _mm256_xor_si256(_mm256_xor_si256(_mm256_srli_epi64(p0, 32), c3), key1);
    const __m256i n3 = _mm256_and_si256(p0, m32);
    c0 = n0;
    c1 = n1;
    c2 = n2;
    c3 = n3;
  }
  const __m256d u1 = uniform_open4(_mm256_or_si256(_mm256_slli_epi64(c1, 32), c0));
  const __m256d u2 = uniform_open4(_mm256_or_si256(_mm256_slli_epi64(c3, 32), c2));
  const __m256d r = _mm256_sqrt_pd(_mm256_mul_pd(_mm256_set1_pd(-2.0), log4(u1)));
  __m256d s, c;
  sincos_2pi4(u2, s, c);
  return {_mm256_mul_pd(r, c), _mm256_mul_pd(r, s)};
}

void normal_block_avx2(const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes, std::uint64_t step,
                       double* xi, double* zeta) {
  std::size_t i = 0;
  for (; i + kWidth <= lanes; i += kWidth) {
    const auto nz = normal_pair4(key, rep_begin + i, step);
    _mm256_storeu_pd(xi + i, nz.xi);
    _mm256_storeu_pd(zeta + i, nz.zeta);
  }
  if (i < lanes) scalar_kernels().normal_block(key, rep_begin + i, lanes - i, step, xi + i, zeta + i);
}

void advance_system_avx2(const SystemCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes,
                         std::uint64_t step_begin, std::uint64_t steps, const SystemLanes& st) {
  const __m256d drift1 = _mm256_set1_pd(k.drift1), var1 = _mm256_set1_pd(k.var1);
  const __m256d drift2 = _mm256_set1_pd(k.drift2), var2 = _mm256_set1_pd(k.var2);
  const __m256d one = _mm256_set1_pd(1.0), zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= lanes; i += kWidth) {
    __m256d x = _mm256_loadu_pd(st.x + i);
    __m256d y = _mm256_loadu_pd(st.y + i);
    __m256d eta = _mm256_loadu_pd(st.eta + i);
    __m256d xsum = st.x_sum ? _mm256_loadu_pd(st.x_sum + i) : zero;
    for (std::uint64_t s = step_begin; s < step_begin + steps; ++s) {
      Normals4 nz{zero, zero};
      if (k.noise) nz = normal_pair4(key, rep_begin + i, s);
      xsum = _mm256_add_pd(xsum, x);
      const __m256d xs =
          _mm256_add_pd(_mm256_add_pd(x, _mm256_mul_pd(drift1, x)), _mm256_mul_pd(_mm256_sqrt_pd(_mm256_mul_pd(var1, x)), nz.xi));
      const __m256d ys = _mm256_add_pd(_mm256_add_pd(y, _mm256_mul_pd(_mm256_mul_pd(drift2, x), y)),
                                       _mm256_mul_pd(_mm256_sqrt_pd(_mm256_mul_pd(_mm256_mul_pd(var2, x), y)), nz.zeta));
      const __m256d xn = _mm256_max_pd(one, xs);
      eta = _mm256_add_pd(eta, _mm256_sub_pd(xn, xs));
      x = xn;
      y = _mm256_add_pd(_mm256_max_pd(zero, ys), zero);
    }
    _mm256_storeu_pd(st.x + i, x);
    _mm256_storeu_pd(st.y + i, y);
    _mm256_storeu_pd(st.eta + i, eta);
    if (st.x_sum) _mm256_storeu_pd(st.x_sum + i, xsum);
  }
  if (i < lanes) {
    SystemLanes tail{st.x + i, st.y + i, st.eta + i, st.x_sum ? st.x_sum + i : nullptr};
    scalar_kernels().advance_system(k, key, rep_begin + i, lanes - i, step_begin, steps, tail);
  }
}

void advance_averaged_avx2(const AveragedCoeffs& k, const PhiloxKey& key, std::uint64_t rep_begin, std::size_t lanes,
                           std::uint64_t step_begin, std::uint64_t steps, double* yv) {
  const __m256d drift = _mm256_set1_pd(k.drift), var = _mm256_set1_pd(k.var);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kWidth <= lanes; i += kWidth) {
    __m256d y = _mm256_loadu_pd(yv + i);
    for (std::uint64_t s = step_begin; s < step_begin + steps; ++s) {
      const __m256d zeta = k.noise ? normal_pair4(key, rep_begin + i, s).xi : zero;
      const __m256d ys =
          _mm256_add_pd(_mm256_add_pd(y, _mm256_mul_pd(drift, y)), _mm256_mul_pd(_mm256_sqrt_pd(_mm256_mul_pd(var, y)), zeta));
      y = _mm256_add_pd(_mm256_max_pd(zero, ys), zero);
    }
    _mm256_storeu_pd(yv + i, y);
  }
  if (i < lanes) scalar_kernels().advance_averaged(k, key, rep_begin + i, lanes - i, step_begin, steps, yv + i);
}

}  // namespace

const KernelSet& avx2_kernels() {
  static const KernelSet set{Isa::kAvx2, advance_system_avx2, advance_averaged_avx2, normal_block_avx2};
  return set;
}

}  // namespace catbranch::simd
