#pragma once

// Scalar reference arithmetic for the Euler step kernels. Every SIMD variant
// reproduces these operation sequences exactly (same operands, same order, no
// contraction), so results are bit-identical across instruction sets.

#include <bit>
#include <cmath>
#include <cstdint>
#include <utility>

#include "catbranch/rng.hpp"

namespace catbranch::simd {

inline constexpr double kLn2Hi = 6.93147180369123816490e-01;
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;
inline constexpr double kSqrt2 = 1.4142135623730951;
inline constexpr double kTwoPi = 6.283185307179586;

inline constexpr double kLg1 = 6.666666666666735130e-01;
inline constexpr double kLg2 = 3.999999999940941908e-01;
inline constexpr double kLg3 = 2.857142874366239149e-01;
inline constexpr double kLg4 = 2.222219843214978396e-01;
inline constexpr double kLg5 = 1.818357216161805012e-01;
inline constexpr double kLg6 = 1.531383769920937332e-01;
inline constexpr double kLg7 = 1.479819860511658591e-01;

inline constexpr double kS1 = -1.66666666666666324348e-01;
inline constexpr double kS2 = 8.33333333332248946124e-03;
inline constexpr double kS3 = -1.98412698298579493134e-04;
inline constexpr double kS4 = 2.75573137070700676789e-06;
inline constexpr double kS5 = -2.50507602534068634195e-08;
inline constexpr double kS6 = 1.58969099521155010221e-10;

inline constexpr double kC1 = 4.16666666666666019037e-02;
inline constexpr double kC2 = -1.38888888888741095749e-03;
inline constexpr double kC3 = 2.48015872894767294178e-05;
inline constexpr double kC4 = -2.75573143513906633035e-07;
inline constexpr double kC5 = 2.08757232129817482790e-09;
inline constexpr double kC6 = -1.13596475577881948265e-11;

/// Natural log for u in (0, 1) with u normal.
inline double kernel_log(double u) {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(u);
  const double biased = static_cast<double>(bits >> 52);
  double m = std::bit_cast<double>((bits & 0x000FFFFFFFFFFFFFull) | 0x3FF0000000000000ull);
  const bool big = m > kSqrt2;
  m = big ? m * 0.5 : m;
  const double k = (biased - 1023.0) + (big ? 1.0 : 0.0);
  const double f = m - 1.0;
  const double s = f / (2.0 + f);
  const double z = s * s;
  const double w = z * z;
  const double t1 = w * (kLg2 + w * (kLg4 + w * kLg6));
  const double t2 = z * (kLg1 + w * (kLg3 + w * (kLg5 + w * kLg7)));
  const double r = t2 + t1;
  const double hfsq = 0.5 * f * f;
  return k * kLn2Hi - ((hfsq - (s * (hfsq + r) + k * kLn2Lo)) - f);
}

/// (sin 2*pi*v, cos 2*pi*v) for v in [0, 1).
inline std::pair<double, double> kernel_sincos_2pi(double v) {
  const double q = std::nearbyint(v * 4.0);
  const double x = (v - q * 0.25) * kTwoPi;
  const double z = x * x;
  const double v3 = z * x;
  const double rs = kS2 + z * (kS3 + z * (kS4 + z * (kS5 + z * kS6)));
  const double s = x + v3 * (kS1 + z * rs);
  const double rc = z * (kC1 + z * (kC2 + z * (kC3 + z * (kC4 + z * (kC5 + z * kC6)))));
  const double hz = 0.5 * z;
  const double w = 1.0 - hz;
  const double c = w + (((1.0 - w) - hz) + z * rc);
  const double qm = q - (q > 3.5 ? 4.0 : 0.0);
  const bool swap = qm == 1.0 || qm == 3.0;
  double so = swap ? c : s;
  double co = swap ? s : c;
  if (qm >= 2.0) so = -so;
  if (qm == 1.0 || qm == 2.0) co = -co;
  return {so, co};
}

/// Two independent standard normals keyed by (rep, step) under `key` (Box-Muller on one Philox block).
inline std::pair<double, double> normal_pair(const PhiloxKey& key, std::uint64_t rep, std::uint64_t step) {
  const auto b = philox4x32_10({static_cast<std::uint32_t>(rep), static_cast<std::uint32_t>(rep >> 32),
                                static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)},
                               key);
  const double u1 = uniform_open((static_cast<std::uint64_t>(b[1]) << 32) | b[0]);
  const double u2 = uniform_open((static_cast<std::uint64_t>(b[3]) << 32) | b[2]);
  const double r = std::sqrt(-2.0 * kernel_log(u1));
  const auto [s, c] = kernel_sincos_2pi(u2);
  return {r * c, r * s};
}

/// Step coefficients pre-multiplied by dt (and by a_n for the catalyst).
struct SystemCoeffs {
  double drift1 = 0.0;  // a_n c1 lambda1 dt
  double var1 = 0.0;    // a_n alpha1 lambda1 dt
  double drift2 = 0.0;  // c2 lambda2 dt
  double var2 = 0.0;    // alpha2 lambda2 dt
  bool noise = true;
};

struct AveragedCoeffs {
  double drift = 0.0;  // b dt
  double var = 0.0;    // a dt
  bool noise = true;
};

/// One projected Euler step of the catalyst-reactant pair; returns the unreflected proposal X*.
inline double system_step(const SystemCoeffs& k, double& x, double& y, double& eta, double xi, double zeta) {
  const double xs = (x + k.drift1 * x) + std::sqrt(k.var1 * x) * xi;
  const double ys = (y + (k.drift2 * x) * y) + std::sqrt((k.var2 * x) * y) * zeta;
  const double xn = (1.0 > xs) ? 1.0 : xs;
  eta += xn - xs;
  x = xn;
  y = ((0.0 > ys) ? 0.0 : ys) + 0.0;
  return xs;
}

inline void averaged_step(const AveragedCoeffs& k, double& y, double zeta) {
  const double ys = (y + k.drift * y) + std::sqrt(k.var * y) * zeta;
  y = ((0.0 > ys) ? 0.0 : ys) + 0.0;
}

}  // namespace catbranch::simd
