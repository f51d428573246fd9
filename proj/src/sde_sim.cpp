#include "catbranch/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <tuple>
#include <ostream>

#include "catbranch/format.hpp"
#include "catbranch/parallel.hpp"
#include "catbranch/simd/kernels.hpp"

namespace catbranch {

SdeGrid SdeGrid::for_horizon(double horizon, double dt) {
  if (!(dt > 0.0) || !(horizon > 0.0)) throw std::invalid_argument("sde grid: dt and horizon must be positive");
  const double ratio = horizon / dt;
  const double steps = std::nearbyint(ratio);
  if (steps < 1.0 || std::abs(ratio - steps) > 1e-6 * std::max(1.0, ratio))
    throw std::invalid_argument("sde grid: horizon " + format_double(horizon) + " is not a multiple of dt " +
                                format_double(dt));
  return {dt, static_cast<std::uint64_t>(steps)};
}

void check_grid(const SdeGrid& g) {
  if (!(g.dt > 0.0) || !std::isfinite(g.dt)) throw std::invalid_argument("sde grid: dt must be positive");
  if (g.steps < 1) throw std::invalid_argument("sde grid: need at least one step");
}

namespace {

simd::SystemCoeffs system_coeffs(const DiffusionParams& p, double dt, bool noise) {
  simd::SystemCoeffs k;
  k.drift1 = p.a_n * p.c1 * p.lambda1 * dt;
  k.var1 = p.a_n * p.alpha1 * p.lambda1 * dt;
  k.drift2 = p.c2 * p.lambda2 * dt;
  k.var2 = p.alpha2 * p.lambda2 * dt;
  k.noise = noise;
  return k;
}

void check_structure(const DiffusionParams& p) {
  if (!(p.x0 >= 1.0)) throw std::invalid_argument("integrate_system: x0 must be >= 1");
  if (!(p.y0 >= 0.0)) throw std::invalid_argument("integrate_system: y0 must be >= 0");
  if (!(p.alpha1 >= 0.0) || !(p.alpha2 >= 0.0) || !(p.lambda1 > 0.0) || !(p.lambda2 > 0.0) || !(p.a_n >= 1.0))
    throw std::invalid_argument("integrate_system: invalid diffusion constants");
}

template <class NoiseFn>
ReflectedPathSample run_system(const DiffusionParams& p, double dt, std::uint64_t steps, bool noise, NoiseFn&& draw) {
  const auto k = system_coeffs(p, dt, noise);
  ReflectedPathSample out;
  out.times.reserve(steps + 1);
  out.x.reserve(steps + 1);
  out.y.reserve(steps + 1);
  out.eta.reserve(steps + 1);
  out.x_star.reserve(steps + 1);
  double x = p.x0, y = p.y0, eta = 0.0;
  out.times.push_back(0.0);
  out.x.push_back(x);
  out.y.push_back(y);
  out.eta.push_back(eta);
  out.x_star.push_back(x);
  if (y == 0.0) out.absorbed_at = 0.0;
  for (std::uint64_t s = 0; s < steps; ++s) {
    double xi = 0.0, zeta = 0.0;
    if (noise) std::tie(xi, zeta) = draw(s);
    const double xs = simd::system_step(k, x, y, eta, xi, zeta);
    if (!std::isfinite(xs) || !std::isfinite(y))
      throw NonFiniteState("integrate_system: non-finite state at step " + std::to_string(s + 1));
    const double t = dt * static_cast<double>(s + 1);
    out.times.push_back(t);
    out.x.push_back(x);
    out.y.push_back(y);
    out.eta.push_back(eta);
    out.x_star.push_back(xs);
    if (y == 0.0 && !out.absorbed_at) out.absorbed_at = t;
  }
  return out;
}

}  // namespace

ReflectedPathSample integrate_system(const DiffusionParams& params, const SdeGrid& grid, RngStream rng,
                                     const SdeOptions& options) {
  check_grid(grid);
  check_structure(params);
  const auto key = philox_key(rng.master_seed, StreamDomain::kDiffusion);
  return run_system(params, grid.dt, grid.steps, !options.zero_noise,
                    [&](std::uint64_t s) { return simd::normal_pair(key, rng.replication_index, s); });
}

ReflectedPathSample integrate_system_with_noise(const DiffusionParams& params, double dt,
                                                std::span<const std::pair<double, double>> noise) {
  check_grid({dt, noise.size()});
  check_structure(params);
  return run_system(params, dt, noise.size(), true, [&](std::uint64_t s) { return noise[s]; });
}

Path integrate_averaged(double b, double a, double y0, const SdeGrid& grid, RngStream rng, const SdeOptions& options) {
  check_grid(grid);
  if (!(a >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("integrate_averaged: need a >= 0 and finite b");
  if (!(y0 >= 0.0)) throw std::invalid_argument("integrate_averaged: y0 must be >= 0");
  const auto key = philox_key(rng.master_seed, StreamDomain::kAveraged);
  const simd::AveragedCoeffs k{b * grid.dt, a * grid.dt, !options.zero_noise};
  Path out;
  out.kind = PathKind::kPiecewiseLinear;
  out.times.reserve(grid.steps + 1);
  out.values.reserve(grid.steps + 1);
  double y = y0;
  out.times.push_back(0.0);
  out.values.push_back(y);
  for (std::uint64_t s = 0; s < grid.steps; ++s) {
    const double zeta = k.noise ? simd::normal_pair(key, rng.replication_index, s).first : 0.0;
    simd::averaged_step(k, y, zeta);
    if (!std::isfinite(y)) throw NonFiniteState("integrate_averaged: non-finite state at step " + std::to_string(s + 1));
    out.times.push_back(grid.dt * static_cast<double>(s + 1));
    out.values.push_back(y);
  }
  return out;
}

namespace {

constexpr std::size_t kLaneBlock = 64;
constexpr std::uint64_t kStepChunk = 256;

}  // namespace

SystemMarginals system_marginals(const DiffusionParams& params, const SdeGrid& grid, std::uint64_t seed,
                                 std::uint64_t rep_offset, std::size_t reps, const SdeOptions& options,
                                 std::uint64_t window_steps) {
  check_grid(grid);
  check_structure(params);
  if (window_steps > grid.steps) throw std::invalid_argument("system_marginals: window longer than the horizon");
  const auto k = system_coeffs(params, grid.dt, !options.zero_noise);
  const auto key = philox_key(seed, StreamDomain::kDiffusion);
  const auto& kernels = simd::active_kernels();
  SystemMarginals out;
  out.x.assign(reps, params.x0);
  out.y.assign(reps, params.y0);
  out.eta.assign(reps, 0.0);
  std::vector<double> xsum(window_steps > 0 ? reps : 0, 0.0);
  const std::uint64_t window_begin = grid.steps - window_steps;

  parallel_for(reps, kLaneBlock, [&](std::size_t begin, std::size_t end) {
    const std::size_t lanes = end - begin;
    simd::SystemLanes st{out.x.data() + begin, out.y.data() + begin, out.eta.data() + begin, nullptr};
    std::uint64_t s = 0;
    while (s < grid.steps) {
      std::uint64_t stop = std::min(grid.steps, s + kStepChunk);
      if (window_steps > 0 && s < window_begin) stop = std::min(stop, window_begin);
      st.x_sum = (window_steps > 0 && s >= window_begin) ? xsum.data() + begin : nullptr;
      kernels.advance_system(k, key, rep_offset + begin, lanes, s, stop - s, st);
      for (std::size_t i = 0; i < lanes; ++i)
        if (!std::isfinite(st.x[i]) || !std::isfinite(st.y[i]))
          throw NonFiniteState("system_marginals: replication " + std::to_string(rep_offset + begin + i) +
                               " diverged before step " + std::to_string(stop));
      s = stop;
    }
  });
  if (window_steps > 0) {
    out.window_mean_x.resize(reps);
    for (std::size_t i = 0; i < reps; ++i) out.window_mean_x[i] = xsum[i] / static_cast<double>(window_steps);
  }
  return out;
}

std::vector<double> averaged_marginals(double b, double a, double y0, const SdeGrid& grid, std::uint64_t seed,
                                       std::uint64_t rep_offset, std::size_t reps, const SdeOptions& options) {
  check_grid(grid);
  if (!(a >= 0.0) || !std::isfinite(b)) throw std::invalid_argument("averaged_marginals: need a >= 0 and finite b");
  if (!(y0 >= 0.0)) throw std::invalid_argument("averaged_marginals: y0 must be >= 0");
  const simd::AveragedCoeffs k{b * grid.dt, a * grid.dt, !options.zero_noise};
  const auto key = philox_key(seed, StreamDomain::kAveraged);
  const auto& kernels = simd::active_kernels();
  std::vector<double> y(reps, y0);
  parallel_for(reps, kLaneBlock, [&](std::size_t begin, std::size_t end) {
    kernels.advance_averaged(k, key, rep_offset + begin, end - begin, 0, grid.steps, y.data() + begin);
    for (std::size_t i = begin; i < end; ++i)
      if (!std::isfinite(y[i]))
        throw NonFiniteState("averaged_marginals: replication " + std::to_string(rep_offset + i) + " diverged");
  });
  return y;
}

void write_sde_csv(std::ostream& os, const ReflectedPathSample& s) {
  os << "t,X,Y,eta\n";
  for (std::size_t i = 0; i < s.times.size(); ++i)
    os << format_double(s.times[i]) << ',' << format_double(s.x[i]) << ',' << format_double(s.y[i]) << ','
       << format_double(s.eta[i]) << '\n';
}

void write_averaged_csv(std::ostream& os, const Path& p) {
  os << "t,Y_avg\n";
  for (std::size_t i = 0; i < p.size(); ++i) os << format_double(p.times[i]) << ',' << format_double(p.values[i]) << '\n';
}

}  // namespace catbranch
