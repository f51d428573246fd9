#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "catbranch/params.hpp"
#include "catbranch/rng.hpp"
#include "catbranch/skorohod.hpp"

namespace catbranch {

struct SdeGrid {
  double dt = 1e-3;
  std::uint64_t steps = 1000;

  /// Steps of size dt covering [0, horizon]; horizon/dt must be (close to) an integer.
  static SdeGrid for_horizon(double horizon, double dt);
  double horizon() const { return dt * static_cast<double>(steps); }
};

void check_grid(const SdeGrid& g);

struct ReflectedPathSample {
  std::vector<double> times;
  std::vector<double> x;    // >= 1
  std::vector<double> y;    // >= 0
  std::vector<double> eta;  // nondecreasing from 0
  std::vector<double> x_star;  // unreflected proposals; x_star[0] = x0
  std::optional<double> absorbed_at;
};

struct SdeOptions {
  bool zero_noise = false;  // debug mode: drop both Brownian terms
};

class NonFiniteState : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Projected Euler-Maruyama for the reflected catalyst / reactant system; a_n
/// scales the catalyst drift and diffusion variance. Normals are keyed by
/// (seed, replication, step), so a path does not depend on how replications are scheduled.
ReflectedPathSample integrate_system(const DiffusionParams& params, const SdeGrid& grid, RngStream rng,
                                     const SdeOptions& options = {});

/// Same scheme driven by caller-supplied standard normal pairs (xi for X, zeta for Y), one per step.
ReflectedPathSample integrate_system_with_noise(const DiffusionParams& params, double dt,
                                                std::span<const std::pair<double, double>> noise);

/// Euler-Maruyama for dY = b Y dt + sqrt(a Y) dB, absorbed at 0.
Path integrate_averaged(double b, double a, double y0, const SdeGrid& grid, RngStream rng,
                        const SdeOptions& options = {});

struct SystemMarginals {
  std::vector<double> x, y, eta;
  std::vector<double> window_mean_x;  // time average of X over the trailing window, when requested
};

/// Terminal values of replications [rep_offset, rep_offset + reps) through the active SIMD kernel set.
SystemMarginals system_marginals(const DiffusionParams& params, const SdeGrid& grid, std::uint64_t seed,
                                 std::uint64_t rep_offset, std::size_t reps, const SdeOptions& options = {},
                                 std::uint64_t window_steps = 0);

std::vector<double> averaged_marginals(double b, double a, double y0, const SdeGrid& grid, std::uint64_t seed,
                                       std::uint64_t rep_offset, std::size_t reps, const SdeOptions& options = {});

void write_sde_csv(std::ostream& os, const ReflectedPathSample& s);
void write_averaged_csv(std::ostream& os, const Path& p);

}  // namespace catbranch
