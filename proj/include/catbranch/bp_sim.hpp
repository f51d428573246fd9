#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "catbranch/params.hpp"
#include "catbranch/rng.hpp"

namespace catbranch {

/// Integer-lattice state of the catalyst / reactant / shadow triple.
struct LatticeState {
  std::int64_t x_int = 0;  // n * X, never below n
  std::int64_t y_int = 0;  // n * Y
  std::int64_t z_int = 0;  // n * Z, any sign
  double clock = 0.0;
  double boundary_time = 0.0;  // Lebesgue time spent with x_int == n
};

enum class BpEventType : std::uint8_t { kCatalyst, kReplenish, kReactant };

const char* to_string(BpEventType t);

struct BpEvent {
  double time = 0.0;
  BpEventType type = BpEventType::kCatalyst;
  std::uint32_t offspring = 0;
  std::int64_t x_int = 0, y_int = 0, z_int = 0;  // state after the event
};

/// Exact time integrals of the piecewise-constant path over [0, horizon].
struct PathIntegrals {
  double int_x = 0.0;          // int X ds
  double int_xy = 0.0;         // int X Y ds
  double boundary_time = 0.0;  // int 1{X = 1} ds
  double window_x = 0.0;       // int X ds over [window_start, horizon]
};

struct BpPathRecord {
  std::int64_t n = 1;
  double horizon = 0.0;
  std::vector<double> grid;
  std::vector<double> x, y, z, eta_hat;
  std::uint64_t event_count = 0;
  LatticeState final_state;
  std::optional<PathIntegrals> integrals;
  std::vector<BpEvent> events;  // filled only when requested
};

struct BpSimOptions {
  bool exact_integrals = true;
  bool event_log = false;
  double window_start = -1.0;  // negative: no windowed integral
};

class PopulationOverflow : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Exact event-driven simulation of the scaled triple with the catalyst block
/// accelerated by params.a_n. Grid values are right-continuous. The offspring
/// laws may be degenerate here; use validate() for the standing conditions.
BpPathRecord simulate_pair(const BranchingParams& params, double horizon, std::span<const double> grid,
                           RngStream rng, const BpSimOptions& options = {});

struct MartingaleDiagnostics {
  double residual_x = 0.0;       // X_T - x0 - a_n c1 lambda1 int X - eta_T
  double qv_rhs = 0.0;           // predictable quadratic variation of the residual
  double shadow_residual = 0.0;  // X_T - Z_T - eta_T
};

/// Needs record.integrals (simulate with exact_integrals).
MartingaleDiagnostics martingale_diagnostics(const BpPathRecord& record, const BranchingParams& params);

/// One long catalyst trajectory sampled at burn_in + i * gap, i = 1..count.
std::vector<double> occupation_sampler(const BranchingParams& params, double burn_in, double gap, std::size_t count,
                                       RngStream rng);

/// Catalyst events that left x_int below n, and reactant events after absorption,
/// summed over every simulation in this process.
struct BpInvariantCounters {
  std::uint64_t catalyst_below_boundary = 0;
  std::uint64_t post_absorption_reactant_events = 0;
  std::uint64_t transitions_checked = 0;
};

BpInvariantCounters bp_invariant_counters();

/// Grid CSV (t,x,y,z,eta_hat); a leading rep column is added for more than one record.
void write_bp_grid_csv(std::ostream& os, std::span<const BpPathRecord> recs);
void write_bp_event_csv(std::ostream& os, const BpPathRecord& rec);

}  // namespace catbranch
