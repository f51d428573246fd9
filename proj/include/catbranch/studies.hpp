#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "catbranch/params.hpp"
#include "catbranch/report.hpp"

namespace catbranch {

class FamilyMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws FamilyMismatch unless every member's limit constants equal those of `limit` (relative 1e-9).
void check_family_matches(const std::vector<BranchingParams>& family, const DiffusionParams& limit);

struct LimitStudyConfig {
  DiffusionParams limit{-1.0, -1.0, 0.55, 0.55, 1.0, 1.0, 2.0, 1.0, 1.0};
  std::vector<std::int64_t> n_list{25, 50, 100};
  std::vector<BranchingParams> family;  // empty: near-critical three-point members of `limit`
  double horizon = 1.0;
  double dt = 1e-3;
  std::size_t reps = 10000;
  std::size_t repeats = 20;
  double ks_tolerance = 0.05;
};

/// Fixed-time marginals of the branching family against the reflected SDE, per n, over independent repeats.
StudyReport study_diffusion_limit(const LimitStudyConfig& cfg, std::uint64_t seed);

struct StationaryStudyConfig {
  double c1 = -1.0, alpha1 = 1.0, lambda1 = 1.0;
  std::vector<std::int64_t> n_list{25, 50, 100};
  std::vector<BranchingParams> family;  // empty: near-critical members of (c1, alpha1, lambda1)
  double burn_in = 50.0;
  double gap = 2.0;
  std::size_t count = 10000;
  std::size_t repeats = 5;
  double ks_tolerance = 0.05;
  bool degenerate_row = true;
};

/// Occupation samples of the branching catalyst against the stationary law, per n.
StudyReport study_stationary(const StationaryStudyConfig& cfg, std::uint64_t seed);

enum class AveragingRegime { kDiffusion, kBranching };

const char* to_string(AveragingRegime r);
AveragingRegime parse_regime(const std::string& s);

struct AveragingStudyConfig {
  DiffusionParams params{-1.0, -0.5, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
  std::vector<double> a_n_list{1.0, 4.0, 16.0, 64.0};
  double t_probe = 1.0;
  double dt = 1e-3;  // slow step; the fast system uses dt / a_n
  std::size_t reps = 10000;
  std::size_t repeats = 20;
  std::int64_t bp_n = 32;  // scale of the branching members
  double moment_se_multiple = 3.0;
  double ks_tolerance = 0.05;
};

/// Reactant marginals of the fast-catalyst system against the averaged SDE and its closed-form moments.
StudyReport study_averaging(const AveragingStudyConfig& cfg, AveragingRegime regime, std::uint64_t seed);

/// Echeverria residuals over the fixed test-function library, with the boundary-constant mutation.
StudyReport study_echeverria(double c1, double alpha1, double lambda1, double tolerance = 1e-6,
                             double mutation_floor = 1e-3);

}  // namespace catbranch
