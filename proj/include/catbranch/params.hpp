#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace catbranch {

/// Finite offspring law over k = 0..K_max. Entries are nonnegative and sum to one.
class OffspringPmf {
 public:
  static constexpr std::size_t kMaxSupport = 1u << 16;

  OffspringPmf() = default;
  /// Throws std::invalid_argument on negative entries, bad total mass or oversized support.
  explicit OffspringPmf(std::vector<double> probs);

  /// Point mass at k.
  static OffspringPmf delta(std::size_t k);
  /// Three-point law on {0,1,2} with mean 1 + c/n and spread alpha.
  static OffspringPmf near_critical(double c, double alpha, std::int64_t n);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t max_offspring() const { return probs_.empty() ? 0 : probs_.size() - 1; }
  double operator[](std::size_t k) const { return k < probs_.size() ? probs_[k] : 0.0; }

  std::string to_string() const;

  friend bool operator==(const OffspringPmf&, const OffspringPmf&) = default;

 private:
  std::vector<double> probs_{1.0};
};

/// Parses "0:0.3,1:0.45,2:0.25" (sparse) or "0.3,0.45,0.25" (dense).
OffspringPmf parse_pmf(const std::string& text);

struct OffspringMoments {
  double mean = 0.0;
  double spread = 0.0;  // sum (k-1)^2 mu(k)
};

OffspringMoments offspring_moments(const OffspringPmf& pmf);

// Masses are stored as integer particle counts to keep the lattice {l/n} exact.
struct BranchingParams {
  std::int64_t n = 1;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  OffspringPmf pmf1;
  OffspringPmf pmf2;
  std::int64_t x0_count = 1;  // n * x0
  std::int64_t y0_count = 0;  // n * y0
  double a_n = 1.0;

  double x0() const { return static_cast<double>(x0_count) / static_cast<double>(n); }
  double y0() const { return static_cast<double>(y0_count) / static_cast<double>(n); }

  double m1() const { return offspring_moments(pmf1).mean; }
  double m2() const { return offspring_moments(pmf2).mean; }
  double alpha1() const { return offspring_moments(pmf1).spread; }
  double alpha2() const { return offspring_moments(pmf2).spread; }
  double c1() const { return static_cast<double>(n) * (m1() - 1.0); }
  double c2() const { return static_cast<double>(n) * (m2() - 1.0); }
};

/// Converts a scaled mass to a particle count; throws if n*mass is not an integer.
std::int64_t lattice_count(double mass, std::int64_t n, const char* what);

struct DiffusionParams {
  double c1 = -1.0;
  double c2 = 0.0;
  double alpha1 = 1.0;
  double alpha2 = 1.0;
  double lambda1 = 1.0;
  double lambda2 = 1.0;
  double x0 = 1.0;
  double y0 = 0.0;
  double a_n = 1.0;
};

/// Limit constants of a branching parameterization (c_i, alpha_i, lambda_i, masses).
DiffusionParams diffusion_limit_of(const BranchingParams& bp);

/// Scale-n member of the near-critical three-point family matching `limit`.
BranchingParams branching_member(const DiffusionParams& limit, std::int64_t n);

struct ConditionCheck {
  std::string name;
  bool passed = true;
  std::string detail;
};

struct ValidationReport {
  std::vector<ConditionCheck> checks;
  std::vector<std::string> notes;

  bool ok() const;
  std::string failures() const;
};

class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(ValidationReport report);
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Checks the per-n standing conditions. Never throws; see require_valid.
ValidationReport validate(const BranchingParams& params, bool require_subcritical);
void require_valid(const BranchingParams& params, bool require_subcritical);

ValidationReport validate(const DiffusionParams& params, bool require_subcritical);
void require_valid(const DiffusionParams& params, bool require_subcritical);

struct FamilyRow {
  std::int64_t n = 0;
  double tail1 = 0.0;  // sum_{l > eps sqrt(n)} (l - m1)^2 mu1(l)
  double tail2 = 0.0;
  double c1 = 0.0, c2 = 0.0;
  double alpha1 = 0.0, alpha2 = 0.0;
  double lambda1 = 0.0, lambda2 = 0.0;
  double x0 = 0.0, y0 = 0.0;
};

struct FamilyReport {
  double epsilon = 0.0;
  std::vector<FamilyRow> rows;
  // Only meaningful with two or more rows.
  bool has_trend = false;
  bool tails_vanishing = true;
  std::vector<std::string> flags;
};

/// Tail and constant trajectories over a family ordered by increasing n.
FamilyReport family_check(const std::vector<BranchingParams>& family, double epsilon);

}  // namespace catbranch
