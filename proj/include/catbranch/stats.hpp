#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "catbranch/skorohod.hpp"

namespace catbranch {

/// Equally weighted sample, sorted ascending.
class EmpiricalSample {
 public:
  EmpiricalSample() = default;
  explicit EmpiricalSample(std::vector<double> values);

  std::span<const double> values() const { return values_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  /// Fraction of points <= x.
  double cdf(double x) const;

 private:
  std::vector<double> values_;
};

double ks_one_sample(const EmpiricalSample& sample, const std::function<double(double)>& cdf);
double ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b);

/// Mean absolute difference of matched order statistics for equal counts;
/// otherwise the integral of |F_a - F_b|, which agrees with it on equal counts.
double wasserstein1(const EmpiricalSample& a, const EmpiricalSample& b);

/// One-sample KS 95% critical value 1.36 / sqrt(m).
double ks_critical_95(std::size_t m);

/// Time average over [burn_in, T]: exact for piecewise-constant paths, trapezoidal for piecewise-linear.
double ergodic_average(const Path& path, double burn_in);

struct MomentSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;  // unbiased
  double se_mean = 0.0;
  double se_variance = 0.0;  // sqrt((m4 - s^4) / N)
};

MomentSummary moments(std::span<const double> xs);

double median(std::vector<double> xs);

}  // namespace catbranch
