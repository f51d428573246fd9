#pragma once

#include <cstddef>
#include <functional>

namespace catbranch {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  // Kronrod error estimate
  std::size_t intervals = 0;
  bool converged = false;
};

struct QuadratureOptions {
  double abs_tol = 1e-13;
  double rel_tol = 1e-12;
  std::size_t max_intervals = 4000;
};

/// One 15-point Gauss-Kronrod panel on [a, b].
QuadratureResult gk15(const std::function<double(double)>& f, double a, double b);

/// Globally adaptive Gauss-Kronrod (7/15) on a finite interval.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options = {});

}  // namespace catbranch
