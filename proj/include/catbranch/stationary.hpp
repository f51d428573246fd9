#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "catbranch/rng.hpp"

namespace catbranch {

/// Normalization theta = (int_1^inf x^{-1} e^{2 c1 x / alpha1} dx)^{-1}.
double stationary_theta(double c1, double alpha1);

/// Closed-form stationary catalyst mean m_X = -(alpha1 theta / (2 c1)) e^{2 c1 / alpha1}.
double mean_mX(double c1, double alpha1);

/// Stationary law of the reflected catalyst diffusion, density (theta/x) e^{2 c1 x / alpha1} on [1, inf).
/// Immutable after construction.
class StationaryLaw {
 public:
  StationaryLaw(double c1, double alpha1);

  double c1() const { return c1_; }
  double alpha1() const { return alpha1_; }
  double beta() const { return beta_; }  // -2 c1 / alpha1
  double theta() const { return theta_; }
  double x_max() const { return x_max_; }  // quadrature cutoff
  double tail_bound() const { return tail_; }  // bound on the mass beyond x_max

  double pdf(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  /// Inverse cdf by bisection (bracket width 1e-10 relative); p in [0, 1).
  double quantile(double p) const;

  double mean() const { return mean_mX(c1_, alpha1_); }
  /// Direct quadrature of int x pdf(x) dx, for cross-checking mean().
  double mean_by_quadrature() const;

  /// Rejection sampler: proposal 1 + Exp(beta), acceptance 1/x.
  double sample(StreamEngine& eng) const;
  std::vector<double> sample(std::size_t count, RngStream rng) const;

 private:
  double mass_between(double a, double b) const;
  std::size_t panel_of(double x) const;

  double c1_, alpha1_, beta_, theta_, x_max_, tail_;
  std::vector<double> knots_;
  std::vector<double> cum_;  // cum_[i]: mass on [1, knots_[i]]
  std::vector<double> sur_;  // sur_[i]: mass on [knots_[i], x_max]
};

/// Polynomial in t = x - origin.
struct LocalPoly {
  double origin = 0.0;
  std::vector<double> coeffs;  // ascending powers of t

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

  /// scale * prod (x - root)^mult, expanded about origin.
  static LocalPoly from_factors(double origin, double scale, std::span<const std::pair<double, int>> factors);
};

/// C^1 piecewise polynomial with compact support [1, R], zero beyond R.
class TestFunction {
 public:
  /// knots[0] = 1 < ... < knots[m] = R; pieces[j] lives on [knots[j], knots[j+1]].
  TestFunction(std::string name, std::vector<double> knots, std::vector<LocalPoly> pieces);

  /// Piecewise cubic Hermite interpolant through (knots, values, slopes); values and slopes must end at 0.
  static TestFunction hermite(std::string name, std::vector<double> knots, std::vector<double> values,
                              std::vector<double> slopes);
  /// One polynomial piece scale * prod (x - root)^mult on [1, R].
  static TestFunction product(std::string name, double support_end, double scale,
                              std::vector<std::pair<double, int>> factors);

  const std::string& name() const { return name_; }
  const std::vector<double>& knots() const { return knots_; }
  const std::vector<LocalPoly>& pieces() const { return pieces_; }
  double support_end() const { return knots_.back(); }

  double value(double x) const;
  double d1(double x) const;
  double d2(double x) const;

 private:
  std::size_t piece_of(double x) const;

  std::string name_;
  std::vector<double> knots_;
  std::vector<LocalPoly> pieces_;
};

/// int_1^R [c1 lambda1 x phi' + (1/2) alpha1 lambda1 x phi''] p dx + boundary_scale * p(1) alpha1 lambda1 phi'(1).
/// The stationarity constant is boundary_scale = 1/2.
double echeverria_residual(const StationaryLaw& law, const TestFunction& phi, double lambda1,
                           double boundary_scale = 0.5);

/// The fixed library of ten test functions, several with phi'(1) != 0.
std::vector<TestFunction> echeverria_library();

/// CSV "x,pdf,cdf" on an evenly spaced grid over [x_lo, x_hi].
void write_stationary_table(std::ostream& os, const StationaryLaw& law, double x_lo, double x_hi, std::size_t points);

}  // namespace catbranch
