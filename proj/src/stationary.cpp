#include "catbranch/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

#include "catbranch/format.hpp"
#include "catbranch/quadrature.hpp"

namespace catbranch {

namespace {

void check_law_params(double c1, double alpha1) {
  if (!(c1 < 0.0) || !std::isfinite(c1)) throw std::invalid_argument("stationary law needs c1 < 0, got " + format_double(c1));
  if (!(alpha1 > 0.0) || !std::isfinite(alpha1))
    throw std::invalid_argument("stationary law needs alpha1 > 0, got " + format_double(alpha1));
}

constexpr double kCutoffLog = 18.0 * 2.302585092994046;  // e^{-beta x_max} = 1e-18

const QuadratureOptions kPanelQuad{1e-300, 1e-14, 2000};

}  // namespace

StationaryLaw::StationaryLaw(double c1, double alpha1) : c1_(c1), alpha1_(alpha1) {
  check_law_params(c1, alpha1);
  beta_ = -2.0 * c1 / alpha1;
  x_max_ = std::max(2.0, kCutoffLog / beta_);
  // Knots in u = beta x: doubling below u = 1, then steps of 1/4.
  std::vector<double> u;
  double v = beta_;
  u.push_back(v);
  while (v < 1.0) {
    v = std::min(2.0 * v, 1.0);
    u.push_back(v);
  }
  const double u_max = beta_ * x_max_;
  while (v < u_max) {
    v = std::min(v + 0.25, u_max);
    u.push_back(v);
  }
  knots_.resize(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) knots_[i] = u[i] / beta_;
  knots_.front() = 1.0;
  knots_.back() = x_max_;

  std::vector<double> mass(knots_.size() - 1);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) mass[i] = mass_between(knots_[i], knots_[i + 1]);
  double total = 0.0;
  for (double m : mass) total += m;
  theta_ = 1.0 / total;
  tail_ = theta_ * std::exp(-beta_ * x_max_) / (beta_ * x_max_);

  cum_.assign(knots_.size(), 0.0);
  for (std::size_t i = 0; i < mass.size(); ++i) cum_[i + 1] = cum_[i] + theta_ * mass[i];
  sur_.assign(knots_.size(), 0.0);
  for (std::size_t i = mass.size(); i-- > 0;) sur_[i] = sur_[i + 1] + theta_ * mass[i];
}

double StationaryLaw::mass_between(double a, double b) const {
  const double beta = beta_;
  return integrate([beta](double x) { return std::exp(-beta * x) / x; }, a, b, kPanelQuad).value;
}

std::size_t StationaryLaw::panel_of(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  return std::min(i == 0 ? 0 : i - 1, knots_.size() - 2);
}

double StationaryLaw::pdf(double x) const {
  if (!(x >= 1.0)) return 0.0;
  return theta_ / x * std::exp(-beta_ * x);
}

double StationaryLaw::cdf(double x) const {
  if (!(x > 1.0)) return 0.0;
  if (x >= x_max_) return 1.0;
  const std::size_t i = panel_of(x);
  return std::min(1.0, cum_[i] + theta_ * mass_between(knots_[i], x));
}

double StationaryLaw::survival(double x) const {
  if (!(x > 1.0)) return 1.0;
  if (x >= x_max_) return theta_ * std::exp(-beta_ * x) / (beta_ * x);
  const std::size_t i = panel_of(x);
  return std::min(1.0, sur_[i + 1] + theta_ * mass_between(x, knots_[i + 1]));
}

double StationaryLaw::quantile(double p) const {
  if (!(p >= 0.0) || !(p < 1.0)) throw std::invalid_argument("quantile: p must lie in [0, 1)");
  if (p == 0.0) return 1.0;
  const bool upper = p > 0.5;
  const double q = 1.0 - p;
  if (upper && q <= tail_) return x_max_;
  std::size_t i;
  if (upper) {
    // sur_ is decreasing; first knot whose survival drops to q or below.
    const auto it = std::lower_bound(sur_.begin(), sur_.end(), q, [](double s, double target) { return s > target; });
    const std::size_t j = static_cast<std::size_t>(it - sur_.begin());
    i = std::min(j == 0 ? 0 : j - 1, knots_.size() - 2);
  } else {
    const auto it = std::upper_bound(cum_.begin(), cum_.end(), p);
    const std::size_t j = static_cast<std::size_t>(it - cum_.begin());
    i = std::min(j == 0 ? 0 : j - 1, knots_.size() - 2);
  }
  double lo = knots_[i], hi = knots_[i + 1];
  for (int iter = 0; iter < 200 && hi - lo > 1e-10 * std::max(1.0, lo); ++iter) {
    const double mid = 0.5 * (lo + hi);
    const bool below = upper ? survival(mid) > q : cdf(mid) < p;
    (below ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double StationaryLaw::mean_by_quadrature() const {
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i)
    total += integrate([this](double x) { return x * pdf(x); }, knots_[i], knots_[i + 1], kPanelQuad).value;
  return total;
}

double StationaryLaw::sample(StreamEngine& eng) const {
  for (;;) {
    const double x = 1.0 - std::log(eng.uniform()) / beta_;
    if (eng.uniform() * x < 1.0) return x;
  }
}

std::vector<double> StationaryLaw::sample(std::size_t count, RngStream rng) const {
  StreamEngine eng(rng, StreamDomain::kStationary);
  std::vector<double> out(count);
  for (auto& v : out) v = sample(eng);
  return out;
}

double stationary_theta(double c1, double alpha1) { return StationaryLaw(c1, alpha1).theta(); }

double mean_mX(double c1, double alpha1) {
  const StationaryLaw law(c1, alpha1);
  return -(alpha1 * law.theta() / (2.0 * c1)) * std::exp(2.0 * c1 / alpha1);
}

// ---- test functions ----

double LocalPoly::value(double x) const {
  const double t = x - origin;
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) r = r * t + coeffs[k];
  return r;
}

double LocalPoly::d1(double x) const {
  const double t = x - origin;
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 1;) r = r * t + static_cast<double>(k) * coeffs[k];
  return r;
}

double LocalPoly::d2(double x) const {
  const double t = x - origin;
  double r = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 2;) r = r * t + static_cast<double>(k * (k - 1)) * coeffs[k];
  return r;
}

LocalPoly LocalPoly::from_factors(double origin, double scale, std::span<const std::pair<double, int>> factors) {
  LocalPoly p{origin, {scale}};
  for (const auto& [root, mult] : factors) {
    if (mult < 0) throw std::invalid_argument("LocalPoly: negative multiplicity");
    const double shift = origin - root;  // x - root = t + shift
    for (int m = 0; m < mult; ++m) {
      std::vector<double> next(p.coeffs.size() + 1, 0.0);
      for (std::size_t k = 0; k < p.coeffs.size(); ++k) {
        next[k] += shift * p.coeffs[k];
        next[k + 1] += p.coeffs[k];
      }
      p.coeffs = std::move(next);
    }
  }
  return p;
}

TestFunction::TestFunction(std::string name, std::vector<double> knots, std::vector<LocalPoly> pieces)
    : name_(std::move(name)), knots_(std::move(knots)), pieces_(std::move(pieces)) {
  if (knots_.size() < 2) throw std::invalid_argument("TestFunction " + name_ + ": need at least two knots");
  if (!std::isfinite(knots_.back())) throw std::invalid_argument("TestFunction " + name_ + ": unbounded support");
  if (knots_.front() != 1.0) throw std::invalid_argument("TestFunction " + name_ + ": first knot must be 1");
  for (std::size_t i = 1; i < knots_.size(); ++i)
    if (!(knots_[i] > knots_[i - 1])) throw std::invalid_argument("TestFunction " + name_ + ": knots must increase");
  if (pieces_.size() + 1 != knots_.size())
    throw std::invalid_argument("TestFunction " + name_ + ": need one piece per knot interval");
  auto close = [](double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); };
  for (std::size_t j = 1; j < pieces_.size(); ++j) {
    const double k = knots_[j];
    if (!close(pieces_[j - 1].value(k), pieces_[j].value(k)) || !close(pieces_[j - 1].d1(k), pieces_[j].d1(k)))
      throw std::invalid_argument("TestFunction " + name_ + ": not C^1 at knot " + format_double(k));
  }
  const double r = knots_.back();
  if (!close(pieces_.back().value(r), 0.0) || !close(pieces_.back().d1(r), 0.0))
    throw std::invalid_argument("TestFunction " + name_ + ": value and slope must vanish at the support end");
}

TestFunction TestFunction::hermite(std::string name, std::vector<double> knots, std::vector<double> values,
                                   std::vector<double> slopes) {
  if (values.size() != knots.size() || slopes.size() != knots.size())
    throw std::invalid_argument("TestFunction::hermite: knots, values and slopes differ in length");
  std::vector<LocalPoly> pieces;
  for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
    const double h = knots[j + 1] - knots[j];
    const double y0 = values[j], y1 = values[j + 1], m0 = slopes[j], m1 = slopes[j + 1];
    pieces.push_back({knots[j],
                      {y0, m0, (-3.0 * y0 - 2.0 * h * m0 + 3.0 * y1 - h * m1) / (h * h),
                       (2.0 * y0 + h * m0 - 2.0 * y1 + h * m1) / (h * h * h)}});
  }
  return TestFunction(std::move(name), std::move(knots), std::move(pieces));
}

TestFunction TestFunction::product(std::string name, double support_end, double scale,
                                   std::vector<std::pair<double, int>> factors) {
  return TestFunction(std::move(name), {1.0, support_end}, {LocalPoly::from_factors(1.0, scale, factors)});
}

std::size_t TestFunction::piece_of(double x) const {
  const auto it = std::upper_bound(knots_.begin(), knots_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  return std::min(i == 0 ? 0 : i - 1, pieces_.size() - 1);
}

double TestFunction::value(double x) const {
  if (x < 1.0 || x >= knots_.back()) return 0.0;
  return pieces_[piece_of(x)].value(x);
}

double TestFunction::d1(double x) const {
  if (x < 1.0 || x >= knots_.back()) return 0.0;
  return pieces_[piece_of(x)].d1(x);
}

double TestFunction::d2(double x) const {
  if (x < 1.0 || x >= knots_.back()) return 0.0;
  return pieces_[piece_of(x)].d2(x);
}

double echeverria_residual(const StationaryLaw& law, const TestFunction& phi, double lambda1, double boundary_scale) {
  if (!(lambda1 > 0.0)) throw std::invalid_argument("echeverria_residual: lambda1 must be positive");
  const double c1 = law.c1(), a1 = law.alpha1();
  double bulk = 0.0;
  const auto& knots = phi.knots();
  for (std::size_t j = 0; j < phi.pieces().size(); ++j) {
    const LocalPoly& piece = phi.pieces()[j];
    auto gen = [&](double x) {
      return (c1 * lambda1 * x * piece.d1(x) + 0.5 * a1 * lambda1 * x * piece.d2(x)) * law.pdf(x);
    };
    bulk += integrate(gen, knots[j], knots[j + 1], {1e-15, 1e-14, 4000}).value;
  }
  return bulk + boundary_scale * law.pdf(1.0) * a1 * lambda1 * phi.d1(1.0);
}

std::vector<TestFunction> echeverria_library() {
  std::vector<TestFunction> lib;
  lib.push_back(TestFunction::product("bump_1_4", 4.0, 1.0, {{1.0, 2}, {4.0, 2}}));
  lib.push_back(TestFunction::product("quartic_4", 4.0, 1.0, {{4.0, 4}}));
  lib.push_back(TestFunction::product("square_5", 5.0, 1.0, {{5.0, 2}}));
  lib.push_back(TestFunction::product("x_times_square_6", 6.0, 1.0, {{0.0, 1}, {6.0, 2}}));
  lib.push_back(TestFunction::product("cubic_3", 3.0, -1.0, {{3.0, 3}}));
  lib.push_back(TestFunction::hermite("plateau_rolloff", {1.0, 2.0, 3.0}, {1.0, 1.0, 0.0}, {0.0, 0.0, 0.0}));
  lib.push_back(TestFunction::product("ramp_2_5", 2.5, 1.0, {{1.0, 1}, {2.5, 2}}));
  lib.push_back(TestFunction::product("shifted_square_7", 7.0, 1.0, {{1.0, 1}, {-1.0, 1}, {7.0, 2}}));
  lib.push_back(TestFunction::hermite("hermite_two_piece", {1.0, 2.0, 4.0}, {0.5, 1.0, 0.0}, {1.0, 0.0, 0.0}));
  lib.push_back(TestFunction::product("wide_10", 10.0, 1e-3, {{1.0, 3}, {10.0, 2}}));
  return lib;
}

void write_stationary_table(std::ostream& os, const StationaryLaw& law, double x_lo, double x_hi, std::size_t points) {
  if (points < 2 || !(x_hi > x_lo)) throw std::invalid_argument("stationary table: need points >= 2 and x_hi > x_lo");
  os << "x,pdf,cdf\n";
  for (std::size_t i = 0; i < points; ++i) {
    const double x = (i + 1 == points) ? x_hi : x_lo + (x_hi - x_lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    os << format_double(x) << ',' << format_double(law.pdf(x)) << ',' << format_double(law.cdf(x)) << '\n';
  }
}

}  // namespace catbranch
