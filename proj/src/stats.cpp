#include "catbranch/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace catbranch {

EmpiricalSample::EmpiricalSample(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_)
    if (std::isnan(v)) throw std::invalid_argument("EmpiricalSample: NaN value");
  std::sort(values_.begin(), values_.end());
}

double EmpiricalSample::cdf(double x) const {
  if (values_.empty()) throw std::invalid_argument("EmpiricalSample::cdf: empty sample");
  const auto it = std::upper_bound(values_.begin(), values_.end(), x);
  return static_cast<double>(it - values_.begin()) / static_cast<double>(values_.size());
}

double ks_one_sample(const EmpiricalSample& sample, const std::function<double(double)>& cdf) {
  if (sample.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  const auto v = sample.values();
  const double m = static_cast<double>(v.size());
  double d = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double f = cdf(v[i]);
    d = std::max({d, static_cast<double>(i + 1) / m - f, f - static_cast<double>(i) / m});
  }
  return d;
}

double ks_two_sample(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  const auto va = a.values(), vb = b.values();
  const double na = static_cast<double>(va.size()), nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < va.size() && j < vb.size()) {
    const double x = std::min(va[i], vb[j]);
    while (i < va.size() && va[i] == x) ++i;
    while (j < vb.size() && vb[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  // Past the end of one sample the gap only shrinks.
  d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  return d;
}

double wasserstein1(const EmpiricalSample& a, const EmpiricalSample& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("wasserstein1: empty sample");
  const auto va = a.values(), vb = b.values();
  if (va.size() == vb.size()) {
    double s = 0.0;
    for (std::size_t i = 0; i < va.size(); ++i) s += std::abs(va[i] - vb[i]);
    return s / static_cast<double>(va.size());
  }
  const double na = static_cast<double>(va.size()), nb = static_cast<double>(vb.size());
  std::size_t i = 0, j = 0;
  double prev = std::min(va[0], vb[0]);
  double s = 0.0;
  while (i < va.size() || j < vb.size()) {
    const double x = (j >= vb.size() || (i < va.size() && va[i] <= vb[j])) ? va[i] : vb[j];
    s += std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb) * (x - prev);
    while (i < va.size() && va[i] == x) ++i;
    while (j < vb.size() && vb[j] == x) ++j;
    prev = x;
  }
  return s;
}

double ks_critical_95(std::size_t m) {
  if (m == 0) throw std::invalid_argument("ks_critical_95: empty sample");
  return 1.36 / std::sqrt(static_cast<double>(m));
}

double ergodic_average(const Path& path, double burn_in) {
  check_path(path);
  const double horizon = path.times.back();
  if (!(horizon > burn_in)) throw std::invalid_argument("ergodic_average: horizon must exceed burn_in");
  const double t0 = std::max(burn_in, 0.0);
  const auto& t = path.times;
  const auto& v = path.values;
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) {
    const double lo = std::max(t[i], t0), hi = t[i + 1];
    if (hi <= lo) continue;
    if (path.kind == PathKind::kPiecewiseConstant) {
      integral += v[i] * (hi - lo);
    } else {
      const double slope = (v[i + 1] - v[i]) / (t[i + 1] - t[i]);
      const double vlo = v[i] + slope * (lo - t[i]);
      integral += 0.5 * (vlo + v[i + 1]) * (hi - lo);
    }
  }
  return integral / (horizon - t0);
}

MomentSummary moments(std::span<const double> xs) {
  if (xs.size() < 2) throw std::invalid_argument("moments: need at least two values");
  MomentSummary m;
  m.count = xs.size();
  const double n = static_cast<double>(xs.size());
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / n;
  double s2 = 0.0, s4 = 0.0;
  for (double x : xs) {
    const double d = x - m.mean;
    s2 += d * d;
    s4 += d * d * d * d;
  }
  m.variance = s2 / (n - 1.0);
  m.se_mean = std::sqrt(m.variance / n);
  const double m4 = s4 / n;
  m.se_variance = std::sqrt(std::max(0.0, m4 - m.variance * m.variance) / n);
  return m;
}

double median(std::vector<double> xs) {
  if (xs.empty()) throw std::invalid_argument("median: empty input");
  std::sort(xs.begin(), xs.end());
  const std::size_t k = xs.size() / 2;
  return xs.size() % 2 ? xs[k] : 0.5 * (xs[k - 1] + xs[k]);
}

}  // namespace catbranch
