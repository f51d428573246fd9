#include "catbranch/skorohod.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "catbranch/format.hpp"

namespace catbranch {

void check_path(const Path& p) {
  if (p.times.empty()) throw InvalidPath("path is empty");
  if (p.times.size() != p.values.size()) throw InvalidPath("path times and values differ in length");
  if (p.times.front() != 0.0) throw InvalidPath("path must start at time 0");
  for (std::size_t i = 1; i < p.times.size(); ++i)
    if (!(p.times[i] > p.times[i - 1])) throw InvalidPath("path times not strictly increasing at node " + std::to_string(i));
}

Reflection skorohod_reflect(const Path& psi) {
  check_path(psi);
  if (!(psi.values.front() >= 1.0))
    throw InvalidPath("reflection input must start at or above 1, got " + format_double(psi.values.front()));
  Reflection r;
  r.phi.times = r.eta.times = psi.times;
  r.phi.kind = r.eta.kind = psi.kind;
  r.phi.values.resize(psi.size());
  r.eta.values.resize(psi.size());
  double running_min = 1.0;
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double v = psi.values[i];
    running_min = std::min(running_min, std::min(v, 1.0));
    // eta = 1 - min(psi ^ 1); phi = psi + eta
    const double eta = 1.0 - running_min;
    r.eta.values[i] = eta;
    r.phi.values[i] = std::max(v + eta, 1.0);
  }
  return r;
}

LipschitzGap lipschitz_gap(const Path& psi, const Path& psi_tilde, double horizon) {
  check_path(psi);
  check_path(psi_tilde);
  if (psi.times != psi_tilde.times) throw InvalidPath("lipschitz_gap: paths are on different grids");
  const auto a = skorohod_reflect(psi);
  const auto b = skorohod_reflect(psi_tilde);
  LipschitzGap g;
  for (std::size_t i = 0; i < psi.size() && psi.times[i] <= horizon; ++i) {
    g.lhs = std::max(g.lhs, std::abs(a.phi.values[i] - b.phi.values[i]));
    g.rhs = std::max(g.rhs, 2.0 * std::abs(psi.values[i] - psi_tilde.values[i]));
  }
  return g;
}

void write_path_csv(std::ostream& os, const Path& p) {
  os << "time,value\n";
  for (std::size_t i = 0; i < p.size(); ++i) os << format_double(p.times[i]) << ',' << format_double(p.values[i]) << '\n';
}

void write_reflection_csv(std::ostream& os, const Reflection& r) {
  os << "time,phi,eta\n";
  for (std::size_t i = 0; i < r.phi.size(); ++i)
    os << format_double(r.phi.times[i]) << ',' << format_double(r.phi.values[i]) << ','
       << format_double(r.eta.values[i]) << '\n';
}

}  // namespace catbranch
