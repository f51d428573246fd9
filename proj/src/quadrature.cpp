#include "catbranch/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <stdexcept>
#include <vector>

namespace catbranch {

namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851, 0.864864423359769072789712788640926,
    0.741531185599394439863864773280788, 0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204, 0.104790010322250183839876322541518,
    0.140653259715525918745189590510238, 0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  QuadratureResult r;
  bool operator<(const Panel& o) const { return r.error < o.r.error; }
};

}  // namespace

QuadratureResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kron = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kXgk[j];
    const double s = f(c - dx) + f(c + dx);
    kron += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  QuadratureResult r;
  r.value = kron * h;
  r.error = std::abs((kron - gauss) * h);
  r.intervals = 1;
  r.converged = std::isfinite(r.value);
  return r;
}

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           const QuadratureOptions& options) {
  if (!std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("integrate: limits must be finite");
  if (a == b) return {0.0, 0.0, 0, true};
  std::priority_queue<Panel> heap;
  auto first = gk15(f, a, b);
  double total = first.value, err = first.error;
  heap.push({a, b, first});
  while (heap.size() < options.max_intervals) {
    if (err <= std::max(options.abs_tol, options.rel_tol * std::abs(total))) break;
    const Panel p = heap.top();
    heap.pop();
    const double m = 0.5 * (p.a + p.b);
    const auto left = gk15(f, p.a, m);
    const auto right = gk15(f, m, p.b);
    total += left.value + right.value - p.r.value;
    err += left.error + right.error - p.r.error;
    heap.push({p.a, m, left});
    heap.push({m, p.b, right});
  }
  // Re-sum to shed the drift of the running totals.
  QuadratureResult out;
  out.intervals = heap.size();
  std::vector<Panel> panels;
  while (!heap.empty()) {
    panels.push_back(heap.top());
    heap.pop();
  }
  for (auto it = panels.rbegin(); it != panels.rend(); ++it) {
    out.value += it->r.value;
    out.error += it->r.error;
  }
  out.converged = std::isfinite(out.value) &&
                  out.error <= std::max(options.abs_tol, options.rel_tol * std::abs(out.value)) * 1.0000001;
  return out;
}

}  // namespace catbranch
