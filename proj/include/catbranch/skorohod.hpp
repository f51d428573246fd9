#pragma once

#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace catbranch {

enum class PathKind { kPiecewiseConstant, kPiecewiseLinear };

/// Time-stamped sample path, interpreted only at its own nodes.
struct Path {
  std::vector<double> times;
  std::vector<double> values;
  PathKind kind = PathKind::kPiecewiseLinear;

  std::size_t size() const { return times.size(); }
};

class InvalidPath : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws InvalidPath unless times start at 0, strictly increase and match values in length.
void check_path(const Path& p);

struct Reflection {
  Path phi;
  Path eta;
};

/// Skorohod map at boundary 1: phi(t) = psi(t) + 1 - min_{s<=t}(psi(s) ^ 1), eta = phi - psi.
Reflection skorohod_reflect(const Path& psi);

struct LipschitzGap {
  double lhs = 0.0;  // sup |Gamma psi - Gamma psi~| over nodes up to horizon
  double rhs = 0.0;  // 2 sup |psi - psi~|
};

LipschitzGap lipschitz_gap(const Path& psi, const Path& psi_tilde, double horizon);

void write_path_csv(std::ostream& os, const Path& p);
void write_reflection_csv(std::ostream& os, const Reflection& r);

}  // namespace catbranch
