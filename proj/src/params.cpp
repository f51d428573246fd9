#include "catbranch/params.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

#include "catbranch/format.hpp"

namespace catbranch {

OffspringPmf::OffspringPmf(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw std::invalid_argument("offspring pmf: empty support");
  if (probs_.size() > kMaxSupport) throw std::invalid_argument("offspring pmf: support exceeds 2^16");
  double total = 0.0;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (!(probs_[k] >= 0.0) || !std::isfinite(probs_[k]))
      throw std::invalid_argument("offspring pmf: entry " + std::to_string(k) + " is negative or not finite");
    total += probs_[k];
  }
  if (std::abs(total - 1.0) > 1e-12)
    throw std::invalid_argument("offspring pmf: entries sum to " + format_double(total) + ", not 1");
  while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
}

OffspringPmf OffspringPmf::delta(std::size_t k) {
  std::vector<double> p(k + 1, 0.0);
  p[k] = 1.0;
  return OffspringPmf(std::move(p));
}

OffspringPmf OffspringPmf::near_critical(double c, double alpha, std::int64_t n) {
  // mean = 1 + p2 - p0 = 1 + c/n, spread = p0 + p2 = alpha
  const double shift = c / static_cast<double>(n);
  const double p0 = 0.5 * (alpha - shift);
  const double p2 = 0.5 * (alpha + shift);
  const double p1 = 1.0 - alpha;
  if (p0 < 0.0 || p2 < 0.0 || p1 < 0.0)
    throw std::invalid_argument("near-critical three-point law infeasible for c=" + format_double(c) +
                                ", alpha=" + format_double(alpha) + ", n=" + std::to_string(n));
  return OffspringPmf({p0, p1, p2});
}

std::string OffspringPmf::to_string() const {
  std::string out;
  for (std::size_t k = 0; k < probs_.size(); ++k) {
    if (probs_[k] == 0.0) continue;
    if (!out.empty()) out += ',';
    out += std::to_string(k) + ':' + format_double(probs_[k]);
  }
  return out;
}

OffspringPmf parse_pmf(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    auto b = item.find_first_not_of(" \t");
    auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw std::invalid_argument("offspring pmf: empty item in '" + text + "'");
    items.push_back(item.substr(b, e - b + 1));
  }
  if (items.empty()) throw std::invalid_argument("offspring pmf: empty");
  const bool sparse = items.front().find(':') != std::string::npos;
  std::vector<double> probs;
  for (std::size_t i = 0; i < items.size(); ++i) {
    const auto& it = items[i];
    std::size_t k = i;
    std::string value = it;
    const auto colon = it.find(':');
    if (sparse != (colon != std::string::npos))
      throw std::invalid_argument("offspring pmf: mixed sparse and dense items in '" + text + "'");
    if (sparse) {
      k = static_cast<std::size_t>(parse_int(it.substr(0, colon), "offspring count"));
      value = it.substr(colon + 1);
      if (k >= OffspringPmf::kMaxSupport) throw std::invalid_argument("offspring pmf: support exceeds 2^16");
    }
    if (probs.size() <= k) probs.resize(k + 1, 0.0);
    if (sparse && probs[k] != 0.0) throw std::invalid_argument("offspring pmf: duplicate count " + std::to_string(k));
    probs[k] = parse_double(value, "probability");
  }
  return OffspringPmf(std::move(probs));
}

OffspringMoments offspring_moments(const OffspringPmf& pmf) {
  OffspringMoments m;
  const auto& p = pmf.probs();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double kk = static_cast<double>(k);
    m.mean += kk * p[k];
    m.spread += (kk - 1.0) * (kk - 1.0) * p[k];
  }
  return m;
}

std::int64_t lattice_count(double mass, std::int64_t n, const char* what) {
  const double scaled = mass * static_cast<double>(n);
  const double rounded = std::nearbyint(scaled);
  if (!std::isfinite(scaled) || std::abs(scaled - rounded) > 1e-9 * std::max(1.0, std::abs(scaled)))
    throw std::invalid_argument(std::string(what) + " = " + format_double(mass) + " is not on the lattice {l/" +
                                std::to_string(n) + "}");
  return static_cast<std::int64_t>(rounded);
}

DiffusionParams diffusion_limit_of(const BranchingParams& bp) {
  DiffusionParams d;
  d.c1 = bp.c1();
  d.c2 = bp.c2();
  d.alpha1 = bp.alpha1();
  d.alpha2 = bp.alpha2();
  d.lambda1 = bp.lambda1;
  d.lambda2 = bp.lambda2;
  d.x0 = bp.x0();
  d.y0 = bp.y0();
  d.a_n = bp.a_n;
  return d;
}

BranchingParams branching_member(const DiffusionParams& limit, std::int64_t n) {
  BranchingParams bp;
  bp.n = n;
  bp.lambda1 = limit.lambda1;
  bp.lambda2 = limit.lambda2;
  bp.pmf1 = OffspringPmf::near_critical(limit.c1, limit.alpha1, n);
  bp.pmf2 = OffspringPmf::near_critical(limit.c2, limit.alpha2, n);
  bp.x0_count = lattice_count(limit.x0, n, "x0");
  bp.y0_count = lattice_count(limit.y0, n, "y0");
  bp.a_n = limit.a_n;
  return bp;
}

bool ValidationReport::ok() const {
  for (const auto& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string ValidationReport::failures() const {
  std::string out;
  for (const auto& c : checks) {
    if (c.passed) continue;
    if (!out.empty()) out += "; ";
    out += c.name + ": " + c.detail;
  }
  return out;
}

ValidationError::ValidationError(ValidationReport report)
    : std::runtime_error("parameter validation failed: " + report.failures()), report_(std::move(report)) {}

namespace {

void add(ValidationReport& r, std::string name, bool passed, std::string detail) {
  r.checks.push_back({std::move(name), passed, std::move(detail)});
}

void check_positive(ValidationReport& r, const std::string& name, double v) {
  add(r, name + " in (0,inf)", v > 0.0 && std::isfinite(v), name + " = " + format_double(v));
}

}  // namespace

ValidationReport validate(const BranchingParams& p, bool require_subcritical) {
  ValidationReport r;
  add(r, "n >= 1", p.n >= 1, "n = " + std::to_string(p.n));
  const double n = static_cast<double>(p.n);
  check_positive(r, "lambda1", p.lambda1);
  check_positive(r, "lambda2", p.lambda2);
  const auto mom1 = offspring_moments(p.pmf1);
  const auto mom2 = offspring_moments(p.pmf2);
  check_positive(r, "alpha1", mom1.spread);
  check_positive(r, "alpha2", mom2.spread);
  const double c1 = n * (mom1.mean - 1.0);
  const double c2 = n * (mom2.mean - 1.0);
  add(r, "c1 > -n", c1 > -n, "c1 = " + format_double(c1));
  add(r, "c2 > -n", c2 > -n, "c2 = " + format_double(c2));
  if (require_subcritical) add(r, "c1 < 0 (subcritical)", c1 < 0.0, "c1 = " + format_double(c1));
  add(r, "x0 >= 1", p.x0_count >= p.n, "x0 = " + format_double(p.x0()));
  add(r, "y0 >= 0", p.y0_count >= 0, "y0 = " + format_double(p.y0()));
  add(r, "a_n >= 1", p.a_n >= 1.0 && std::isfinite(p.a_n), "a_n = " + format_double(p.a_n));
  r.notes.push_back("finite offspring support (K_max1=" + std::to_string(p.pmf1.max_offspring()) +
                    ", K_max2=" + std::to_string(p.pmf2.max_offspring()) +
                    "): a bounded moment generating function exists for every delta > 0");
  r.notes.push_back("limit conditions on the sequence (convergence of c_i, alpha_i, lambda_i, x0, y0) "
                    "need a family; only per-n constraints were checked");
  return r;
}

void require_valid(const BranchingParams& params, bool require_subcritical) {
  auto r = validate(params, require_subcritical);
  if (!r.ok()) throw ValidationError(std::move(r));
}

ValidationReport validate(const DiffusionParams& p, bool require_subcritical) {
  ValidationReport r;
  check_positive(r, "alpha1", p.alpha1);
  check_positive(r, "alpha2", p.alpha2);
  check_positive(r, "lambda1", p.lambda1);
  check_positive(r, "lambda2", p.lambda2);
  add(r, "c1 finite", std::isfinite(p.c1), "c1 = " + format_double(p.c1));
  add(r, "c2 finite", std::isfinite(p.c2), "c2 = " + format_double(p.c2));
  if (require_subcritical) add(r, "c1 < 0 (subcritical)", p.c1 < 0.0, "c1 = " + format_double(p.c1));
  add(r, "x0 >= 1", p.x0 >= 1.0 && std::isfinite(p.x0), "x0 = " + format_double(p.x0));
  add(r, "y0 >= 0", p.y0 >= 0.0 && std::isfinite(p.y0), "y0 = " + format_double(p.y0));
  add(r, "a_n >= 1", p.a_n >= 1.0 && std::isfinite(p.a_n), "a_n = " + format_double(p.a_n));
  return r;
}

void require_valid(const DiffusionParams& params, bool require_subcritical) {
  auto r = validate(params, require_subcritical);
  if (!r.ok()) throw ValidationError(std::move(r));
}

namespace {

double tail_mass(const OffspringPmf& pmf, double threshold) {
  const double m = offspring_moments(pmf).mean;
  double tail = 0.0;
  const auto& p = pmf.probs();
  for (std::size_t l = 0; l < p.size(); ++l) {
    const double ll = static_cast<double>(l);
    if (ll > threshold) tail += (ll - m) * (ll - m) * p[l];
  }
  return tail;
}

}  // namespace

FamilyReport family_check(const std::vector<BranchingParams>& family, double epsilon) {
  if (family.empty()) throw std::invalid_argument("family_check: empty parameter list");
  if (!(epsilon > 0.0)) throw std::invalid_argument("family_check: epsilon must be positive");
  FamilyReport rep;
  rep.epsilon = epsilon;
  for (std::size_t i = 0; i < family.size(); ++i) {
    const auto& p = family[i];
    if (i > 0 && p.n <= family[i - 1].n) throw std::invalid_argument("family_check: list not ordered by increasing n");
    FamilyRow row;
    row.n = p.n;
    const double threshold = epsilon * std::sqrt(static_cast<double>(p.n));
    row.tail1 = tail_mass(p.pmf1, threshold);
    row.tail2 = tail_mass(p.pmf2, threshold);
    row.c1 = p.c1();
    row.c2 = p.c2();
    row.alpha1 = p.alpha1();
    row.alpha2 = p.alpha2();
    row.lambda1 = p.lambda1;
    row.lambda2 = p.lambda2;
    row.x0 = p.x0();
    row.y0 = p.y0();
    rep.rows.push_back(row);
  }
  rep.has_trend = rep.rows.size() >= 2;
  if (rep.has_trend) {
    for (std::size_t i = 1; i < rep.rows.size(); ++i) {
      const auto& a = rep.rows[i - 1];
      const auto& b = rep.rows[i];
      if (b.tail1 > a.tail1 || b.tail2 > a.tail2) {
        rep.tails_vanishing = false;
        rep.flags.push_back("tail mass increases from n=" + std::to_string(a.n) + " to n=" + std::to_string(b.n));
      }
    }
    const auto& last = rep.rows.back();
    const auto& first = rep.rows.front();
    if (last.tail1 > 0.0 && last.tail1 >= first.tail1) {
      rep.tails_vanishing = false;
      rep.flags.push_back("catalyst tail mass does not decrease over the family");
    }
    if (last.tail2 > 0.0 && last.tail2 >= first.tail2) {
      rep.tails_vanishing = false;
      rep.flags.push_back("reactant tail mass does not decrease over the family");
    }
  }
  return rep;
}

}  // namespace catbranch
