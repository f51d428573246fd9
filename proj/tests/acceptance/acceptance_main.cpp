#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <map>
#include <string>

#include "criteria.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::fprintf(stderr, "usage: %s <criterion 1..10 | all>\n", argv[0]);
    return 2;
  }
  const std::string arg = argv[1];
  std::vector<int> ids;
  if (arg == "all") {
    for (int i : {1, 2, 3, 4, 6, 7, 8, 9, 10, 5}) ids.push_back(i);
  } else {
    const int id = std::atoi(arg.c_str());
    if (id < 1 || id > 10) {
      std::fprintf(stderr, "unknown criterion '%s'\n", arg.c_str());
      return 2;
    }
    ids.push_back(id);
  }
  const std::map<int, double> budget_s{{1, 1.0}, {2, 10.0}, {3, 5.0}, {4, 120.0}, {6, 900.0}, {7, 900.0}, {8, 1800.0}};
  bool all_pass = true;
  for (int id : ids) {
    const auto t0 = std::chrono::steady_clock::now();
    acceptance::Outcome o;
    try {
      o = acceptance::run_criterion(id);
    } catch (const std::exception& e) {
      o.pass = false;
      o.summary = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const auto b = budget_s.find(id); b != budget_s.end()) {
      const bool in_budget = secs < b->second;
      char line[96];
      std::snprintf(line, sizeof line, "%s runtime %.1f s < %.0f s", in_budget ? "ok  " : "FAIL", secs, b->second);
      o.details.emplace_back(line);
      if (!in_budget) o.pass = false;
    }
    for (const auto& d : o.details) std::printf("  %s\n", d.c_str());
    std::printf("criterion %d: %s %s (%.1f s)\n", id, o.pass ? "PASS" : "FAIL", o.summary.c_str(), secs);
    std::fflush(stdout);
    if (id != 5) acceptance::record_invariants(id);
    all_pass = all_pass && o.pass;
  }
  return all_pass ? 0 : 1;
}
