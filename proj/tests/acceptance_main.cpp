// Acceptance suite: one pass/fail line per criterion; exit 0 iff all pass.

#include <cstdio>

#include "fgeo/acceptance.hpp"

int main() {
  auto results = fgeo::accept::run_all();
  bool all = true;
  double total = 0;
  for (const auto& r : results) {
    std::printf("[%s] %d. %s  (%.1fs)\n", r.pass ? "PASS" : "FAIL", r.number,
                r.name.c_str(), r.seconds);
    if (!r.details.empty()) std::printf("       %s\n", r.details.c_str());
    all = all && r.pass;
    total += r.seconds;
  }
  std::printf("%s  (%zu criteria, %.1fs total)\n",
              all ? "ACCEPTANCE: ALL PASS" : "ACCEPTANCE: FAILURES PRESENT",
              results.size(), total);
  return all ? 0 : 1;
}
