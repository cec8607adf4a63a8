#pragma once

// Reproduction checks behind the reproduce-paper subcommand: one function per
// numbered criterion, each returning a pass/fail verdict with the measured
// numbers. Tolerances and runtime budgets are pinned in the implementations.

#include <string>
#include <vector>

namespace fgeo::accept {

struct CriterionResult {
  int number = 0;
  std::string name;
  bool pass = false;
  double seconds = 0;
  std::string details;
};

CriterionResult ellipsoid_sharpness();        // 1
CriterionResult spectral_oracle();            // 2
CriterionResult katok_ellipsoid_identity();   // 3
CriterionResult pullback_identity();          // 4
CriterionResult theorem_b_positive();         // 5
CriterionResult focusing_property();          // 6
CriterionResult theorem_a_cylinder();         // 7
CriterionResult reversibility_rademacher();   // 8
CriterionResult property_suites();            // 9

std::vector<CriterionResult> run_all();

}  // namespace fgeo::accept
