#pragma once

// One-shot numerical verification suite: closed-form anchors plus property
// checks for every proposition and theorem, at desk scale. Shared by the CLI
// `verify` command and the acceptance test binary.

#include <cstdint>
#include <string>
#include <vector>

#include "tiergrade/model.hpp"

namespace tiergrade::verify {

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

// alpha = 0.5, b = 0.5, quadratic kappa = 2.
ModelParams default_params();

CheckResult check_closed_form_anchors();
CheckResult check_prop1_dominance();
CheckResult check_prop2_monotonicity(std::uint64_t seed);
CheckResult check_prop3_concavity(std::uint64_t seed);
CheckResult check_thm1_oracle(std::uint64_t seed);
CheckResult check_thm2_ic(std::uint64_t seed);
CheckResult check_thm3_constrained(std::uint64_t seed);
CheckResult check_contraction_welfare(std::uint64_t seed);
CheckResult check_prop4_three_values();
CheckResult check_simulation();

std::vector<CheckResult> run_all(std::uint64_t seed = 20240214ULL);

}  // namespace tiergrade::verify
