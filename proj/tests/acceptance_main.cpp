// Acceptance gate: one pass/fail line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cstdio>

#include "tiergrade/verify.hpp"

int main() {
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    const auto checks = {
        tiergrade::verify::check_closed_form_anchors(),
        tiergrade::verify::check_prop1_dominance(),
        tiergrade::verify::check_prop2_monotonicity(20240214ULL),
        tiergrade::verify::check_prop3_concavity(20240215ULL),
        tiergrade::verify::check_thm1_oracle(20240216ULL),
        tiergrade::verify::check_thm2_ic(20240217ULL),
        tiergrade::verify::check_thm3_constrained(20240218ULL),
        tiergrade::verify::check_contraction_welfare(20240219ULL),
        tiergrade::verify::check_prop4_three_values(),
        tiergrade::verify::check_simulation(),
    };
    bool all = true;
    int i = 0;
    for (const tiergrade::verify::CheckResult& r : checks) {
        ++i;
        std::printf("criterion %2d %-24s %s%s%s\n", i, r.name.c_str(),
                    r.pass ? "PASS" : "FAIL", r.detail.empty() ? "" : " -- ",
                    r.detail.c_str());
        all = all && r.pass;
    }
    const auto secs =
        std::chrono::duration_cast<std::chrono::seconds>(clock::now() - t0).count();
    std::printf("acceptance: %s (%lld s)\n", all ? "ALL PASS" : "FAILURES",
                static_cast<long long>(secs));
    return all ? 0 : 1;
}
