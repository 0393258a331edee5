#pragma once

// Welfare accounting, structure classification, socially optimal system
// search, brute-force partition oracle, and the theta/sigma cutoffs.

#include <string>
#include <vector>

#include "tiergrade/model.hpp"

namespace tiergrade {

struct Student {
    std::string id;
    double theta;  // in (0, alpha)
};

// A finite-population school system: one grading rule per school, and an
// assignment of every student to a school. Every school must be non-empty.
struct SchoolSystem {
    std::vector<Student> students;
    std::vector<GradingRule> rules;   // one per school
    std::vector<int> assignment;      // student index -> school index

    int school_count() const { return static_cast<int>(rules.size()); }

    // Throws std::invalid_argument if the assignment is not surjective, sizes
    // mismatch, or any theta falls outside (0, alpha).
    void validate(const ModelParams& params) const;

    double school_mass(int s) const;
    double school_mean(int s) const;
};

enum class StructureKind { SingleTier, TwoTier, Other };

struct StructureClass {
    StructureKind kind = StructureKind::Other;
    // TwoTier only: school indices per tier and the separating type bound.
    std::vector<int> bottom_schools;
    std::vector<int> top_schools;
    double separating_type = 0.0;
};

struct SchoolWelfare {
    double mass;
    double mean_type;
    double effort;
    double contribution;  // mass * (mean + effort - c(effort))
};

struct WelfareReport {
    double total = 0.0;
    std::vector<SchoolWelfare> per_school;
};

WelfareReport system_welfare(const SchoolSystem& system, const ModelParams& params);

StructureClass structure_classify(const SchoolSystem& system);

enum class RangeFlag { InRange, OutOfRangeLow, OutOfRangeHigh };

struct CutoffResult {
    double value;
    RangeFlag flag;
};

// Mean-type cutoff at which Tough and Lenient induce equal effort. Bisection
// on the increasing difference xi(.,Lenient) - xi(.,Tough); boundary flag if
// the difference keeps one sign on (eps, alpha - eps).
CutoffResult theta_dagger(const ModelParams& params);

// Tough below theta_dagger, Lenient above; ties within 1e-9 go to Lenient.
GradingRule best_extreme_rule(double theta_bar, const ModelParams& params);

struct DesignResult {
    SchoolSystem system;
    WelfareReport report;
};

// Theorem-1 search: single school with the best extreme rule, or a sorted
// prefix cutoff with Tough below and Lenient above. Ties broken toward fewer
// tiers, then the smaller cutoff.
DesignResult optimal_two_tier(std::vector<Student> students, const ModelParams& params);

// All grid-rule pairs (g0, g1) with g0, g1 in {0, 0.1, ..., 1}, g0 < g1,
// g1 - g0 <= b, plus Tough and Lenient exactly.
std::vector<GradingRule> default_rule_grid(const ModelParams& params);

// Exhaustive oracle: every set partition of the students into at most
// max_schools blocks, each block graded by its best rule from the grid.
// Guarded to m <= 6 students.
DesignResult brute_force_design(const std::vector<Student>& students,
                                const std::vector<GradingRule>& rule_grid,
                                int max_schools, const ModelParams& params);

// Spread cutoff for the two-type population mu +- sigma (equal masses):
// below it a single school is optimal, above it the two-tier split wins.
CutoffResult sigma_dagger(double mu, const ModelParams& params);

// Welfare gap D(sigma) = [two-tier welfare] - [single-tier welfare] for the
// two-type population; exposed for curve inspection and tests.
double sigma_welfare_gap(double mu, double sigma, const ModelParams& params);

}  // namespace tiergrade
