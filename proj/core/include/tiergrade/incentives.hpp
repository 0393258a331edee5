#pragma once

// Incentive compatibility without transfers, regular systems and fee
// schedules, and constrained-optimal design over continuous type
// distributions.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tiergrade/design.hpp"
#include "tiergrade/model.hpp"

namespace tiergrade {

struct RegularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Atomless type distribution on [0, alpha]. Either closed-form uniform, or a
// discretized atom grid (>= 1000 points) standing in for an arbitrary F.
class TypeDistribution {
public:
    static TypeDistribution uniform(double alpha);
    // atoms: (type, mass) pairs with types in (0, alpha]; masses normalized.
    static TypeDistribution discretized(std::vector<std::pair<double, double>> atoms,
                                        double alpha);

    double alpha() const { return alpha_; }
    double cdf(double theta) const;
    double mean() const;
    // Mean of theta conditional on theta in (a, b]; requires cdf(b) > cdf(a).
    double conditional_mean(double a, double b) const;

private:
    TypeDistribution() = default;
    bool is_uniform_ = true;
    double alpha_ = 0.0;
    std::vector<std::pair<double, double>> atoms_;  // sorted by type
};

// One tier of a regular system: type interval (lo, hi], rule, and the derived
// mass, conditional mean and equilibrium effort.
struct Tier {
    double lo;
    double hi;
    GradingRule rule;
    double mass;
    double mean;
    double effort;
};

struct RegularSystem {
    std::vector<Tier> tiers;  // ordered by cutoff
    double welfare(const ModelParams& params) const;
};

// Builds the tiers induced by interior cutoffs (sorted, in (0, alpha)) and
// one rule per tier. Does not check effort monotonicity; see is_regular.
RegularSystem make_regular(const TypeDistribution& F,
                           const std::vector<double>& interior_cutoffs,
                           const std::vector<GradingRule>& rules,
                           const ModelParams& params);

struct RegularityCheck {
    bool regular;
    std::string diagnosis;  // first violated invariant, empty when regular
};

RegularityCheck is_regular(const RegularSystem& system, const ModelParams& params);

// Affine decomposition of the indirect utility of attending a school:
// U*(theta) = intercept + theta * slope with slope = c'(e*).
struct AffineUtility {
    double intercept;  // zeta
    double slope;      // c'(e*)
    double effort;     // e*
};

AffineUtility zeta(double theta_bar, const GradingRule& rule, const ModelParams& params);

// U*_s(theta): payoff of a type-theta student at the school's equilibrium.
double indirect_utility(double theta, double theta_bar, const GradingRule& rule,
                        const ModelParams& params);

struct ICWitness {
    int student;
    int better_school;
    double gap;
};

struct ICResult {
    bool incentive_compatible;
    std::optional<ICWitness> witness;
};

// Incentive compatibility without transfers, tolerance 1e-10.
ICResult ic_without_transfers(const SchoolSystem& system, const ModelParams& params);

// Per-tier fees, normalized to fees[0] = 0.
struct FeeSchedule {
    std::vector<double> fees;
};

// Adjacent-indifference fee construction for a regular system. Verifies
// global IC on a 1000-point type grid; throws RegularityError if the system
// is not regular, std::logic_error if the grid check fails.
FeeSchedule fees_for_regular(const RegularSystem& system, const ModelParams& params);

struct TwoTierWelfare {
    double welfare;
    double cutoff;
    double mass_bottom;
    double mean_bottom, mean_top;
    double effort_bottom, effort_top;
};

// Welfare of the Tough-bottom/Lenient-top split of F at the given cutoff.
// Throws std::invalid_argument if either tier is degenerate.
TwoTierWelfare welfare_two_tier(const TypeDistribution& F, double cutoff,
                                const ModelParams& params);

struct ConstrainedOptimum {
    RegularSystem system;
    FeeSchedule fees;
    double welfare;
    bool two_tier;
    bool constraint_bound;          // effort-monotonicity constraint was active
    double unconstrained_cutoff;    // welfare argmax before the constraint
    double cutoff;                  // final cutoff (two-tier only)
};

// Best of {single tier with the best extreme rule} and {two-tier cutoffs
// under effort monotonicity}; when the unconstrained argmax violates
// e_top >= e_bottom, the cutoff is raised to the unique equalization point.
ConstrainedOptimum constrained_optimal(const TypeDistribution& F,
                                       const ModelParams& params);

enum class ContractionKind { None, NonDecreasing, Increasing };

// Checks whether B coarsens A's cutoffs with tier efforts weakly (strictly,
// for Increasing) above the mass-weighted averages of the tiers they merge.
ContractionKind is_contraction(const RegularSystem& a, const RegularSystem& b);

}  // namespace tiergrade
