#pragma once

// Three-productive-value extension: mixed outcome distributions, grade
// posteriors, marginal benefit, equilibrium effort, the effort-equalization
// cutoff, and effort-curve exploration for the tilde rules.

#include <array>
#include <optional>
#include <vector>

#include "tiergrade/design.hpp"
#include "tiergrade/model.hpp"

namespace tiergrade::multivalue {

struct ValueTriple {
    double v1, v2, v3;  // strictly increasing, wage units
    ValueTriple(double v1, double v2, double v3);
};

// Low/high outcome distributions over {v1, v2, v3}; the high distribution
// must first-order stochastically dominate the low one (rejected otherwise).
struct OutcomeDistributions {
    std::array<double, 3> low;
    std::array<double, 3> high;
    OutcomeDistributions(std::array<double, 3> low, std::array<double, 3> high);
};

enum class RuleKind3 { Tough3, Lenient3, TildeLenient, TildeTough, Custom };

// Row-stochastic 3x3 matrix: value index (v1, v2, v3) -> grade {A, B, C}.
struct GradingMatrix {
    std::array<std::array<double, 3>, 3> rows;  // rows[value][grade]
    RuleKind3 kind = RuleKind3::Custom;

    static GradingMatrix custom(std::array<std::array<double, 3>, 3> rows);
    static GradingMatrix tough3(double b);         // deflates B to C w.p. 1-b
    static GradingMatrix lenient3(double b);       // inflates B to A w.p. 1-b
    static GradingMatrix tilde_lenient(double b);  // inflates C to B w.p. 1-b
    static GradingMatrix tilde_tough(double b);    // deflates A to B w.p. 1-b

    bool canonical() const {
        return kind == RuleKind3::Tough3 || kind == RuleKind3::Lenient3;
    }
};

// (1-x) low + x high.
std::array<double, 3> mix(double x, const OutcomeDistributions& dists);

struct GradePosterior {
    bool reachable;
    double probability;  // Pr(grade | x), 0 when unreachable
    double value;        // posterior expected productive value, NaN when unreachable
};

// Posterior expected value per grade {A, B, C} at success probability x.
std::array<GradePosterior, 3> grade_posteriors(double x, const GradingMatrix& M,
                                               const ValueTriple& values,
                                               const OutcomeDistributions& dists);

// Marginal benefit of effort at x: sum_i (high_i - low_i) sum_g M[i][g] q^g(x).
double marginal_benefit3(const GradingMatrix& M, double x, const ValueTriple& values,
                         const OutcomeDistributions& dists);

// Unique equilibrium effort for the canonical rules (Tough3/Lenient3), by
// bracketed bisection on c'(e) - MB(theta_bar + e). Throws BracketError when
// the sign conditions fail, std::invalid_argument for non-canonical rules.
EquilibriumResult equilibrium_effort3(double theta_bar, const GradingMatrix& M,
                                      const ValueTriple& values,
                                      const OutcomeDistributions& dists,
                                      const ModelParams& params);

// All sign-change roots of c'(e) - MB(theta_bar + e) on a 1e-4 grid, each
// refined by bisection. General matrices may admit several equilibria; the
// full list is returned, never a silent pick.
std::vector<double> equilibrium_roots3(double theta_bar, const GradingMatrix& M,
                                       const ValueTriple& values,
                                       const OutcomeDistributions& dists,
                                       const ModelParams& params);

// Side conditions under which the canonical monotonicity claims are proved;
// instances failing them should skip monotonicity assertions.
bool tough3_monotone_condition(const OutcomeDistributions& dists, double b);
bool lenient3_monotone_condition(const OutcomeDistributions& dists, double b);

// Type cutoff at which Tough3 and Lenient3 induce equal effort.
CutoffResult theta_dagger3(const ValueTriple& values, const OutcomeDistributions& dists,
                           const ModelParams& params);

struct EffortCurveRow {
    double theta_bar;
    std::vector<double> roots;
};

std::vector<EffortCurveRow> effort_curve(const GradingMatrix& M,
                                         const std::vector<double>& theta_grid,
                                         const ValueTriple& values,
                                         const OutcomeDistributions& dists,
                                         const ModelParams& params);

}  // namespace tiergrade::multivalue
