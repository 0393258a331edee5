#pragma once

// Model primitives: effort cost families, grading rules, employer posteriors,
// payoffs, marginal benefit of effort, and the unique-equilibrium effort solver.

#include <stdexcept>
#include <string>

namespace tiergrade {

// Thrown when the sign conditions required to bracket a root fail. This
// signals invalid parameters, not a solver bug.
struct BracketError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class CostFamily { Quadratic, Power };

// Effort cost c(e). Two admissible families:
//   quadratic: c(e) = kappa*e^2
//   power:     c(e) = kappa*e^p / p, p >= 2
// Both satisfy c'(0)=0, c'' > 0, c''' >= 0 on (0,1).
struct CostFunction {
    CostFamily family = CostFamily::Quadratic;
    double kappa = 1.0;
    double p = 2.0;  // exponent, power family only

    static CostFunction quadratic(double kappa);
    static CostFunction power(double kappa, double p);

    double value(double e) const;
    double prime(double e) const;

    // The unique effort level with c'(e) = 1. Efforts below this cap keep
    // e - c(e) increasing, which is what welfare accounting relies on.
    double prime_inverse_one() const;
};

// Global primitives: type support (0, alpha), informativeness cap b, cost.
struct ModelParams {
    double alpha;
    double b;
    CostFunction cost;

    // Validates 0 < alpha < 1, 0 < b < 1, and cost admissibility:
    // c'(0)=0, c' strictly increasing, c'' nondecreasing (checked on a grid),
    // and c'(1-alpha) > 1. Throws std::invalid_argument on violation.
    ModelParams(double alpha, double b, CostFunction cost);

    double max_effort() const { return 1.0 - alpha; }
};

// Pass probabilities (g0, g1) conditional on productive value 0/1.
// Requires 0 <= g0 < g1 <= 1 and g1 - g0 in [1e-9, b].
struct GradingRule {
    double g0;
    double g1;

    GradingRule(double g0, double g1, double b);

    double spread() const { return g1 - g0; }

    static GradingRule tough(double b);    // (0, b): no false positives
    static GradingRule lenient(double b);  // (1-b, 1): no false negatives

    bool operator==(const GradingRule&) const = default;
};

// Employer posterior that a student with grade pass/fail has value 1, given
// the school mean theta_bar and conjectured effort e_hat.
double posterior_pass(double theta_bar, double e_hat, const GradingRule& g);
double posterior_fail(double theta_bar, double e_hat, const GradingRule& g);

// B(G, x): marginal benefit of effort at prior success probability x in (0,1).
double marginal_benefit(const GradingRule& g, double x);

// Expected payoff of a type-theta student exerting effort e in a school with
// mean theta_bar, rule g, when employers conjecture effort e_hat.
double expected_payoff(double theta, double e, double e_hat, double theta_bar,
                       const GradingRule& g, const CostFunction& cost);

struct EquilibriumResult {
    double effort;     // in (0, 1 - alpha)
    double residual;   // |B(G, theta_bar + effort) - c'(effort)|
    int iterations;
};

// Unique root of h(e) = B(G, theta_bar + e) - c'(e) on (0, 1-alpha), by
// bracketed bisection. h(0) > 0 and h(1-alpha) < 0 are asserted before
// solving; throws BracketError if either sign condition fails.
EquilibriumResult equilibrium_effort(double theta_bar, const GradingRule& g,
                                     const ModelParams& params);

// Grid best-response audit: true iff no effort on a 1e-3-step grid improves
// the payoff at e by more than 1e-9.
bool verify_equilibrium(double theta_bar, const GradingRule& g, double e,
                        const ModelParams& params);

namespace detail {
// Shared guard: prior must lie in (0,1), at least 1e-12 away from either end.
void check_prior(double x, const char* what);
}  // namespace detail

}  // namespace tiergrade
