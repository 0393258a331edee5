#include <cmath>

#include <doctest.h>

#include "tiergrade/model.hpp"

using namespace tiergrade;

namespace {
ModelParams base() { return ModelParams(0.5, 0.5, CostFunction::quadratic(2.0)); }
}  // namespace

TEST_CASE("cost families: values, derivatives, unit-slope point") {
    const CostFunction q = CostFunction::quadratic(2.0);
    CHECK(q.value(0.3) == doctest::Approx(2.0 * 0.09).epsilon(1e-14));
    CHECK(q.prime(0.3) == doctest::Approx(1.2).epsilon(1e-14));
    CHECK(q.prime_inverse_one() == doctest::Approx(0.25).epsilon(1e-14));

    const CostFunction p = CostFunction::power(3.0, 3.0);
    CHECK(p.value(0.4) == doctest::Approx(3.0 * 0.064 / 3.0).epsilon(1e-14));
    CHECK(p.prime(0.4) == doctest::Approx(3.0 * 0.16).epsilon(1e-14));
    CHECK(p.prime_inverse_one() == doctest::Approx(std::sqrt(1.0 / 3.0)).epsilon(1e-12));
}

TEST_CASE("parameter validation rejects inadmissible primitives") {
    CHECK_THROWS_AS(ModelParams(0.0, 0.5, CostFunction::quadratic(2.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(1.0, 0.5, CostFunction::quadratic(2.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.5, 0.0, CostFunction::quadratic(2.0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(ModelParams(0.5, 1.0, CostFunction::quadratic(2.0)),
                    std::invalid_argument);
    // Quadratic admissibility needs 2*kappa*(1-alpha) > 1.
    CHECK_THROWS_AS(ModelParams(0.5, 0.5, CostFunction::quadratic(1.0)),
                    std::invalid_argument);
    CHECK_NOTHROW(ModelParams(0.5, 0.5, CostFunction::quadratic(1.001)));
    // Power admissibility needs kappa*(1-alpha)^(p-1) > 1.
    CHECK_THROWS_AS(ModelParams(0.5, 0.5, CostFunction::power(2.0, 3.0)),
                    std::invalid_argument);
    CHECK_NOTHROW(ModelParams(0.5, 0.5, CostFunction::power(4.1, 3.0)));
    CHECK_THROWS_AS(CostFunction::power(2.0, 1.5), std::invalid_argument);
}

TEST_CASE("grading rule bounds") {
    CHECK_THROWS_AS(GradingRule(0.3, 0.3, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GradingRule(0.2, 0.8, 0.5), std::invalid_argument);  // spread > b
    CHECK_THROWS_AS(GradingRule(-0.1, 0.2, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(GradingRule(0.8, 1.1, 0.5), std::invalid_argument);
    const GradingRule t = GradingRule::tough(0.5);
    const GradingRule l = GradingRule::lenient(0.5);
    CHECK(t.g0 == 0.0);
    CHECK(t.g1 == 0.5);
    CHECK(l.g0 == 0.5);
    CHECK(l.g1 == 1.0);
}

TEST_CASE("posteriors at a symmetric interior rule") {
    // x = 0.5, G = (0.25, 0.75): pass prob 0.5, q+ = 0.75, q- = 0.25.
    const GradingRule g(0.25, 0.75, 0.5);
    CHECK(posterior_pass(0.5, 0.0, g) == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(posterior_fail(0.5, 0.0, g) == doctest::Approx(0.25).epsilon(1e-14));
    // Extremes: Tough pass is fully revealing, Lenient fail is fully revealing.
    const GradingRule t = GradingRule::tough(0.5);
    const GradingRule l = GradingRule::lenient(0.5);
    CHECK(posterior_pass(0.3, 0.1, t) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(posterior_fail(0.3, 0.1, l) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("marginal benefit closed forms at the extremes") {
    const double b = 0.5;
    const GradingRule t = GradingRule::tough(b);
    const GradingRule l = GradingRule::lenient(b);
    for (double x : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        CHECK(marginal_benefit(t, x) ==
              doctest::Approx(b * (1.0 - x) / (1.0 - x * b)).epsilon(1e-13));
        CHECK(marginal_benefit(l, x) ==
              doctest::Approx(b * x / (1.0 - b + x * b)).epsilon(1e-13));
    }
    // The two curves cross exactly at x = 1/2.
    CHECK(marginal_benefit(t, 0.5) == doctest::Approx(marginal_benefit(l, 0.5)));
}

TEST_CASE("prior guard rejects degenerate success probabilities") {
    const GradingRule t = GradingRule::tough(0.5);
    CHECK_THROWS_AS(marginal_benefit(t, 0.0), std::domain_error);
    CHECK_THROWS_AS(marginal_benefit(t, 1.0), std::domain_error);
    CHECK_THROWS_AS(posterior_pass(0.0, 0.0, t), std::domain_error);
}

TEST_CASE("equilibrium effort matches the hand-solved quadratic anchors") {
    const ModelParams params = base();
    // Tough, theta_bar = 0.25: 2e^2 - 4e + 0.375 = 0 => e = (4 - sqrt(13))/4.
    const double e_t =
        equilibrium_effort(0.25, GradingRule::tough(0.5), params).effort;
    CHECK(e_t == doctest::Approx((4.0 - std::sqrt(13.0)) / 4.0).epsilon(1e-10));
    // Lenient, theta_bar = 0.25: 4e^2 + 4e - 0.25 = 0 => e = (sqrt(20) - 4)/8.
    const double e_l =
        equilibrium_effort(0.25, GradingRule::lenient(0.5), params).effort;
    CHECK(e_l == doctest::Approx((std::sqrt(20.0) - 4.0) / 8.0).epsilon(1e-10));
}

TEST_CASE("equilibrium invariants: residual, range, fixed-point audit") {
    const ModelParams params = base();
    for (double theta : {0.05, 0.2, 0.35, 0.49})
        for (const GradingRule& g :
             {GradingRule::tough(0.5), GradingRule::lenient(0.5),
              GradingRule(0.2, 0.6, 0.5)}) {
            const EquilibriumResult eq = equilibrium_effort(theta, g, params);
            CHECK(eq.effort > 0.0);
            CHECK(eq.effort < params.max_effort());
            CHECK(eq.residual <= 1e-10);
            CHECK(verify_equilibrium(theta, g, eq.effort, params));
        }
}

TEST_CASE("deviation payoff is maximized at the equilibrium effort") {
    const ModelParams params = base();
    const GradingRule g = GradingRule::tough(0.5);
    const double theta_bar = 0.3;
    const EquilibriumResult eq = equilibrium_effort(theta_bar, g, params);
    const double at_star =
        expected_payoff(theta_bar, eq.effort, eq.effort, theta_bar, g, params.cost);
    for (double e = 0.0; e <= params.max_effort(); e += 0.01)
        CHECK(expected_payoff(theta_bar, e, eq.effort, theta_bar, g, params.cost) <=
              at_star + 1e-9);
}
