#include <cmath>

#include <doctest.h>

#include "tiergrade/model.hpp"
#include "tiergrade/multivalue.hpp"

using namespace tiergrade;
using namespace tiergrade::multivalue;

namespace {
ModelParams base() { return ModelParams(0.5, 0.5, CostFunction::quadratic(2.0)); }

OutcomeDistributions spread_dists() {
    return OutcomeDistributions({0.6, 0.3, 0.1}, {0.1, 0.3, 0.6});
}
}  // namespace

TEST_CASE("value triple and outcome distribution validation") {
    CHECK_THROWS_AS(ValueTriple(1.0, 1.0, 2.0), std::invalid_argument);
    CHECK_THROWS_AS(ValueTriple(2.0, 1.0, 3.0), std::invalid_argument);
    CHECK_NOTHROW(ValueTriple(0.0, 1.0, 2.0));
    // Not a simplex.
    CHECK_THROWS_AS(OutcomeDistributions({0.5, 0.5, 0.5}, {0.1, 0.3, 0.6}),
                    std::invalid_argument);
    // High fails to dominate low.
    CHECK_THROWS_AS(OutcomeDistributions({0.1, 0.3, 0.6}, {0.6, 0.3, 0.1}),
                    std::invalid_argument);
    CHECK_NOTHROW(spread_dists());
}

TEST_CASE("grading matrices are row-stochastic with the documented shapes") {
    const double b = 0.5;
    const GradingMatrix t = GradingMatrix::tough3(b);
    const GradingMatrix l = GradingMatrix::lenient3(b);
    const GradingMatrix tl = GradingMatrix::tilde_lenient(b);
    const GradingMatrix tt = GradingMatrix::tilde_tough(b);
    for (const GradingMatrix& M : {t, l, tl, tt})
        for (int i = 0; i < 3; ++i) {
            double row = 0.0;
            for (int g = 0; g < 3; ++g) {
                CHECK(M.rows[i][g] >= 0.0);
                row += M.rows[i][g];
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-14));
        }
    // Middle value under Tough3: grade B w.p. b, deflated to C otherwise.
    CHECK(t.rows[1][1] == doctest::Approx(b));
    CHECK(t.rows[1][2] == doctest::Approx(1.0 - b));
    // Middle value under Lenient3: grade B w.p. b, inflated to A otherwise.
    CHECK(l.rows[1][0] == doctest::Approx(1.0 - b));
    CHECK(l.rows[1][1] == doctest::Approx(b));
    // TildeLenient inflates the bottom value C -> B w.p. 1-b.
    CHECK(tl.rows[0][1] == doctest::Approx(1.0 - b));
    CHECK(tl.rows[0][2] == doctest::Approx(b));
    // TildeTough deflates the top value A -> B w.p. 1-b.
    CHECK(tt.rows[2][0] == doctest::Approx(b));
    CHECK(tt.rows[2][1] == doctest::Approx(1.0 - b));
    CHECK_THROWS_AS(GradingMatrix::custom({{{0.5, 0.4, 0.0}, {0, 1, 0}, {0, 0, 1}}}),
                    std::invalid_argument);
}

TEST_CASE("grade posteriors: reachability and probability accounting") {
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists = spread_dists();
    const GradingMatrix t = GradingMatrix::tough3(0.5);
    const auto post = grade_posteriors(0.4, t, values, dists);
    double total = 0.0;
    for (const GradePosterior& p : post) total += p.probability;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
    // Under Tough3, grade A comes only from the top value.
    CHECK(post[0].reachable);
    CHECK(post[0].value == doctest::Approx(2.0).epsilon(1e-12));
    // A matrix with a dead grade column reports it unreachable with NaN value.
    const GradingMatrix dead =
        GradingMatrix::custom({{{1, 0, 0}, {1, 0, 0}, {0, 0, 1}}});
    const auto post2 = grade_posteriors(0.4, dead, values, dists);
    CHECK_FALSE(post2[1].reachable);
    CHECK(std::isnan(post2[1].value));
    CHECK(post2[1].probability == 0.0);
}

TEST_CASE("binary embedding reproduces the two-value Tough closed form") {
    // values (0, 1, 2) with low = v1 surely, high = v2 surely: the middle value
    // plays "value 1" and the Tough3 B-vs-C contrast is exactly the two-value
    // Tough marginal benefit b(1-x)/(1-xb).
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    const GradingMatrix t = GradingMatrix::tough3(0.5);
    const GradingRule two = GradingRule::tough(0.5);
    for (double x : {0.1, 0.25, 0.4, 0.6, 0.9})
        CHECK(marginal_benefit3(t, x, values, dists) ==
              doctest::Approx(marginal_benefit(two, x)).epsilon(1e-12));
    // And the equilibrium efforts agree.
    const ModelParams params = base();
    for (double theta : {0.1, 0.25, 0.4}) {
        const double e3 = equilibrium_effort3(theta, t, values, dists, params).effort;
        const double e2 = equilibrium_effort(theta, two, params).effort;
        CHECK(e3 == doctest::Approx(e2).epsilon(1e-9));
    }
}

TEST_CASE("canonical efforts are monotone under the side conditions") {
    const ModelParams params = base();
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists = spread_dists();
    REQUIRE(tough3_monotone_condition(dists, params.b));
    REQUIRE(lenient3_monotone_condition(dists, params.b));
    const GradingMatrix t = GradingMatrix::tough3(params.b);
    const GradingMatrix l = GradingMatrix::lenient3(params.b);
    double prev_t = 1.0, prev_l = 0.0;
    for (int i = 0; i < 40; ++i) {
        const double theta = params.alpha * (i + 0.5) / 40.0;
        const double et = equilibrium_effort3(theta, t, values, dists, params).effort;
        const double el = equilibrium_effort3(theta, l, values, dists, params).effort;
        CHECK(et <= prev_t + 1e-10);  // Tough3 effort decreasing in the mean
        CHECK(el >= prev_l - 1e-10);  // Lenient3 effort increasing in the mean
        prev_t = et;
        prev_l = el;
    }
}

TEST_CASE("theta_dagger3 equalizes the canonical efforts") {
    const ModelParams params = base();
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists = spread_dists();
    const CutoffResult d = theta_dagger3(values, dists, params);
    REQUIRE(d.flag == RangeFlag::InRange);
    const double et = equilibrium_effort3(d.value, GradingMatrix::tough3(params.b),
                                          values, dists, params)
                          .effort;
    const double el = equilibrium_effort3(d.value, GradingMatrix::lenient3(params.b),
                                          values, dists, params)
                          .effort;
    CHECK(et == doctest::Approx(el).epsilon(1e-7));
}

TEST_CASE("equilibrium_roots3 finds the canonical root and rejects nothing") {
    const ModelParams params = base();
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists = spread_dists();
    const GradingMatrix t = GradingMatrix::tough3(params.b);
    const double canonical = equilibrium_effort3(0.25, t, values, dists, params).effort;
    const auto roots = equilibrium_roots3(0.25, t, values, dists, params);
    REQUIRE(roots.size() == 1);
    CHECK(roots[0] == doctest::Approx(canonical).epsilon(1e-8));
    // Tilde rules go through the root scanner too (non-canonical solver throws).
    CHECK_THROWS_AS(equilibrium_effort3(0.25, GradingMatrix::tilde_lenient(params.b),
                                        values, dists, params),
                    std::invalid_argument);
    const auto tl_roots = equilibrium_roots3(
        0.25, GradingMatrix::tilde_lenient(params.b), values, dists, params);
    CHECK(!tl_roots.empty());
}

TEST_CASE("effort_curve returns one row per grid point") {
    const ModelParams params = base();
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists = spread_dists();
    const std::vector<double> grid = {0.1, 0.2, 0.3, 0.4};
    const auto curve = effort_curve(GradingMatrix::tilde_tough(params.b), grid, values,
                                    dists, params);
    REQUIRE(curve.size() == grid.size());
    for (size_t i = 0; i < curve.size(); ++i) {
        CHECK(curve[i].theta_bar == grid[i]);
        CHECK(!curve[i].roots.empty());
    }
}
