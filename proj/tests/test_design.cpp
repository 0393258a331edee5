#include <cmath>

#include <doctest.h>

#include "tiergrade/design.hpp"

using namespace tiergrade;

namespace {
ModelParams base() { return ModelParams(0.5, 0.5, CostFunction::quadratic(2.0)); }

std::vector<Student> make_students(std::initializer_list<double> thetas) {
    std::vector<Student> out;
    int i = 0;
    for (double t : thetas) out.push_back({"s" + std::to_string(i++), t});
    return out;
}
}  // namespace

TEST_CASE("system validation") {
    const ModelParams params = base();
    SchoolSystem sys;
    sys.students = make_students({0.1, 0.3});
    sys.rules = {GradingRule::tough(0.5), GradingRule::lenient(0.5)};
    sys.assignment = {0, 0};  // school 1 empty
    CHECK_THROWS_AS(sys.validate(params), std::invalid_argument);
    sys.assignment = {0, 1};
    CHECK_NOTHROW(sys.validate(params));
    sys.students[1].theta = 0.6;  // outside (0, alpha)
    CHECK_THROWS_AS(sys.validate(params), std::invalid_argument);
}

TEST_CASE("theta_dagger anchor: 5/12 at the symmetric quadratic benchmark") {
    const CutoffResult d = theta_dagger(base());
    CHECK(d.flag == RangeFlag::InRange);
    CHECK(d.value == doctest::Approx(5.0 / 12.0).epsilon(1e-7));
}

TEST_CASE("best extreme rule flips at theta_dagger") {
    const ModelParams params = base();
    const double dagger = theta_dagger(params).value;
    CHECK(best_extreme_rule(dagger - 0.05, params) == GradingRule::tough(0.5));
    CHECK(best_extreme_rule(dagger + 0.05, params) == GradingRule::lenient(0.5));
}

TEST_CASE("welfare accounting is mass-weighted mean + effort - cost") {
    const ModelParams params = base();
    SchoolSystem sys;
    sys.students = make_students({0.1, 0.2, 0.4});
    sys.rules = {GradingRule::tough(0.5), GradingRule::lenient(0.5)};
    sys.assignment = {0, 0, 1};
    const WelfareReport rep = system_welfare(sys, params);
    REQUIRE(rep.per_school.size() == 2);
    CHECK(rep.per_school[0].mass == doctest::Approx(2.0));  // head-count mass
    CHECK(rep.per_school[0].mean_type == doctest::Approx(0.15));
    double total = 0.0;
    for (const SchoolWelfare& w : rep.per_school) {
        CHECK(w.contribution ==
              doctest::Approx(w.mass * (w.mean_type + w.effort -
                                        params.cost.value(w.effort)))
                  .epsilon(1e-12));
        total += w.contribution;
    }
    CHECK(rep.total == doctest::Approx(total).epsilon(1e-12));
}

TEST_CASE("structure classification") {
    const ModelParams params = base();
    SchoolSystem single;
    single.students = make_students({0.1, 0.2});
    single.rules = {GradingRule::tough(0.5)};
    single.assignment = {0, 0};
    CHECK(structure_classify(single).kind == StructureKind::SingleTier);

    SchoolSystem two;
    two.students = make_students({0.1, 0.2, 0.35, 0.45});
    two.rules = {GradingRule::tough(0.5), GradingRule::lenient(0.5)};
    two.assignment = {0, 0, 1, 1};
    const StructureClass cls = structure_classify(two);
    CHECK(cls.kind == StructureKind::TwoTier);
    CHECK(cls.bottom_schools == std::vector<int>{0});
    CHECK(cls.top_schools == std::vector<int>{1});

    // Interleaved types across the tier boundary: not a two-tier structure.
    SchoolSystem other;
    other.students = make_students({0.1, 0.4, 0.2, 0.45});
    other.rules = {GradingRule::tough(0.5), GradingRule::lenient(0.5)};
    other.assignment = {0, 0, 1, 1};
    CHECK(structure_classify(other).kind == StructureKind::Other);
}

TEST_CASE("optimal_two_tier: homogeneous low population stays single Tough") {
    const ModelParams params = base();
    const DesignResult r = optimal_two_tier(make_students({0.1, 0.12, 0.15}), params);
    CHECK(r.system.school_count() == 1);
    CHECK(r.system.rules[0] == GradingRule::tough(0.5));
}

TEST_CASE("optimal_two_tier: homogeneous high population stays single Lenient") {
    const ModelParams params = base();
    const DesignResult r = optimal_two_tier(make_students({0.44, 0.46, 0.48}), params);
    CHECK(r.system.school_count() == 1);
    CHECK(r.system.rules[0] == GradingRule::lenient(0.5));
}

TEST_CASE("optimal_two_tier: polarized population splits Tough/Lenient") {
    const ModelParams params = base();
    const DesignResult r =
        optimal_two_tier(make_students({0.02, 0.03, 0.47, 0.48}), params);
    const StructureClass cls = structure_classify(r.system);
    REQUIRE(cls.kind == StructureKind::TwoTier);
    CHECK(r.system.rules[cls.bottom_schools[0]] == GradingRule::tough(0.5));
    CHECK(r.system.rules[cls.top_schools[0]] == GradingRule::lenient(0.5));
}

TEST_CASE("optimal_two_tier never loses to the brute-force oracle") {
    const ModelParams params = base();
    const std::vector<GradingRule> grid = default_rule_grid(params);
    for (const auto& pop :
         {make_students({0.05, 0.45}), make_students({0.1, 0.2, 0.3}),
          make_students({0.02, 0.25, 0.26, 0.49}),
          make_students({0.15, 0.18, 0.21, 0.4, 0.44})}) {
        const DesignResult fast = optimal_two_tier(pop, params);
        const DesignResult slow =
            brute_force_design(pop, grid, static_cast<int>(pop.size()), params);
        CHECK(std::fabs(fast.report.total - slow.report.total) <= 1e-8);
    }
}

TEST_CASE("brute_force_design guards the population size") {
    const ModelParams params = base();
    const auto pop = make_students({0.1, 0.1, 0.1, 0.1, 0.1, 0.1, 0.1});
    CHECK_THROWS_AS(brute_force_design(pop, default_rule_grid(params), 7, params),
                    std::invalid_argument);
}

TEST_CASE("default rule grid contains the exact extremes and respects the cap") {
    const ModelParams params = base();
    const auto grid = default_rule_grid(params);
    bool has_tough = false, has_lenient = false;
    for (const GradingRule& g : grid) {
        CHECK(g.spread() <= params.b + 1e-12);
        if (g == GradingRule::tough(params.b)) has_tough = true;
        if (g == GradingRule::lenient(params.b)) has_lenient = true;
    }
    CHECK(has_tough);
    CHECK(has_lenient);
}

TEST_CASE("sigma_dagger: no split below, split above") {
    const ModelParams params = base();
    const double mu = 0.25;
    const CutoffResult sd = sigma_dagger(mu, params);
    REQUIRE(sd.flag == RangeFlag::InRange);
    CHECK(sd.value > 0.0);
    CHECK(sigma_welfare_gap(mu, 0.5 * sd.value, params) < 0.0);
    CHECK(sigma_welfare_gap(mu, std::min(1.5 * sd.value, 0.24), params) > 0.0);
    // The gap vanishes at the cutoff itself.
    CHECK(std::fabs(sigma_welfare_gap(mu, sd.value, params)) <= 1e-6);
}
