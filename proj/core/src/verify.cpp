#include "tiergrade/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "tiergrade/design.hpp"
#include "tiergrade/incentives.hpp"
#include "tiergrade/multivalue.hpp"
#include "tiergrade/simulate.hpp"

namespace tiergrade::verify {

namespace {

double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

CheckResult fail(std::string name, std::string detail) {
    return {std::move(name), false, std::move(detail)};
}

CheckResult pass(std::string name, std::string detail = "") {
    return {std::move(name), true, std::move(detail)};
}

// Random admissible parameterization for property checks.
ModelParams random_params(std::mt19937_64& rng) {
    const double alpha = uniform(rng, 0.2, 0.8);
    const double b = uniform(rng, 0.2, 0.8);
    if (uniform01(rng) < 0.5) {
        const double kappa = (1.0 + uniform(rng, 0.1, 2.0)) / (2.0 * (1.0 - alpha));
        return ModelParams(alpha, b, CostFunction::quadratic(kappa));
    }
    const double p = uniform(rng, 2.0, 3.5);
    const double kappa =
        (1.0 + uniform(rng, 0.1, 2.0)) / std::pow(1.0 - alpha, p - 1.0);
    return ModelParams(alpha, b, CostFunction::power(kappa, p));
}

// Random regular system over F: random cutoffs, a coin-flipped extreme rule
// per tier, rejection-sampled until the draw passes is_regular. (Multi-tier
// draws survive mostly as all-Lenient systems: Tough effort rises as the pool
// worsens, which fights the tier-effort monotonicity requirement.)
RegularSystem random_regular_system(const TypeDistribution& F, const ModelParams& params,
                                    std::mt19937_64& rng) {
    for (;;) {
        const int r = 1 + static_cast<int>(uniform01(rng) * 3.0);
        std::vector<double> cutoffs;
        for (int k = 0; k + 1 < r; ++k)
            cutoffs.push_back(uniform(rng, 0.02 * params.alpha, 0.98 * params.alpha));
        std::sort(cutoffs.begin(), cutoffs.end());
        bool distinct = true;
        for (size_t k = 1; k < cutoffs.size(); ++k)
            if (cutoffs[k] - cutoffs[k - 1] < 0.02 * params.alpha) distinct = false;
        if (!distinct) continue;
        std::vector<GradingRule> rules;
        for (int k = 0; k < r; ++k)
            rules.push_back(uniform01(rng) < 0.5 ? GradingRule::tough(params.b)
                                                 : GradingRule::lenient(params.b));
        RegularSystem sys = make_regular(F, cutoffs, rules, params);
        if (is_regular(sys, params).regular) return sys;
    }
}

}  // namespace

ModelParams default_params() {
    return ModelParams(0.5, 0.5, CostFunction::quadratic(2.0));
}

CheckResult check_closed_form_anchors() {
    const std::string name = "closed-form-anchors";
    const ModelParams params = default_params();
    const double e_tough =
        equilibrium_effort(0.25, GradingRule::tough(0.5), params).effort;
    const double e_lenient =
        equilibrium_effort(0.25, GradingRule::lenient(0.5), params).effort;
    const double want_tough = (4.0 - std::sqrt(13.0)) / 4.0;
    const double want_lenient = (std::sqrt(20.0) - 4.0) / 8.0;
    if (std::fabs(e_tough - want_tough) > 1e-9)
        return fail(name, "tough effort off: " + std::to_string(e_tough));
    if (std::fabs(e_lenient - want_lenient) > 1e-9)
        return fail(name, "lenient effort off: " + std::to_string(e_lenient));
    const CutoffResult dagger = theta_dagger(params);
    if (dagger.flag != RangeFlag::InRange || std::fabs(dagger.value - 5.0 / 12.0) > 1e-6)
        return fail(name, "theta_dagger off: " + std::to_string(dagger.value));
    std::ostringstream detail;
    detail << "xi(0.25,Tough)=" << e_tough << " xi(0.25,Lenient)=" << e_lenient
           << " theta_dagger=" << dagger.value;
    return pass(name, detail.str());
}

CheckResult check_prop1_dominance() {
    const std::string name = "prop1-dominance";
    const ModelParams params = default_params();
    const GradingRule tough = GradingRule::tough(params.b);
    const GradingRule lenient = GradingRule::lenient(params.b);
    int tested = 0;
    for (int t = 0; t < 20; ++t) {
        const double theta = params.alpha * (t + 0.5) / 20.0;
        const double best_extreme =
            std::max(equilibrium_effort(theta, tough, params).effort,
                     equilibrium_effort(theta, lenient, params).effort);
        for (int i = 0; i < 50; ++i) {
            for (int j = i + 1; j < 50; ++j) {
                const double g0 = i / 49.0;
                const double g1 = j / 49.0;
                if (g1 - g0 > params.b + 1e-12 || g1 - g0 < 1e-9) continue;
                if ((std::fabs(g0 - tough.g0) < 1e-9 && std::fabs(g1 - tough.g1) < 1e-9) ||
                    (std::fabs(g0 - lenient.g0) < 1e-9 && std::fabs(g1 - lenient.g1) < 1e-9))
                    continue;
                const GradingRule g(g0, g1, params.b);
                const double e = equilibrium_effort(theta, g, params).effort;
                if (!(best_extreme > e + 1e-12))
                    return fail(name, "rule (" + std::to_string(g0) + "," +
                                          std::to_string(g1) + ") undominated at theta=" +
                                          std::to_string(theta));
                ++tested;
            }
        }
    }
    return pass(name, std::to_string(tested) + " (theta, rule) pairs dominated");
}

CheckResult check_prop2_monotonicity(std::uint64_t seed) {
    const std::string name = "prop2-monotonicity";
    std::mt19937_64 rng(seed);
    for (int run = 0; run < 10; ++run) {
        const ModelParams params = random_params(rng);
        const GradingRule tough = GradingRule::tough(params.b);
        const GradingRule lenient = GradingRule::lenient(params.b);
        double prev_t = 0.0, prev_l = 0.0;
        for (int i = 0; i < 100; ++i) {
            const double theta = params.alpha * (i + 0.5) / 100.0;
            const double et = equilibrium_effort(theta, tough, params).effort;
            const double el = equilibrium_effort(theta, lenient, params).effort;
            if (i > 0) {
                if (!(et < prev_t))
                    return fail(name, "xi(.,Tough) not decreasing, run " +
                                          std::to_string(run));
                if (!(el > prev_l))
                    return fail(name, "xi(.,Lenient) not increasing, run " +
                                          std::to_string(run));
            }
            prev_t = et;
            prev_l = el;
        }
    }
    return pass(name, "10 parameterizations x 100-point grids");
}

CheckResult check_prop3_concavity(std::uint64_t seed) {
    const std::string name = "prop3-concavity";
    std::mt19937_64 rng(seed);
    double min_slack = 1e300;
    for (int run = 0; run < 100; ++run) {
        const ModelParams params = default_params();
        const double ta = uniform(rng, 0.02, params.alpha - 0.02);
        double tb = uniform(rng, 0.02, params.alpha - 0.02);
        if (std::fabs(tb - ta) < 1e-3) tb = ta + (tb > ta ? 1e-2 : -1e-2);
        const double lambda = uniform(rng, 0.05, 0.95);
        const double g0 = uniform(rng, 0.0, 1.0 - 0.05);
        const double spread = uniform(rng, 0.05, std::min(params.b, 1.0 - g0));
        const GradingRule g(g0, g0 + spread, params.b);
        const double mid = (1.0 - lambda) * ta + lambda * tb;
        const double slack =
            equilibrium_effort(mid, g, params).effort -
            ((1.0 - lambda) * equilibrium_effort(ta, g, params).effort +
             lambda * equilibrium_effort(tb, g, params).effort);
        if (!(slack > 0.0))
            return fail(name, "midpoint inequality violated, slack=" +
                                  std::to_string(slack));
        min_slack = std::min(min_slack, slack);
    }
    return pass(name, "100 tuples, min slack " + std::to_string(min_slack));
}

CheckResult check_thm1_oracle(std::uint64_t seed) {
    const std::string name = "thm1-oracle";
    const ModelParams params = default_params();
    const std::vector<GradingRule> grid = default_rule_grid(params);
    const GradingRule tough = GradingRule::tough(params.b);
    const GradingRule lenient = GradingRule::lenient(params.b);
    std::mt19937_64 rng(seed);
    for (int run = 0; run < 100; ++run) {
        const int m = 1 + static_cast<int>(uniform01(rng) * 5.0);
        std::vector<Student> students;
        for (int j = 0; j < m; ++j)
            students.push_back({"s" + std::to_string(j),
                                uniform(rng, 0.02 * params.alpha, 0.98 * params.alpha)});
        const DesignResult oracle = brute_force_design(students, grid, m, params);
        const StructureClass cls = structure_classify(oracle.system);
        if (cls.kind == StructureKind::Other)
            return fail(name, "oracle optimum classified Other, run " +
                                  std::to_string(run));
        if (cls.kind == StructureKind::SingleTier) {
            for (const GradingRule& r : oracle.system.rules)
                if (!(r == tough || r == lenient))
                    return fail(name, "single-tier optimum uses non-extreme rule");
        } else {
            for (int s : cls.bottom_schools)
                if (!(oracle.system.rules[s] == tough))
                    return fail(name, "bottom tier not Tough, run " + std::to_string(run));
            for (int s : cls.top_schools)
                if (!(oracle.system.rules[s] == lenient))
                    return fail(name, "top tier not Lenient, run " + std::to_string(run));
        }
        const DesignResult fast = optimal_two_tier(students, params);
        if (std::fabs(fast.report.total - oracle.report.total) > 1e-8)
            return fail(name, "welfare mismatch " +
                                  std::to_string(fast.report.total - oracle.report.total) +
                                  ", run " + std::to_string(run));
    }
    return pass(name, "100 instances, oracle agrees with prefix-cutoff search");
}

CheckResult check_thm2_ic(std::uint64_t seed) {
    const std::string name = "thm2-ic";
    const ModelParams params = default_params();
    const std::vector<GradingRule> grid = default_rule_grid(params);
    std::mt19937_64 rng(seed);
    int passers = 0;
    for (int run = 0; run < 200; ++run) {
        const int m = 2 + static_cast<int>(uniform01(rng) * 7.0);
        const int n = 2 + static_cast<int>(uniform01(rng) * 2.0);
        if (n > m) continue;
        SchoolSystem sys;
        for (int j = 0; j < m; ++j)
            sys.students.push_back({"s" + std::to_string(j),
                                    uniform(rng, 0.02 * params.alpha, 0.98 * params.alpha)});
        for (int s = 0; s < n; ++s)
            sys.rules.push_back(grid[static_cast<size_t>(uniform01(rng) * grid.size())]);
        // Surjective assignment: first n students pin the schools.
        sys.assignment.resize(m);
        for (int j = 0; j < m; ++j)
            sys.assignment[j] = j < n ? j : static_cast<int>(uniform01(rng) * n);
        const ICResult ic = ic_without_transfers(sys, params);
        if (!ic.incentive_compatible) continue;
        ++passers;
        double mean_lo = 1e300, mean_hi = -1e300, eff_lo = 1e300, eff_hi = -1e300;
        for (int s = 0; s < n; ++s) {
            const double mean = sys.school_mean(s);
            const double e = equilibrium_effort(mean, sys.rules[s], params).effort;
            mean_lo = std::min(mean_lo, mean); mean_hi = std::max(mean_hi, mean);
            eff_lo = std::min(eff_lo, e); eff_hi = std::max(eff_hi, e);
        }
        if (mean_hi - mean_lo > 1e-9)
            return fail(name, "IC passer with mean spread " +
                                  std::to_string(mean_hi - mean_lo));
        if (eff_hi - eff_lo > 1e-9)
            return fail(name, "IC passer with effort spread " +
                                  std::to_string(eff_hi - eff_lo));
    }
    // Constructed equal-mean system must pass.
    SchoolSystem equal;
    equal.students = {{"a", 0.2}, {"b", 0.3}, {"c", 0.2}, {"d", 0.3}};
    equal.rules = {GradingRule::tough(params.b), GradingRule::tough(params.b)};
    equal.assignment = {0, 0, 1, 1};
    if (!ic_without_transfers(equal, params).incentive_compatible)
        return fail(name, "constructed equal-mean system fails IC");
    return pass(name, std::to_string(passers) + "/200 random systems passed IC");
}

CheckResult check_thm3_constrained(std::uint64_t seed) {
    const std::string name = "thm3-constrained";
    const ModelParams params = default_params();
    const TypeDistribution F = TypeDistribution::uniform(params.alpha);
    const ConstrainedOptimum opt = constrained_optimal(F, params);

    const RegularityCheck reg = is_regular(opt.system, params);
    if (!reg.regular) return fail(name, "optimum not regular: " + reg.diagnosis);
    if (opt.constraint_bound && !(opt.cutoff > opt.unconstrained_cutoff))
        return fail(name, "binding constraint did not raise the cutoff");

    // Cutoff-type indifference after fees.
    const FeeSchedule fees = fees_for_regular(opt.system, params);
    for (size_t k = 1; k < opt.system.tiers.size(); ++k) {
        const Tier& a = opt.system.tiers[k - 1];
        const Tier& b = opt.system.tiers[k];
        const double theta = a.hi;
        const double ua =
            indirect_utility(theta, a.mean, a.rule, params) - fees.fees[k - 1];
        const double ub = indirect_utility(theta, b.mean, b.rule, params) - fees.fees[k];
        if (std::fabs(ua - ub) > 1e-9)
            return fail(name, "cutoff indifference residual " + std::to_string(ua - ub));
    }

    std::mt19937_64 rng(seed);
    for (int run = 0; run < 1000; ++run) {
        const RegularSystem rand_sys = random_regular_system(F, params, rng);
        if (rand_sys.welfare(params) > opt.welfare + 1e-9)
            return fail(name, "random regular system beats optimum by " +
                                  std::to_string(rand_sys.welfare(params) - opt.welfare));
    }

    // Binding instance: with a high informativeness cap the two-tier split is
    // worth it but the unconstrained cutoff violates effort monotonicity, so
    // the optimizer must raise it to the equalization point.
    const ModelParams hi_b(params.alpha, 0.9, params.cost);
    const ConstrainedOptimum opt_hi =
        constrained_optimal(TypeDistribution::uniform(hi_b.alpha), hi_b);
    if (!opt_hi.two_tier || !opt_hi.constraint_bound)
        return fail(name, "expected a binding two-tier optimum at b=0.9");
    if (!(opt_hi.cutoff > opt_hi.unconstrained_cutoff))
        return fail(name, "binding constraint did not raise the cutoff");
    if (std::fabs(opt_hi.system.tiers[0].effort - opt_hi.system.tiers[1].effort) > 1e-6)
        return fail(name, "binding optimum did not equalize tier efforts");
    if (!is_regular(opt_hi.system, hi_b).regular)
        return fail(name, "binding optimum not regular");

    std::ostringstream detail;
    detail << "welfare " << opt.welfare << ", "
           << (opt.two_tier ? "two-tier cutoff " + std::to_string(opt.cutoff)
                            : std::string("single-tier"))
           << "; b=0.9 instance binds, cutoff " << opt_hi.unconstrained_cutoff << " -> "
           << opt_hi.cutoff;
    return pass(name, detail.str());
}

CheckResult check_contraction_welfare(std::uint64_t seed) {
    const std::string name = "contraction-welfare";
    const ModelParams params = default_params();
    const TypeDistribution F = TypeDistribution::uniform(params.alpha);
    std::mt19937_64 rng(seed);
    int pairs = 0, increasing = 0;
    int attempts = 0;
    while (pairs < 100 && attempts < 20000) {
        ++attempts;
        const RegularSystem a = random_regular_system(F, params, rng);
        // Candidate contraction: keep a random subset of a's interior cutoffs;
        // each merged tier inherits the rule of its first source tier.
        std::vector<double> kept;
        for (size_t k = 0; k + 1 < a.tiers.size(); ++k)
            if (uniform01(rng) < 0.5) kept.push_back(a.tiers[k].hi);
        std::vector<GradingRule> rules;
        size_t src = 0;
        for (size_t k = 0; k <= kept.size(); ++k) {
            const double hi = k < kept.size() ? kept[k] : params.alpha;
            rules.push_back(a.tiers[src].rule);
            while (src < a.tiers.size() && a.tiers[src].hi <= hi + 1e-15) ++src;
        }
        const RegularSystem b = make_regular(F, kept, rules, params);
        const ContractionKind kind = is_contraction(a, b);
        if (kind == ContractionKind::None) continue;
        ++pairs;
        const double wa = a.welfare(params);
        const double wb = b.welfare(params);
        if (kind == ContractionKind::Increasing) {
            ++increasing;
            if (!(wb > wa))
                return fail(name, "increasing contraction with W(B) <= W(A), gap " +
                                      std::to_string(wb - wa));
        } else if (wb < wa - 1e-12) {
            return fail(name, "non-decreasing contraction lowered welfare by " +
                                  std::to_string(wa - wb));
        }
    }
    if (pairs < 100) return fail(name, "could not construct 100 contraction pairs");
    if (increasing < 10)
        return fail(name, "only " + std::to_string(increasing) +
                              " increasing pairs; strict clause near-vacuous");
    return pass(name, std::to_string(pairs) + " pairs (" + std::to_string(increasing) +
                          " increasing), welfare ordering holds");
}

CheckResult check_prop4_three_values() {
    using namespace multivalue;
    const std::string name = "prop4-three-values";
    const ModelParams params = default_params();
    const ValueTriple values(0.0, 1.0, 2.0);
    const OutcomeDistributions dists({0.6, 0.3, 0.1}, {0.1, 0.3, 0.6});
    if (!tough3_monotone_condition(dists, params.b) ||
        !lenient3_monotone_condition(dists, params.b))
        return fail(name, "side conditions fail for the chosen instance");

    const GradingMatrix tough = GradingMatrix::tough3(params.b);
    const GradingMatrix lenient = GradingMatrix::lenient3(params.b);

    // Marginal benefit monotone in x, and induced effort monotone in theta.
    double prev_t = 1e300, prev_l = -1e300;
    for (int i = 0; i < 50; ++i) {
        const double x = 0.02 + 0.96 * i / 49.0;
        const double mt = marginal_benefit3(tough, x, values, dists);
        const double ml = marginal_benefit3(lenient, x, values, dists);
        if (!(mt < prev_t)) return fail(name, "MB(Tough3,.) not decreasing");
        if (!(ml > prev_l)) return fail(name, "MB(Lenient3,.) not increasing");
        prev_t = mt;
        prev_l = ml;
    }
    prev_t = 1e300;
    prev_l = -1e300;
    for (int i = 0; i < 50; ++i) {
        const double theta = params.alpha * (i + 0.5) / 50.0;
        const double et = equilibrium_effort3(theta, tough, values, dists, params).effort;
        const double el = equilibrium_effort3(theta, lenient, values, dists, params).effort;
        if (!(et < prev_t)) return fail(name, "xi(.,Tough3) not decreasing");
        if (!(el > prev_l)) return fail(name, "xi(.,Lenient3) not increasing");
        prev_t = et;
        prev_l = el;
    }

    // Crossing point equalizes efforts.
    const CutoffResult dagger = theta_dagger3(values, dists, params);
    if (dagger.flag != RangeFlag::InRange)
        return fail(name, "theta_dagger3 found no crossing");
    const double et = equilibrium_effort3(dagger.value, tough, values, dists, params).effort;
    const double el =
        equilibrium_effort3(dagger.value, lenient, values, dists, params).effort;
    if (std::fabs(et - el) > 1e-8)
        return fail(name, "efforts differ at theta_dagger3 by " + std::to_string(et - el));

    // Binary embedding: two grades live (B/C), v2 plays the two-value "value 1"
    // role, so Tough3 must reproduce the two-value Tough efforts exactly.
    const OutcomeDistributions binary({1.0, 0.0, 0.0}, {0.0, 1.0, 0.0});
    const ValueTriple binary_values(0.0, 1.0, 2.0);
    const GradingRule tough2 = GradingRule::tough(params.b);
    for (double theta : {0.1, 0.25, 0.4}) {
        const double e3 =
            equilibrium_effort3(theta, tough, binary_values, binary, params).effort;
        const double e2 = equilibrium_effort(theta, tough2, params).effort;
        if (std::fabs(e3 - e2) > 1e-9)
            return fail(name, "binary embedding mismatch " + std::to_string(e3 - e2));
    }
    return pass(name, "canonical monotonicities, crossing at theta=" +
                          std::to_string(dagger.value) + ", binary embedding matches");
}

CheckResult check_simulation() {
    const std::string name = "simulation";
    const ModelParams params = default_params();
    SchoolSystem sys;
    sys.students = {{"a", 0.2}, {"b", 0.3}, {"c", 0.4}, {"d", 0.45}};
    sys.rules = {GradingRule::tough(params.b), GradingRule::lenient(params.b)};
    sys.assignment = {0, 0, 1, 1};
    const SimConfig cfg{1000000, 987654321ULL, 1e-3};

    const SimReport report = simulate_market(sys, params, cfg);
    for (const SchoolSimStats& st : report.schools) {
        const double p = st.model_pass_rate;
        const double band = 3.0 * std::sqrt(p * (1.0 - p) / cfg.students_per_school);
        if (std::fabs(st.empirical_pass_rate - p) > band)
            return fail(name, "pass rate outside 3 s.e. band: " +
                                  std::to_string(st.empirical_pass_rate - p));
    }
    if (report.best_response_gap > 1e-8)
        return fail(name, "best response gap " + std::to_string(report.best_response_gap));
    const SimReport again = simulate_market(sys, params, cfg);
    if (sim_report_csv(report) != sim_report_csv(again))
        return fail(name, "same seed produced different CSV output");
    return pass(name, "N=1e6 per school within 3 s.e., gap " +
                          std::to_string(report.best_response_gap) + ", reproducible");
}

std::vector<CheckResult> run_all(std::uint64_t seed) {
    return {
        check_closed_form_anchors(),
        check_prop1_dominance(),
        check_prop2_monotonicity(seed),
        check_prop3_concavity(seed + 1),
        check_thm1_oracle(seed + 2),
        check_thm2_ic(seed + 3),
        check_thm3_constrained(seed + 4),
        check_contraction_welfare(seed + 5),
        check_prop4_three_values(),
        check_simulation(),
    };
}

}  // namespace tiergrade::verify
