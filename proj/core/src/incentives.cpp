#include "tiergrade/incentives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tiergrade {

namespace {

constexpr double kIcTol = 1e-10;
constexpr double kFeeIcTol = 1e-9;
constexpr double kCutoffMatchTol = 1e-12;
constexpr double kEffortSlack = 1e-9;

double tier_value(const Tier& t, const ModelParams& params) {
    return t.mass * (t.mean + t.effort - params.cost.value(t.effort));
}

}  // namespace

TypeDistribution TypeDistribution::uniform(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("TypeDistribution: alpha outside (0,1)");
    TypeDistribution F;
    F.is_uniform_ = true;
    F.alpha_ = alpha;
    return F;
}

TypeDistribution TypeDistribution::discretized(
    std::vector<std::pair<double, double>> atoms, double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("TypeDistribution: alpha outside (0,1)");
    if (atoms.size() < 1000)
        throw std::invalid_argument(
            "TypeDistribution: discretized grid needs >= 1000 points");
    double total = 0.0;
    for (const auto& [theta, mass] : atoms) {
        if (!(theta > 0.0 && theta <= alpha))
            throw std::invalid_argument("TypeDistribution: atom outside (0, alpha]");
        if (!(mass >= 0.0))
            throw std::invalid_argument("TypeDistribution: negative atom mass");
        total += mass;
    }
    if (!(total > 0.0))
        throw std::invalid_argument("TypeDistribution: zero total mass");
    std::sort(atoms.begin(), atoms.end());
    for (auto& [theta, mass] : atoms) mass /= total;
    TypeDistribution F;
    F.is_uniform_ = false;
    F.alpha_ = alpha;
    F.atoms_ = std::move(atoms);
    return F;
}

double TypeDistribution::cdf(double theta) const {
    if (is_uniform_) return std::clamp(theta / alpha_, 0.0, 1.0);
    double acc = 0.0;
    for (const auto& [t, m] : atoms_) {
        if (t > theta) break;
        acc += m;
    }
    return acc;
}

double TypeDistribution::mean() const {
    if (is_uniform_) return 0.5 * alpha_;
    double acc = 0.0;
    for (const auto& [t, m] : atoms_) acc += t * m;
    return acc;
}

double TypeDistribution::conditional_mean(double a, double b) const {
    if (is_uniform_) {
        const double lo = std::max(a, 0.0);
        const double hi = std::min(b, alpha_);
        if (!(hi > lo))
            throw std::invalid_argument("conditional_mean: empty interval");
        return 0.5 * (lo + hi);
    }
    double mass = 0.0, acc = 0.0;
    for (const auto& [t, m] : atoms_) {
        if (t > a && t <= b) {
            mass += m;
            acc += t * m;
        }
    }
    if (!(mass > 0.0))
        throw std::invalid_argument("conditional_mean: zero mass interval");
    return acc / mass;
}

double RegularSystem::welfare(const ModelParams& params) const {
    double w = 0.0;
    for (const Tier& t : tiers) w += tier_value(t, params);
    return w;
}

RegularSystem make_regular(const TypeDistribution& F,
                           const std::vector<double>& interior_cutoffs,
                           const std::vector<GradingRule>& rules,
                           const ModelParams& params) {
    if (rules.size() != interior_cutoffs.size() + 1)
        throw std::invalid_argument("make_regular: need one rule per tier");
    std::vector<double> bounds = {0.0};
    for (double c : interior_cutoffs) {
        if (!(c > bounds.back() && c < params.alpha))
            throw std::invalid_argument("make_regular: cutoffs must be sorted in (0, alpha)");
        bounds.push_back(c);
    }
    bounds.push_back(params.alpha);

    RegularSystem sys;
    for (size_t k = 0; k + 1 < bounds.size(); ++k) {
        Tier t{bounds[k], bounds[k + 1], rules[k], 0.0, 0.0, 0.0};
        t.mass = F.cdf(t.hi) - F.cdf(t.lo);
        if (!(t.mass > 0.0))
            throw std::invalid_argument("make_regular: tier with zero mass");
        t.mean = F.conditional_mean(t.lo, t.hi);
        t.effort = equilibrium_effort(t.mean, t.rule, params).effort;
        sys.tiers.push_back(t);
    }
    return sys;
}

RegularityCheck is_regular(const RegularSystem& system, const ModelParams& params) {
    const auto& tiers = system.tiers;
    if (tiers.empty()) return {false, "no tiers"};
    if (std::fabs(tiers.front().lo) > kCutoffMatchTol ||
        std::fabs(tiers.back().hi - params.alpha) > 1e-9)
        return {false, "cutoff-range"};
    for (size_t k = 0; k < tiers.size(); ++k) {
        if (k > 0 && std::fabs(tiers[k].lo - tiers[k - 1].hi) > kCutoffMatchTol)
            return {false, "cutoff-ordering"};
        if (!(tiers[k].hi > tiers[k].lo)) return {false, "cutoff-ordering"};
        if (!(tiers[k].mass > 0.0)) return {false, "tier-mass"};
        const double e = equilibrium_effort(tiers[k].mean, tiers[k].rule, params).effort;
        if (std::fabs(e - tiers[k].effort) > 1e-9)
            return {false, "effort-consistency"};
    }
    for (size_t k = 1; k < tiers.size(); ++k)
        if (tiers[k].effort < tiers[k - 1].effort - kCutoffMatchTol)
            return {false, "effort-monotonicity"};
    return {true, ""};
}

AffineUtility zeta(double theta_bar, const GradingRule& rule, const ModelParams& params) {
    const double e = equilibrium_effort(theta_bar, rule, params).effort;
    const double cp = params.cost.prime(e);
    const double qm = posterior_fail(theta_bar, e, rule);
    const double spread = rule.spread();
    const double intercept =
        qm + (rule.g0 + e * spread) * (cp / spread) - params.cost.value(e);
    return {intercept, cp, e};
}

double indirect_utility(double theta, double theta_bar, const GradingRule& rule,
                        const ModelParams& params) {
    const double e = equilibrium_effort(theta_bar, rule, params).effort;
    return expected_payoff(theta, e, e, theta_bar, rule, params.cost);
}

ICResult ic_without_transfers(const SchoolSystem& system, const ModelParams& params) {
    system.validate(params);
    const int n = system.school_count();
    std::vector<AffineUtility> schools(n, AffineUtility{});
    for (int s = 0; s < n; ++s)
        schools[s] = zeta(system.school_mean(s), system.rules[s], params);

    for (size_t j = 0; j < system.students.size(); ++j) {
        const double theta = system.students[j].theta;
        const int own = system.assignment[j];
        const double u_own = schools[own].intercept + theta * schools[own].slope;
        for (int s = 0; s < n; ++s) {
            const double u = schools[s].intercept + theta * schools[s].slope;
            if (u > u_own + kIcTol)
                return {false, ICWitness{static_cast<int>(j), s, u - u_own}};
        }
    }
    return {true, std::nullopt};
}

FeeSchedule fees_for_regular(const RegularSystem& system, const ModelParams& params) {
    const RegularityCheck check = is_regular(system, params);
    if (!check.regular)
        throw RegularityError("fees_for_regular: system not regular (" +
                              check.diagnosis + ")");

    const size_t r = system.tiers.size();
    std::vector<AffineUtility> util(r);
    for (size_t k = 0; k < r; ++k)
        util[k] = zeta(system.tiers[k].mean, system.tiers[k].rule, params);

    FeeSchedule fees;
    fees.fees.assign(r, 0.0);
    for (size_t k = 1; k < r; ++k) {
        const double cutoff = system.tiers[k - 1].hi;
        fees.fees[k] = fees.fees[k - 1] + (util[k].intercept - util[k - 1].intercept) +
                       cutoff * (util[k].slope - util[k - 1].slope);
    }

    // Global IC audit on a type grid; must hold for any regular input.
    const int grid = 1000;
    for (int i = 0; i < grid; ++i) {
        const double theta = params.alpha * (i + 0.5) / grid;
        size_t own = r - 1;
        for (size_t k = 0; k < r; ++k) {
            if (theta <= system.tiers[k].hi) { own = k; break; }
        }
        const double u_own = util[own].intercept + theta * util[own].slope - fees.fees[own];
        for (size_t k = 0; k < r; ++k) {
            const double u = util[k].intercept + theta * util[k].slope - fees.fees[k];
            if (u > u_own + kFeeIcTol)
                throw std::logic_error("fees_for_regular: grid IC check failed");
        }
    }
    return fees;
}

TwoTierWelfare welfare_two_tier(const TypeDistribution& F, double cutoff,
                                const ModelParams& params) {
    if (!(cutoff > 0.0 && cutoff < params.alpha))
        throw std::invalid_argument("welfare_two_tier: cutoff outside (0, alpha)");
    const double mass_b = F.cdf(cutoff);
    if (mass_b < 1e-9 || mass_b > 1.0 - 1e-9)
        throw std::invalid_argument("welfare_two_tier: degenerate tier");
    TwoTierWelfare out{};
    out.cutoff = cutoff;
    out.mass_bottom = mass_b;
    out.mean_bottom = F.conditional_mean(0.0, cutoff);
    out.mean_top = F.conditional_mean(cutoff, params.alpha);
    out.effort_bottom =
        equilibrium_effort(out.mean_bottom, GradingRule::tough(params.b), params).effort;
    out.effort_top =
        equilibrium_effort(out.mean_top, GradingRule::lenient(params.b), params).effort;
    out.welfare = F.mean() +
                  mass_b * (out.effort_bottom - params.cost.value(out.effort_bottom)) +
                  (1.0 - mass_b) * (out.effort_top - params.cost.value(out.effort_top));
    return out;
}

ConstrainedOptimum constrained_optimal(const TypeDistribution& F,
                                       const ModelParams& params) {
    const double alpha = params.alpha;

    // Single-tier candidate.
    const double mean = F.mean();
    const GradingRule single_rule = best_extreme_rule(mean, params);
    const double e1 = equilibrium_effort(mean, single_rule, params).effort;
    const double w_single = mean + e1 - params.cost.value(e1);

    // Two-tier cutoff search on a coarse grid, skipping degenerate tiers.
    const int grid = 2000;
    double best_c = -1.0;
    double best_w = -std::numeric_limits<double>::infinity();
    std::vector<double> usable;
    for (int i = 1; i <= grid; ++i) {
        const double c = alpha * i / (grid + 1);
        const double mass = F.cdf(c);
        if (mass < 1e-9 || mass > 1.0 - 1e-9) continue;
        usable.push_back(c);
        const double w = welfare_two_tier(F, c, params).welfare;
        if (w > best_w) { best_w = w; best_c = c; }
    }

    ConstrainedOptimum out{};
    out.constraint_bound = false;

    bool have_two_tier = best_c > 0.0;
    double final_c = best_c;
    double final_w = best_w;

    if (have_two_tier) {
        // Golden-section refinement in the bracketing cell around the argmax.
        const auto it = std::lower_bound(usable.begin(), usable.end(), best_c);
        double a = it == usable.begin() ? best_c : *(it - 1);
        double b = (it + 1) == usable.end() ? best_c : *(it + 1);
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = welfare_two_tier(F, x1, params).welfare;
        double f2 = welfare_two_tier(F, x2, params).welfare;
        for (int i = 0; i < 80 && b - a > 1e-12; ++i) {
            if (f1 < f2) {
                a = x1; x1 = x2; f1 = f2;
                x2 = a + gr * (b - a);
                f2 = welfare_two_tier(F, x2, params).welfare;
            } else {
                b = x2; x2 = x1; f2 = f1;
                x1 = b - gr * (b - a);
                f1 = welfare_two_tier(F, x1, params).welfare;
            }
        }
        final_c = 0.5 * (a + b);
        TwoTierWelfare at_c = welfare_two_tier(F, final_c, params);
        final_w = at_c.welfare;
        out.unconstrained_cutoff = final_c;

        if (at_c.effort_top < at_c.effort_bottom - kCutoffMatchTol) {
            // Constraint binds: raise the cutoff to the equalization point
            // (effort_top - effort_bottom is increasing in the cutoff).
            double lo = final_c;
            double hi = usable.back();
            const auto diff = [&](double c) {
                const TwoTierWelfare w = welfare_two_tier(F, c, params);
                return w.effort_top - w.effort_bottom;
            };
            if (diff(hi) < 0.0) {
                have_two_tier = false;  // no feasible two-tier split
            } else {
                for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
                    const double mid = 0.5 * (lo + hi);
                    if (diff(mid) < 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                final_c = hi;
                final_w = welfare_two_tier(F, final_c, params).welfare;
                out.constraint_bound = true;
            }
        }
    }

    if (have_two_tier && final_w > w_single + 1e-9) {
        out.two_tier = true;
        out.cutoff = final_c;
        out.system = make_regular(
            F, {final_c},
            {GradingRule::tough(params.b), GradingRule::lenient(params.b)}, params);
        out.welfare = final_w;
    } else {
        out.two_tier = false;
        out.constraint_bound = false;
        out.cutoff = 0.0;
        out.system = make_regular(F, {}, {single_rule}, params);
        out.welfare = w_single;
    }
    out.fees = fees_for_regular(out.system, params);
    return out;
}

ContractionKind is_contraction(const RegularSystem& a, const RegularSystem& b) {
    if (a.tiers.empty() || b.tiers.empty()) return ContractionKind::None;
    if (std::fabs(a.tiers.front().lo - b.tiers.front().lo) > kCutoffMatchTol ||
        std::fabs(a.tiers.back().hi - b.tiers.back().hi) > kCutoffMatchTol)
        return ContractionKind::None;

    bool any_strict = false;
    size_t i = 0;  // index into a's tiers
    for (const Tier& tb : b.tiers) {
        if (i >= a.tiers.size() ||
            std::fabs(a.tiers[i].lo - tb.lo) > kCutoffMatchTol)
            return ContractionKind::None;
        double mass = 0.0, weighted = 0.0;
        while (i < a.tiers.size() && a.tiers[i].hi <= tb.hi + kCutoffMatchTol) {
            mass += a.tiers[i].mass;
            weighted += a.tiers[i].mass * a.tiers[i].effort;
            ++i;
        }
        if (!(mass > 0.0)) return ContractionKind::None;
        if (i < a.tiers.size() && a.tiers[i].lo < tb.hi - kCutoffMatchTol)
            return ContractionKind::None;  // b's cutoff not among a's
        const double avg = weighted / mass;
        if (tb.effort < avg - kEffortSlack) return ContractionKind::None;
        if (tb.effort > avg + kEffortSlack) any_strict = true;
    }
    if (i != a.tiers.size()) return ContractionKind::None;
    return any_strict ? ContractionKind::Increasing : ContractionKind::NonDecreasing;
}

}  // namespace tiergrade
