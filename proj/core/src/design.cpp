#include "tiergrade/design.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <functional>
#include <limits>
#include <map>
#include <numeric>

namespace tiergrade {

namespace {

constexpr double kMeanTol = 1e-9;
constexpr double kWelfareTie = 1e-9;

double per_student_value(double mean, const GradingRule& rule,
                         const ModelParams& params) {
    const double e = equilibrium_effort(mean, rule, params).effort;
    return mean + e - params.cost.value(e);
}

double effective_cutoff(const ModelParams& params) {
    const CutoffResult d = theta_dagger(params);
    if (d.flag == RangeFlag::OutOfRangeLow) return 0.0;
    if (d.flag == RangeFlag::OutOfRangeHigh) return params.alpha;
    return d.value;
}

GradingRule extreme_for(double theta_bar, double cutoff, const ModelParams& params) {
    if (theta_bar < cutoff - kMeanTol) return GradingRule::tough(params.b);
    return GradingRule::lenient(params.b);
}

double gap_with_cutoff(double mu, double sigma, double cutoff,
                       const ModelParams& params) {
    const double lo = mu - sigma, hi = mu + sigma;
    if (!(lo > 0.0 && hi < params.alpha))
        throw std::invalid_argument("sigma_welfare_gap: types leave (0, alpha)");
    const double single = 2.0 * per_student_value(mu, extreme_for(mu, cutoff, params), params);
    const double split = per_student_value(lo, extreme_for(lo, cutoff, params), params) +
                         per_student_value(hi, extreme_for(hi, cutoff, params), params);
    return split - single;
}

}  // namespace

void SchoolSystem::validate(const ModelParams& params) const {
    if (assignment.size() != students.size())
        throw std::invalid_argument("school system: assignment size mismatch");
    if (rules.empty())
        throw std::invalid_argument("school system: no schools");
    std::vector<int> counts(rules.size(), 0);
    for (int s : assignment) {
        if (s < 0 || s >= school_count())
            throw std::invalid_argument("school system: assignment out of range");
        ++counts[s];
    }
    for (int s = 0; s < school_count(); ++s)
        if (counts[s] == 0)
            throw std::invalid_argument("school system: empty school " +
                                        std::to_string(s));
    for (const Student& st : students)
        if (!(st.theta > 0.0 && st.theta < params.alpha))
            throw std::invalid_argument("school system: student type outside (0, alpha)");
}

double SchoolSystem::school_mass(int s) const {
    double m = 0.0;
    for (int a : assignment)
        if (a == s) m += 1.0;
    return m;
}

double SchoolSystem::school_mean(int s) const {
    double sum = 0.0, m = 0.0;
    for (size_t j = 0; j < students.size(); ++j) {
        if (assignment[j] == s) {
            sum += students[j].theta;
            m += 1.0;
        }
    }
    return sum / m;
}

WelfareReport system_welfare(const SchoolSystem& system, const ModelParams& params) {
    WelfareReport report;
    for (int s = 0; s < system.school_count(); ++s) {
        const double mass = system.school_mass(s);
        const double mean = system.school_mean(s);
        const double e = equilibrium_effort(mean, system.rules[s], params).effort;
        const double contribution = mass * (mean + e - params.cost.value(e));
        report.per_school.push_back({mass, mean, e, contribution});
        report.total += contribution;
    }
    return report;
}

StructureClass structure_classify(const SchoolSystem& system) {
    const int n = system.school_count();
    std::vector<double> means(n);
    for (int s = 0; s < n; ++s) means[s] = system.school_mean(s);

    const auto [lo_it, hi_it] = std::minmax_element(means.begin(), means.end());
    StructureClass out;
    if (*hi_it - *lo_it <= kMeanTol) {
        out.kind = StructureKind::SingleTier;
        return out;
    }

    // Two distinct mean values?
    const double lo = *lo_it, hi = *hi_it;
    std::vector<int> bottom, top;
    for (int s = 0; s < n; ++s) {
        if (std::fabs(means[s] - lo) <= kMeanTol)
            bottom.push_back(s);
        else if (std::fabs(means[s] - hi) <= kMeanTol)
            top.push_back(s);
        else
            return out;  // a third mean value: Other
    }

    // Cross-tier type ordering: every bottom student weakly below every top one.
    double max_bottom = -std::numeric_limits<double>::infinity();
    double min_top = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < system.students.size(); ++j) {
        const bool in_bottom =
            std::find(bottom.begin(), bottom.end(), system.assignment[j]) != bottom.end();
        if (in_bottom)
            max_bottom = std::max(max_bottom, system.students[j].theta);
        else
            min_top = std::min(min_top, system.students[j].theta);
    }
    if (max_bottom <= min_top + 1e-12) {
        out.kind = StructureKind::TwoTier;
        out.bottom_schools = bottom;
        out.top_schools = top;
        out.separating_type = max_bottom;
    }
    return out;
}

CutoffResult theta_dagger(const ModelParams& params) {
    const double eps = 1e-7 * params.alpha;
    double lo = eps;
    double hi = params.alpha - eps;
    const GradingRule tough = GradingRule::tough(params.b);
    const GradingRule lenient = GradingRule::lenient(params.b);
    const auto delta = [&](double theta) {
        return equilibrium_effort(theta, lenient, params).effort -
               equilibrium_effort(theta, tough, params).effort;
    };
    if (delta(lo) > 0.0) return {lo, RangeFlag::OutOfRangeLow};
    if (delta(hi) < 0.0) return {hi, RangeFlag::OutOfRangeHigh};
    for (int i = 0; i < 100 && hi - lo > 1e-12; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (delta(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return {0.5 * (lo + hi), RangeFlag::InRange};
}

GradingRule best_extreme_rule(double theta_bar, const ModelParams& params) {
    return extreme_for(theta_bar, effective_cutoff(params), params);
}

DesignResult optimal_two_tier(std::vector<Student> students, const ModelParams& params) {
    if (students.empty())
        throw std::invalid_argument("optimal_two_tier: empty population");
    std::sort(students.begin(), students.end(), [](const Student& a, const Student& b) {
        return a.theta != b.theta ? a.theta < b.theta : a.id < b.id;
    });
    const int m = static_cast<int>(students.size());

    const auto make_single = [&]() {
        double mean = 0.0;
        for (const Student& st : students) mean += st.theta;
        mean /= m;
        SchoolSystem sys;
        sys.students = students;
        sys.rules = {best_extreme_rule(mean, params)};
        sys.assignment.assign(m, 0);
        return sys;
    };

    SchoolSystem best = make_single();
    WelfareReport best_report = system_welfare(best, params);

    for (int k = 1; k < m; ++k) {
        SchoolSystem cand;
        cand.students = students;
        cand.rules = {GradingRule::tough(params.b), GradingRule::lenient(params.b)};
        cand.assignment.resize(m);
        for (int j = 0; j < m; ++j) cand.assignment[j] = j < k ? 0 : 1;
        WelfareReport report = system_welfare(cand, params);
        if (report.total > best_report.total + kWelfareTie) {
            best = std::move(cand);
            best_report = std::move(report);
        }
    }
    return {std::move(best), std::move(best_report)};
}

std::vector<GradingRule> default_rule_grid(const ModelParams& params) {
    std::vector<GradingRule> grid = {GradingRule::tough(params.b),
                                     GradingRule::lenient(params.b)};
    for (int i = 0; i <= 10; ++i) {
        for (int j = i + 1; j <= 10; ++j) {
            const double g0 = i / 10.0;
            const double g1 = j / 10.0;
            if (g1 - g0 > params.b + 1e-12) continue;
            const GradingRule rule(g0, g1, params.b);
            if (std::none_of(grid.begin(), grid.end(), [&](const GradingRule& r) {
                    return std::fabs(r.g0 - g0) < 1e-12 && std::fabs(r.g1 - g1) < 1e-12;
                }))
                grid.push_back(rule);
        }
    }
    return grid;
}

DesignResult brute_force_design(const std::vector<Student>& students,
                                const std::vector<GradingRule>& rule_grid,
                                int max_schools, const ModelParams& params) {
    const int m = static_cast<int>(students.size());
    if (m < 1 || m > 6)
        throw std::invalid_argument("brute_force_design: population size must be 1..6");
    if (max_schools < 1)
        throw std::invalid_argument("brute_force_design: max_schools must be >= 1");

    // Memoized per-block value: best rule for a block mean.
    struct BlockChoice { double value; int rule; };
    std::map<long long, BlockChoice> cache;
    const auto best_for_mean = [&](double mean) {
        long long key;
        static_assert(sizeof(key) == sizeof(mean));
        std::memcpy(&key, &mean, sizeof(key));
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
        BlockChoice choice{-std::numeric_limits<double>::infinity(), -1};
        for (size_t r = 0; r < rule_grid.size(); ++r) {
            const double v = per_student_value(mean, rule_grid[r], params);
            if (v > choice.value) choice = {v, static_cast<int>(r)};
        }
        cache.emplace(key, choice);
        return choice;
    };

    double best_welfare = -std::numeric_limits<double>::infinity();
    std::vector<int> best_partition;
    int best_blocks = 0;

    // Restricted growth strings enumerate set partitions canonically.
    std::vector<int> code(m, 0);
    const auto evaluate = [&](int blocks) {
        double welfare = 0.0;
        for (int blk = 0; blk < blocks; ++blk) {
            double sum = 0.0;
            int count = 0;
            for (int j = 0; j < m; ++j)
                if (code[j] == blk) { sum += students[j].theta; ++count; }
            welfare += count * best_for_mean(sum / count).value;
        }
        const bool better = welfare > best_welfare + kWelfareTie;
        const bool tie_fewer =
            std::fabs(welfare - best_welfare) <= kWelfareTie && blocks < best_blocks;
        if (better || tie_fewer) {
            best_welfare = welfare;
            best_partition = code;
            best_blocks = blocks;
        }
    };

    const std::function<void(int, int)> recurse = [&](int j, int used) {
        if (j == m) {
            evaluate(used);
            return;
        }
        for (int blk = 0; blk <= used && blk < max_schools; ++blk) {
            code[j] = blk;
            recurse(j + 1, std::max(used, blk + 1));
        }
    };
    recurse(0, 0);

    SchoolSystem sys;
    sys.students = students;
    sys.assignment = best_partition;
    for (int blk = 0; blk < best_blocks; ++blk) {
        double sum = 0.0;
        int count = 0;
        for (int j = 0; j < m; ++j)
            if (best_partition[j] == blk) { sum += students[j].theta; ++count; }
        sys.rules.push_back(rule_grid[best_for_mean(sum / count).rule]);
    }
    WelfareReport report = system_welfare(sys, params);
    return {std::move(sys), std::move(report)};
}

double sigma_welfare_gap(double mu, double sigma, const ModelParams& params) {
    return gap_with_cutoff(mu, sigma, effective_cutoff(params), params);
}

CutoffResult sigma_dagger(double mu, const ModelParams& params) {
    if (!(mu > 0.0 && mu < params.alpha))
        throw std::invalid_argument("sigma_dagger: mu outside (0, alpha)");
    const double cutoff = effective_cutoff(params);
    const double range = std::min(mu, params.alpha - mu);
    double lo = 1e-7 * range;
    double hi = range * (1.0 - 1e-7);
    const auto gap = [&](double s) { return gap_with_cutoff(mu, s, cutoff, params); };

    if (gap(lo) > 0.0) return {lo, RangeFlag::OutOfRangeLow};

    // Find a bracketing cell first; D need not be checked monotone here.
    const int n = 64;
    double a = lo, fa = gap(lo);
    double found_b = -1.0;
    for (int i = 1; i <= n; ++i) {
        const double s = lo + (hi - lo) * i / n;
        const double fs = gap(s);
        if (fa <= 0.0 && fs > 0.0) { found_b = s; break; }
        a = s;
        fa = fs;
    }
    if (found_b < 0.0) return {hi, RangeFlag::OutOfRangeHigh};

    double b = found_b;
    for (int i = 0; i < 100 && b - a > 1e-12; ++i) {
        const double mid = 0.5 * (a + b);
        if (gap(mid) <= 0.0)
            a = mid;
        else
            b = mid;
    }
    return {0.5 * (a + b), RangeFlag::InRange};
}

}  // namespace tiergrade
