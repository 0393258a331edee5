#include "tiergrade/simulate.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "tiergrade/io.hpp"

namespace tiergrade {

namespace {

// splitmix64 mix of (seed, school index) -> substream seed. Documented in the
// report's rng_id; results are independent of school evaluation order.
std::uint64_t substream_seed(std::uint64_t seed, int school) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (static_cast<std::uint64_t>(school) + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

// Uniform double in [0,1) from the top 53 bits; avoids the
// implementation-defined std distributions so output is bit-stable.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimReport simulate_market(const SchoolSystem& system, const ModelParams& params,
                          const SimConfig& cfg) {
    system.validate(params);
    if (cfg.students_per_school < 1)
        throw std::invalid_argument("simulate_market: N must be >= 1");

    SimReport report;
    report.seed = cfg.seed;
    report.rng_id = "mt19937_64+splitmix64";

    for (int s = 0; s < system.school_count(); ++s) {
        const double theta_bar = system.school_mean(s);
        const GradingRule& rule = system.rules[s];
        const double e = equilibrium_effort(theta_bar, rule, params).effort;
        const double p1 = theta_bar + e;  // prob. of productive value 1

        std::mt19937_64 rng(substream_seed(cfg.seed, s));
        long long n_pass = 0, n_value1 = 0;
        long long pass_value1 = 0, fail_value1 = 0;
        for (long long i = 0; i < cfg.students_per_school; ++i) {
            const bool value1 = uniform01(rng) < p1;
            const double pass_prob = value1 ? rule.g1 : rule.g0;
            const bool pass = uniform01(rng) < pass_prob;
            n_value1 += value1;
            n_pass += pass;
            if (pass)
                pass_value1 += value1;
            else
                fail_value1 += value1;
        }
        const long long n = cfg.students_per_school;
        const long long n_fail = n - n_pass;

        SchoolSimStats st{};
        st.mean_type = theta_bar;
        st.effort = e;
        st.model_pass_rate = p1 * rule.g1 + (1.0 - p1) * rule.g0;
        st.empirical_pass_rate = static_cast<double>(n_pass) / n;
        st.q_pass = posterior_pass(theta_bar, e, rule);
        st.q_fail = posterior_fail(theta_bar, e, rule);
        st.n_pass = n_pass;
        st.empirical_value_given_pass =
            n_pass > 0 ? static_cast<double>(pass_value1) / n_pass : 0.0;
        st.empirical_value_given_fail =
            n_fail > 0 ? static_cast<double>(fail_value1) / n_fail : 0.0;
        st.gap_pass = n_pass > 0 ? std::fabs(st.empirical_value_given_pass - st.q_pass) : 0.0;
        st.gap_fail = n_fail > 0 ? std::fabs(st.empirical_value_given_fail - st.q_fail) : 0.0;
        report.schools.push_back(st);
    }
    report.best_response_gap = best_response_gap(system, params, cfg);
    return report;
}

double best_response_gap(const SchoolSystem& system, const ModelParams& params,
                         const SimConfig& cfg) {
    system.validate(params);
    if (!(cfg.deviation_grid_step > 0.0 && cfg.deviation_grid_step < params.max_effort()))
        throw std::invalid_argument("best_response_gap: step outside (0, 1-alpha)");
    double gap = 0.0;
    for (int s = 0; s < system.school_count(); ++s) {
        const double theta_bar = system.school_mean(s);
        const GradingRule& rule = system.rules[s];
        const double e = equilibrium_effort(theta_bar, rule, params).effort;
        const double base = expected_payoff(theta_bar, e, e, theta_bar, rule, params.cost);
        for (double d = 0.0; d <= params.max_effort() + 1e-15; d += cfg.deviation_grid_step) {
            const double dev = std::min(d, params.max_effort());
            const double u = expected_payoff(theta_bar, dev, e, theta_bar, rule, params.cost);
            gap = std::max(gap, u - base);
        }
    }
    return gap;
}

std::string sim_report_csv(const SimReport& report) {
    std::ostringstream out;
    out << "school,mean_type,effort,model_pass_rate,empirical_pass_rate,"
           "q_pass,q_fail,empirical_value_given_pass,empirical_value_given_fail,"
           "gap_pass,gap_fail,n_pass\n";
    for (size_t s = 0; s < report.schools.size(); ++s) {
        const SchoolSimStats& st = report.schools[s];
        out << s << ',' << io::fmt12(st.mean_type) << ',' << io::fmt12(st.effort) << ','
            << io::fmt12(st.model_pass_rate) << ',' << io::fmt12(st.empirical_pass_rate)
            << ',' << io::fmt12(st.q_pass) << ',' << io::fmt12(st.q_fail) << ','
            << io::fmt12(st.empirical_value_given_pass) << ','
            << io::fmt12(st.empirical_value_given_fail) << ',' << io::fmt12(st.gap_pass)
            << ',' << io::fmt12(st.gap_fail) << ',' << st.n_pass << '\n';
    }
    out << "# seed=" << report.seed << " rng=" << report.rng_id
        << " best_response_gap=" << io::fmt12(report.best_response_gap) << '\n';
    return out.str();
}

}  // namespace tiergrade
