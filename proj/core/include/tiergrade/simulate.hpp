#pragma once

// Monte Carlo validation of the market wiring: simulated productive-value and
// grade draws, competitive Bayesian wages, and best-response audits.

#include <cstdint>
#include <string>
#include <vector>

#include "tiergrade/design.hpp"
#include "tiergrade/model.hpp"

namespace tiergrade {

struct SimConfig {
    long long students_per_school = 1000;
    std::uint64_t seed = 0;
    double deviation_grid_step = 1e-3;
};

struct SchoolSimStats {
    double mean_type;
    double effort;
    double model_pass_rate;          // (theta_bar + e*) g1 + (1 - theta_bar - e*) g0
    double empirical_pass_rate;
    double q_pass, q_fail;           // model posteriors (the wages paid)
    // Empirical share of value-1 students per grade; diagnostic only, wages
    // always come from the model posteriors.
    double empirical_value_given_pass;
    double empirical_value_given_fail;
    double gap_pass, gap_fail;       // |empirical - model|, 0 when grade unobserved
    long long n_pass;
};

struct SimReport {
    std::vector<SchoolSimStats> schools;
    std::uint64_t seed;
    std::string rng_id;  // algorithm identifier, recorded for reproducibility
    double best_response_gap;
};

// Per school s (in index order, each on its own substream derived from
// (seed, s)): draw N productive values Bernoulli(theta_bar_s + e*_s), grades
// via G_s, wages from the model posteriors; report empirical-vs-model gaps.
SimReport simulate_market(const SchoolSystem& system, const ModelParams& params,
                          const SimConfig& cfg);

// Max over schools and over the deviation grid of payoff(deviation) -
// payoff(e*_s), computed analytically. At solver efforts this is <= 1e-8.
double best_response_gap(const SchoolSystem& system, const ModelParams& params,
                         const SimConfig& cfg);

// Fixed-format CSV rendering of a report (one row per school plus a summary
// block); byte-identical for identical inputs.
std::string sim_report_csv(const SimReport& report);

}  // namespace tiergrade
