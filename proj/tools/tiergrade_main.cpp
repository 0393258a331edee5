// Command-line front end: config parsing, experiment commands, CSV report
// emission, and the one-shot verification suite.
//
// Exit codes: 0 success, 2 config validation, 3 numeric bracket failure,
// 4 oracle disagreement, 5 regularity failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "tiergrade/design.hpp"
#include "tiergrade/incentives.hpp"
#include "tiergrade/io.hpp"
#include "tiergrade/model.hpp"
#include "tiergrade/multivalue.hpp"
#include "tiergrade/simulate.hpp"
#include "tiergrade/verify.hpp"

namespace {

using nlohmann::json;
using namespace tiergrade;

constexpr int kExitConfig = 2;
constexpr int kExitBracket = 3;
constexpr int kExitOracle = 4;
constexpr int kExitRegularity = 5;

struct Options {
    std::string config_path;
    std::string out_dir;
    bool oracle = false;
    std::optional<std::uint64_t> seed;
};

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open config '" + path + "'");
    json cfg;
    in >> cfg;
    return cfg;
}

ModelParams parse_model(const json& cfg) {
    if (!cfg.contains("model")) throw std::invalid_argument("config: missing 'model'");
    const json& m = cfg.at("model");
    const json& c = m.at("cost");
    const std::string family = c.at("family").get<std::string>();
    CostFunction cost;
    if (family == "quadratic")
        cost = CostFunction::quadratic(c.at("kappa").get<double>());
    else if (family == "power")
        cost = CostFunction::power(c.at("kappa").get<double>(), c.at("p").get<double>());
    else
        throw std::invalid_argument("config: unknown cost family '" + family + "'");
    return ModelParams(m.at("alpha").get<double>(), m.at("b").get<double>(), cost);
}

GradingRule parse_rule(const json& spec, const ModelParams& params) {
    if (spec.is_string()) {
        const std::string name = spec.get<std::string>();
        if (name == "tough") return GradingRule::tough(params.b);
        if (name == "lenient") return GradingRule::lenient(params.b);
        throw std::invalid_argument("config: unknown rule '" + name + "'");
    }
    return GradingRule(spec.at("g0").get<double>(), spec.at("g1").get<double>(), params.b);
}

std::vector<Student> parse_population(const json& block, const ModelParams& params) {
    if (block.contains("population"))
        return io::read_population_file(block.at("population").get<std::string>());
    if (block.contains("students")) {
        std::vector<Student> out;
        for (const json& s : block.at("students"))
            out.push_back({s.at("id").get<std::string>(), s.at("theta").get<double>()});
        return out;
    }
    if (block.contains("two_type")) {
        const json& t = block.at("two_type");
        const double mu = t.at("mu").get<double>();
        const double sigma = t.at("sigma").get<double>();
        const int count = t.value("count_per_type", 1);
        std::vector<Student> out;
        for (int i = 0; i < count; ++i) {
            out.push_back({"lo" + std::to_string(i), mu - sigma});
            out.push_back({"hi" + std::to_string(i), mu + sigma});
        }
        return out;
    }
    (void)params;
    throw std::invalid_argument(
        "config: need 'population', 'students', or 'two_type'");
}

SchoolSystem parse_system(const json& cfg, const ModelParams& params) {
    if (!cfg.contains("system")) throw std::invalid_argument("config: missing 'system'");
    SchoolSystem sys;
    int school = 0;
    for (const json& sc : cfg.at("system").at("schools")) {
        sys.rules.push_back(parse_rule(sc.at("rule"), params));
        int j = 0;
        for (const json& theta : sc.at("thetas")) {
            sys.students.push_back(
                {"s" + std::to_string(school) + "_" + std::to_string(j++),
                 theta.get<double>()});
            sys.assignment.push_back(school);
        }
        ++school;
    }
    sys.validate(params);
    return sys;
}

TypeDistribution parse_distribution(const json& cfg, const ModelParams& params) {
    if (!cfg.contains("distribution"))
        throw std::invalid_argument("config: missing 'distribution'");
    const json& d = cfg.at("distribution");
    const std::string kind = d.at("kind").get<std::string>();
    if (kind == "uniform") return TypeDistribution::uniform(params.alpha);
    if (kind == "discretized") {
        std::vector<std::pair<double, double>> atoms;
        for (const json& a : d.at("atoms"))
            atoms.push_back({a.at(0).get<double>(), a.at(1).get<double>()});
        return TypeDistribution::discretized(std::move(atoms), params.alpha);
    }
    throw std::invalid_argument("config: unknown distribution kind '" + kind + "'");
}

// Writes the table to stdout and, when --out is given, to <out>/<name>.
void emit(const Options& opts, const std::string& name, const std::string& content) {
    std::cout << content;
    if (!opts.out_dir.empty()) {
        std::filesystem::create_directories(opts.out_dir);
        std::ofstream out(std::filesystem::path(opts.out_dir) / name);
        out << content;
    }
}

std::string rule_str(const GradingRule& g) {
    return "(" + io::fmt12(g.g0) + "," + io::fmt12(g.g1) + ")";
}

int cmd_effort(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const json& block = cfg.at("effort");
    const double theta_bar = block.at("theta_bar").get<double>();
    const GradingRule rule = parse_rule(block.at("rule"), params);
    const EquilibriumResult eq = equilibrium_effort(theta_bar, rule, params);
    const double qp = posterior_pass(theta_bar, eq.effort, rule);
    const double qm = posterior_fail(theta_bar, eq.effort, rule);
    const double payoff =
        expected_payoff(theta_bar, eq.effort, eq.effort, theta_bar, rule, params.cost);
    std::ostringstream out;
    out << "theta_bar,rule_g0,rule_g1,effort,residual,iterations,q_pass,q_fail,"
           "cost,payoff\n"
        << io::fmt12(theta_bar) << ',' << io::fmt12(rule.g0) << ',' << io::fmt12(rule.g1)
        << ',' << io::fmt12(eq.effort) << ',' << io::fmt12(eq.residual) << ','
        << eq.iterations << ',' << io::fmt12(qp) << ',' << io::fmt12(qm) << ','
        << io::fmt12(params.cost.value(eq.effort)) << ',' << io::fmt12(payoff) << '\n';
    emit(opts, "effort.csv", out.str());
    return 0;
}

int cmd_theta_dagger(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const CutoffResult dagger = theta_dagger(params);
    std::ostringstream summary;
    summary << "theta_dagger,flag\n"
            << io::fmt12(dagger.value) << ','
            << (dagger.flag == RangeFlag::InRange
                    ? "in-range"
                    : dagger.flag == RangeFlag::OutOfRangeLow ? "out-of-range-low"
                                                              : "out-of-range-high")
            << '\n';
    emit(opts, "theta_dagger.csv", summary.str());

    const GradingRule tough = GradingRule::tough(params.b);
    const GradingRule lenient = GradingRule::lenient(params.b);
    std::ostringstream curve;
    curve << "theta_bar,xi_tough,xi_lenient,delta\n";
    for (int i = 0; i < 100; ++i) {
        const double theta = params.alpha * (i + 0.5) / 100.0;
        const double et = equilibrium_effort(theta, tough, params).effort;
        const double el = equilibrium_effort(theta, lenient, params).effort;
        curve << io::fmt12(theta) << ',' << io::fmt12(et) << ',' << io::fmt12(el) << ','
              << io::fmt12(el - et) << '\n';
    }
    emit(opts, "delta_curve.csv", curve.str());
    return 0;
}

std::string structure_str(const StructureClass& cls) {
    switch (cls.kind) {
        case StructureKind::SingleTier: return "single-tier";
        case StructureKind::TwoTier: return "two-tier";
        case StructureKind::Other: return "other";
    }
    return "other";
}

int cmd_design(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const std::vector<Student> students = parse_population(cfg.at("design"), params);
    const DesignResult result = optimal_two_tier(students, params);
    const StructureClass cls = structure_classify(result.system);

    std::ostringstream out;
    out << "structure," << structure_str(cls) << '\n';
    for (int s = 0; s < result.system.school_count(); ++s)
        out << "school_rule," << s << ',' << rule_str(result.system.rules[s]) << '\n';
    emit(opts, "design_summary.csv", out.str());
    emit(opts, "design_welfare.csv", io::welfare_report_csv(result.report));

    // Knife-edge report: at theta_dagger both extreme rules are candidates.
    const CutoffResult dagger = theta_dagger(params);
    if (cls.kind == StructureKind::SingleTier &&
        std::fabs(result.system.school_mean(0) - dagger.value) <= 1e-9) {
        const double mean = result.system.school_mean(0);
        std::ostringstream knife;
        knife << "# knife-edge: mean type equals theta_dagger, both rules reported\n"
              << "rule,welfare_per_student\n";
        for (const GradingRule& g :
             {GradingRule::tough(params.b), GradingRule::lenient(params.b)}) {
            const double e = equilibrium_effort(mean, g, params).effort;
            knife << rule_str(g) << ',' << io::fmt12(mean + e - params.cost.value(e))
                  << '\n';
        }
        emit(opts, "design_knife_edge.csv", knife.str());
    }

    if (opts.oracle) {
        if (students.size() > 6) {
            std::cerr << "design: --oracle requires at most 6 students\n";
            return kExitConfig;
        }
        const DesignResult oracle = brute_force_design(
            students, default_rule_grid(params), static_cast<int>(students.size()),
            params);
        const double gap = oracle.report.total - result.report.total;
        std::ostringstream line;
        line << "oracle_welfare,search_welfare,gap\n"
             << io::fmt12(oracle.report.total) << ',' << io::fmt12(result.report.total)
             << ',' << io::fmt12(gap) << '\n';
        emit(opts, "design_oracle.csv", line.str());
        if (std::fabs(gap) > 1e-8) {
            std::cerr << "design: oracle disagrees by " << gap << '\n';
            return kExitOracle;
        }
        std::cout << "# oracle agrees within 1e-8\n";
    }
    return 0;
}

int cmd_design_constrained(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const TypeDistribution F = parse_distribution(cfg, params);
    const ConstrainedOptimum opt = constrained_optimal(F, params);
    std::ostringstream out;
    out << "tier,lo,hi,rule,mass,mean,effort,fee\n";
    for (size_t k = 0; k < opt.system.tiers.size(); ++k) {
        const Tier& t = opt.system.tiers[k];
        out << k << ',' << io::fmt12(t.lo) << ',' << io::fmt12(t.hi) << ','
            << rule_str(t.rule) << ',' << io::fmt12(t.mass) << ',' << io::fmt12(t.mean)
            << ',' << io::fmt12(t.effort) << ',' << io::fmt12(opt.fees.fees[k]) << '\n';
    }
    out << "# welfare=" << io::fmt12(opt.welfare)
        << " structure=" << (opt.two_tier ? "two-tier" : "single-tier")
        << " constraint_bound=" << (opt.constraint_bound ? "yes" : "no");
    if (opt.two_tier)
        out << " cutoff=" << io::fmt12(opt.cutoff)
            << " unconstrained_cutoff=" << io::fmt12(opt.unconstrained_cutoff);
    out << " is_regular=" << (is_regular(opt.system, params).regular ? "true" : "false")
        << '\n';
    emit(opts, "design_constrained.csv", out.str());
    return 0;
}

int cmd_ic_check(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const SchoolSystem sys = parse_system(cfg, params);
    const ICResult ic = ic_without_transfers(sys, params);
    std::ostringstream out;
    out << "incentive_compatible," << (ic.incentive_compatible ? "true" : "false") << '\n';
    if (ic.witness) {
        out << "witness_student," << sys.students[ic.witness->student].id << '\n'
            << "witness_better_school," << ic.witness->better_school << '\n'
            << "witness_gap," << io::fmt12(ic.witness->gap) << '\n';
    }
    emit(opts, "ic_check.csv", out.str());
    return 0;
}

int cmd_fees(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const TypeDistribution F = parse_distribution(cfg, params);
    const json& reg = cfg.at("regular");
    std::vector<double> cutoffs;
    for (const json& c : reg.at("cutoffs")) cutoffs.push_back(c.get<double>());
    std::vector<GradingRule> rules;
    for (const json& r : reg.at("rules")) rules.push_back(parse_rule(r, params));
    const RegularSystem sys = make_regular(F, cutoffs, rules, params);
    const FeeSchedule fees = fees_for_regular(sys, params);

    std::ostringstream out;
    out << "tier,lo,hi,rule,effort,fee,cutoff_indifference_residual\n";
    for (size_t k = 0; k < sys.tiers.size(); ++k) {
        double residual = 0.0;
        if (k > 0) {
            const double theta = sys.tiers[k - 1].hi;
            residual = (indirect_utility(theta, sys.tiers[k].mean, sys.tiers[k].rule,
                                         params) -
                        fees.fees[k]) -
                       (indirect_utility(theta, sys.tiers[k - 1].mean,
                                         sys.tiers[k - 1].rule, params) -
                        fees.fees[k - 1]);
        }
        out << k << ',' << io::fmt12(sys.tiers[k].lo) << ',' << io::fmt12(sys.tiers[k].hi)
            << ',' << rule_str(sys.tiers[k].rule) << ',' << io::fmt12(sys.tiers[k].effort)
            << ',' << io::fmt12(fees.fees[k]) << ',' << io::fmt12(residual) << '\n';
    }
    emit(opts, "fees.csv", out.str());
    return 0;
}

int cmd_simulate(const json& cfg, const Options& opts) {
    const ModelParams params = parse_model(cfg);
    const SchoolSystem sys = parse_system(cfg, params);
    const json& block = cfg.at("simulate");
    SimConfig sim{};
    sim.students_per_school = block.value("students_per_school", 100000LL);
    sim.seed = block.value("seed", 0ULL);
    sim.deviation_grid_step = block.value("deviation_grid_step", 1e-3);
    if (opts.seed) sim.seed = *opts.seed;
    const SimReport report = simulate_market(sys, params, sim);
    emit(opts, "simulate.csv", sim_report_csv(report));
    return 0;
}

int cmd_multivalue(const json& cfg, const Options& opts) {
    using namespace multivalue;
    const ModelParams params = parse_model(cfg);
    const json& block = cfg.at("multivalue");
    const auto vals = block.at("values");
    const ValueTriple values(vals.at(0).get<double>(), vals.at(1).get<double>(),
                             vals.at(2).get<double>());
    const auto vec3 = [](const json& arr) {
        return std::array<double, 3>{arr.at(0).get<double>(), arr.at(1).get<double>(),
                                     arr.at(2).get<double>()};
    };
    const OutcomeDistributions dists(vec3(block.at("pi_low")), vec3(block.at("pi_high")));

    GradingMatrix M = GradingMatrix::tough3(params.b);
    const json& rule = block.at("rule");
    if (rule.is_string()) {
        const std::string name = rule.get<std::string>();
        if (name == "tough3") M = GradingMatrix::tough3(params.b);
        else if (name == "lenient3") M = GradingMatrix::lenient3(params.b);
        else if (name == "tilde_lenient") M = GradingMatrix::tilde_lenient(params.b);
        else if (name == "tilde_tough") M = GradingMatrix::tilde_tough(params.b);
        else throw std::invalid_argument("config: unknown multivalue rule '" + name + "'");
    } else {
        std::array<std::array<double, 3>, 3> rows;
        for (int i = 0; i < 3; ++i) rows[i] = vec3(rule.at(i));
        M = GradingMatrix::custom(rows);
    }

    const int count = block.value("theta_grid_count", 50);
    std::vector<double> grid;
    for (int i = 0; i < count; ++i) grid.push_back(params.alpha * (i + 0.5) / count);
    const auto curve = effort_curve(M, grid, values, dists, params);
    std::ostringstream out;
    out << "theta_bar,root_index,effort\n";
    for (const EffortCurveRow& row : curve)
        for (size_t i = 0; i < row.roots.size(); ++i)
            out << io::fmt12(row.theta_bar) << ',' << i << ',' << io::fmt12(row.roots[i])
                << '\n';
    emit(opts, "multivalue_curve.csv", out.str());

    if (M.canonical()) {
        const CutoffResult dagger = theta_dagger3(values, dists, params);
        std::ostringstream line;
        line << "theta_dagger3,flag\n"
             << io::fmt12(dagger.value) << ','
             << (dagger.flag == RangeFlag::InRange ? "in-range" : "out-of-range") << '\n';
        emit(opts, "multivalue_dagger.csv", line.str());
    }

    if (block.value("search_tilde", false)) {
        // Scripted hunt for a parameterization where the TildeLenient vs
        // TildeTough effort comparison is non-monotone in the mean type.
        bool found = false;
        std::ostringstream report;
        for (double b : {0.2, 0.4, 0.6, 0.8}) {
            // low = (a, 1-a, 0), high = (0, 1-a, a): mass a moves from the
            // bottom value straight to the top, the middle stays put.
            for (double a : {0.3, 0.6, 0.9}) {
                const OutcomeDistributions d({a, 1.0 - a, 0.0}, {0.0, 1.0 - a, a});
                const GradingMatrix tl = GradingMatrix::tilde_lenient(b);
                const GradingMatrix tt = GradingMatrix::tilde_tough(b);
                std::vector<double> diffs;
                bool clean = true;
                for (int i = 0; i < 40 && clean; ++i) {
                    const double theta = params.alpha * (i + 0.5) / 40.0;
                    const auto rl = equilibrium_roots3(theta, tl, values, d, params);
                    const auto rt = equilibrium_roots3(theta, tt, values, d, params);
                    if (rl.size() != 1 || rt.size() != 1) { clean = false; break; }
                    diffs.push_back(rl[0] - rt[0]);
                }
                if (!clean) continue;
                bool up = false, down = false;
                for (size_t i = 1; i < diffs.size(); ++i) {
                    if (diffs[i] > diffs[i - 1] + 1e-12) up = true;
                    if (diffs[i] < diffs[i - 1] - 1e-12) down = true;
                }
                if (up && down) {
                    found = true;
                    report << "# non-monotone tilde comparison at b=" << b
                           << " a=" << a << '\n';
                }
            }
        }
        if (!found)
            report << "# no non-monotone tilde comparison found in the searched grid\n";
        emit(opts, "tilde_search.txt", report.str());
    }
    return 0;
}

int cmd_verify(const Options& opts) {
    const auto results =
        tiergrade::verify::run_all(opts.seed.value_or(20240214ULL));
    bool all = true;
    std::ostringstream out;
    for (const auto& r : results) {
        out << (r.pass ? "PASS" : "FAIL") << ' ' << r.name;
        if (!r.detail.empty()) out << " -- " << r.detail;
        out << '\n';
        all = all && r.pass;
    }
    emit(opts, "verify.txt", out.str());
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Equilibrium effort, school-system design, and verification"};
    app.require_subcommand(1);

    Options opts;
    std::uint64_t seed_arg = 0;
    bool seed_set = false;

    const std::vector<std::string> commands = {
        "effort", "theta-dagger", "design", "design-constrained", "ic-check",
        "fees", "simulate", "multivalue", "verify"};
    for (const std::string& name : commands) {
        CLI::App* sub = app.add_subcommand(name);
        if (name != "verify")
            sub->add_option("--config", opts.config_path, "config file (JSON)")
                ->required();
        else
            sub->add_option("--config", opts.config_path, "config file (JSON)");
        sub->add_option("--out", opts.out_dir, "output directory for CSV files");
        sub->add_flag("--oracle", opts.oracle, "run the brute-force oracle comparison");
        sub->add_option("--seed", seed_arg, "seed override")
            ->each([&](const std::string&) { seed_set = true; });
    }

    CLI11_PARSE(app, argc, argv);
    if (seed_set) opts.seed = seed_arg;
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        if (command == "verify") return cmd_verify(opts);
        const json cfg = load_config(opts.config_path);
        if (command == "effort") return cmd_effort(cfg, opts);
        if (command == "theta-dagger") return cmd_theta_dagger(cfg, opts);
        if (command == "design") return cmd_design(cfg, opts);
        if (command == "design-constrained") return cmd_design_constrained(cfg, opts);
        if (command == "ic-check") return cmd_ic_check(cfg, opts);
        if (command == "fees") return cmd_fees(cfg, opts);
        if (command == "simulate") return cmd_simulate(cfg, opts);
        if (command == "multivalue") return cmd_multivalue(cfg, opts);
    } catch (const BracketError& e) {
        std::cerr << "bracket failure: " << e.what() << '\n';
        return kExitBracket;
    } catch (const RegularityError& e) {
        std::cerr << "regularity failure: " << e.what() << '\n';
        return kExitRegularity;
    } catch (const json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    return 0;
}
