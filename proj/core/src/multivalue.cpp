#include "tiergrade/multivalue.hpp"

#include <cmath>
#include <limits>

namespace tiergrade::multivalue {

namespace {

constexpr double kSumTol = 1e-12;

void check_simplex(const std::array<double, 3>& pi, const char* what) {
    double sum = 0.0;
    for (double p : pi) {
        if (!(p >= 0.0))
            throw std::invalid_argument(std::string(what) + ": negative entry");
        sum += p;
    }
    if (std::fabs(sum - 1.0) > kSumTol)
        throw std::invalid_argument(std::string(what) + ": entries do not sum to 1");
}

void check_b(double b) {
    if (!(b > 0.0 && b < 1.0))
        throw std::invalid_argument("grading matrix: b outside (0,1)");
}

}  // namespace

ValueTriple::ValueTriple(double v1_, double v2_, double v3_)
    : v1(v1_), v2(v2_), v3(v3_) {
    if (!(v1 < v2 && v2 < v3))
        throw std::invalid_argument("ValueTriple: values must be strictly increasing");
}

OutcomeDistributions::OutcomeDistributions(std::array<double, 3> low_,
                                           std::array<double, 3> high_)
    : low(low_), high(high_) {
    check_simplex(low, "pi_low");
    check_simplex(high, "pi_high");
    // FOSD: high_1 <= low_1 and high_1 + high_2 <= low_1 + low_2, one strict.
    const double d1 = low[0] - high[0];
    const double d12 = (low[0] + low[1]) - (high[0] + high[1]);
    if (d1 < -kSumTol || d12 < -kSumTol || (d1 <= kSumTol && d12 <= kSumTol))
        throw std::invalid_argument(
            "OutcomeDistributions: pi_high must strictly FOSD-dominate pi_low");
}

GradingMatrix GradingMatrix::custom(std::array<std::array<double, 3>, 3> rows) {
    for (const auto& row : rows) check_simplex(row, "grading matrix row");
    return GradingMatrix{rows, RuleKind3::Custom};
}

// Grade columns are ordered {A, B, C}.
GradingMatrix GradingMatrix::tough3(double b) {
    check_b(b);
    return GradingMatrix{{{{0.0, 0.0, 1.0},       // v1 -> C
                           {0.0, b, 1.0 - b},     // v2 -> B w.p. b, else C
                           {1.0, 0.0, 0.0}}},     // v3 -> A
                         RuleKind3::Tough3};
}

GradingMatrix GradingMatrix::lenient3(double b) {
    check_b(b);
    return GradingMatrix{{{{0.0, 0.0, 1.0},       // v1 -> C
                           {1.0 - b, b, 0.0},     // v2 -> B w.p. b, else A
                           {1.0, 0.0, 0.0}}},     // v3 -> A
                         RuleKind3::Lenient3};
}

GradingMatrix GradingMatrix::tilde_lenient(double b) {
    check_b(b);
    return GradingMatrix{{{{0.0, 1.0 - b, b},     // v1 -> C w.p. b, else B
                           {0.0, 1.0, 0.0},       // v2 -> B
                           {1.0, 0.0, 0.0}}},     // v3 -> A
                         RuleKind3::TildeLenient};
}

GradingMatrix GradingMatrix::tilde_tough(double b) {
    check_b(b);
    return GradingMatrix{{{{0.0, 0.0, 1.0},       // v1 -> C
                           {0.0, 1.0, 0.0},       // v2 -> B
                           {b, 1.0 - b, 0.0}}},   // v3 -> A w.p. b, else B
                         RuleKind3::TildeTough};
}

std::array<double, 3> mix(double x, const OutcomeDistributions& dists) {
    if (!(x >= 0.0 && x <= 1.0))
        throw std::domain_error("mix: x outside [0,1]");
    std::array<double, 3> out{};
    for (int i = 0; i < 3; ++i)
        out[i] = (1.0 - x) * dists.low[i] + x * dists.high[i];
    return out;
}

std::array<GradePosterior, 3> grade_posteriors(double x, const GradingMatrix& M,
                                               const ValueTriple& values,
                                               const OutcomeDistributions& dists) {
    tiergrade::detail::check_prior(x, "grade_posteriors");
    const std::array<double, 3> pi = mix(x, dists);
    const std::array<double, 3> v = {values.v1, values.v2, values.v3};
    std::array<GradePosterior, 3> out{};
    for (int g = 0; g < 3; ++g) {
        double prob = 0.0, weighted = 0.0;
        for (int i = 0; i < 3; ++i) {
            prob += pi[i] * M.rows[i][g];
            weighted += v[i] * pi[i] * M.rows[i][g];
        }
        if (prob > 0.0)
            out[g] = {true, prob, weighted / prob};
        else
            out[g] = {false, 0.0, std::numeric_limits<double>::quiet_NaN()};
    }
    return out;
}

double marginal_benefit3(const GradingMatrix& M, double x, const ValueTriple& values,
                         const OutcomeDistributions& dists) {
    const auto q = grade_posteriors(x, M, values, dists);
    double mb = 0.0;
    for (int i = 0; i < 3; ++i) {
        double row = 0.0;
        for (int g = 0; g < 3; ++g) {
            if (M.rows[i][g] == 0.0) continue;
            // Reachability: a grade with positive matrix weight but zero mixed
            // probability can only arise when the mixed value weight is zero
            // too, so skipping it drops a zero-probability term.
            if (!q[g].reachable) continue;
            row += M.rows[i][g] * q[g].value;
        }
        mb += (dists.high[i] - dists.low[i]) * row;
    }
    return mb;
}

EquilibriumResult equilibrium_effort3(double theta_bar, const GradingMatrix& M,
                                      const ValueTriple& values,
                                      const OutcomeDistributions& dists,
                                      const ModelParams& params) {
    if (!M.canonical())
        throw std::invalid_argument(
            "equilibrium_effort3: uniqueness only holds for Tough3/Lenient3; "
            "use equilibrium_roots3 for general matrices");
    if (!(theta_bar > 0.0 && theta_bar < params.alpha))
        throw std::invalid_argument("equilibrium_effort3: theta_bar outside (0, alpha)");

    const auto h = [&](double e) {
        return marginal_benefit3(M, theta_bar + e, values, dists) -
               params.cost.prime(e);
    };
    double lo = 0.0, hi = params.max_effort();
    if (!(h(lo) > 0.0))
        throw BracketError("equilibrium_effort3: h(0) <= 0");
    if (!(h(hi) < 0.0))
        throw BracketError("equilibrium_effort3: h(1-alpha) >= 0");
    int iter = 0;
    while (hi - lo > 1e-13 && iter < 200) {
        const double mid = 0.5 * (lo + hi);
        if (h(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
        ++iter;
    }
    const double e = 0.5 * (lo + hi);
    return EquilibriumResult{e, std::fabs(h(e)), iter};
}

std::vector<double> equilibrium_roots3(double theta_bar, const GradingMatrix& M,
                                       const ValueTriple& values,
                                       const OutcomeDistributions& dists,
                                       const ModelParams& params) {
    if (!(theta_bar > 0.0 && theta_bar < params.alpha))
        throw std::invalid_argument("equilibrium_roots3: theta_bar outside (0, alpha)");
    const auto h = [&](double e) {
        return marginal_benefit3(M, theta_bar + e, values, dists) -
               params.cost.prime(e);
    };
    const double step = 1e-4;
    const double emax = params.max_effort();
    std::vector<double> roots;
    double prev_e = 0.0;
    double prev_h = h(0.0);
    for (double e = step; e <= emax + 1e-15; e += step) {
        const double ee = std::min(e, emax);
        const double he = h(ee);
        if ((prev_h > 0.0 && he <= 0.0) || (prev_h < 0.0 && he >= 0.0)) {
            double a = prev_e, b = ee, fa = prev_h;
            for (int i = 0; i < 60 && b - a > 1e-13; ++i) {
                const double mid = 0.5 * (a + b);
                const double fm = h(mid);
                if ((fa > 0.0) == (fm > 0.0)) {
                    a = mid; fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push_back(0.5 * (a + b));
        }
        prev_e = ee;
        prev_h = he;
    }
    return roots;
}

bool tough3_monotone_condition(const OutcomeDistributions& dists, double b) {
    const double d1 = dists.high[0] - dists.low[0];
    const double d2 = dists.high[1] - dists.low[1];
    if (!(d1 < 0.0)) return false;
    return d2 < 0.0 || (1.0 - b) * std::fabs(d2) < std::fabs(d1);
}

bool lenient3_monotone_condition(const OutcomeDistributions& dists, double b) {
    const double d2 = dists.high[1] - dists.low[1];
    const double d3 = dists.high[2] - dists.low[2];
    if (!(d3 > 0.0)) return false;
    return d2 > 0.0 || (1.0 - b) * std::fabs(d2) < std::fabs(d3);
}

CutoffResult theta_dagger3(const ValueTriple& values, const OutcomeDistributions& dists,
                           const ModelParams& params) {
    const GradingMatrix tough = GradingMatrix::tough3(params.b);
    const GradingMatrix lenient = GradingMatrix::lenient3(params.b);
    const auto delta = [&](double theta) {
        return equilibrium_effort3(theta, lenient, values, dists, params).effort -
               equilibrium_effort3(theta, tough, values, dists, params).effort;
    };
    const double eps = 1e-7 * params.alpha;
    double lo = eps, hi = params.alpha - eps;
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

std::vector<EffortCurveRow> effort_curve(const GradingMatrix& M,
                                         const std::vector<double>& theta_grid,
                                         const ValueTriple& values,
                                         const OutcomeDistributions& dists,
                                         const ModelParams& params) {
    std::vector<EffortCurveRow> rows;
    rows.reserve(theta_grid.size());
    for (double theta : theta_grid)
        rows.push_back({theta, equilibrium_roots3(theta, M, values, dists, params)});
    return rows;
}

}  // namespace tiergrade::multivalue
