#include "tiergrade/model.hpp"

#include <cmath>
#include <limits>

namespace tiergrade {

namespace {

constexpr double kPriorGuard = 1e-12;
constexpr double kMinSpread = 1e-9;
constexpr double kBisectTol = 1e-13;
constexpr int kMaxIter = 200;

void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace

namespace detail {
void check_prior(double x, const char* what) {
    if (!(x > kPriorGuard && x < 1.0 - kPriorGuard))
        throw std::domain_error(std::string(what) + ": prior " + std::to_string(x) +
                                " outside (0,1)");
}
}  // namespace detail

CostFunction CostFunction::quadratic(double kappa) {
    require(kappa > 0.0, "quadratic cost: kappa must be positive");
    return CostFunction{CostFamily::Quadratic, kappa, 2.0};
}

CostFunction CostFunction::power(double kappa, double p) {
    require(kappa > 0.0, "power cost: kappa must be positive");
    require(p >= 2.0, "power cost: exponent p must be >= 2");
    return CostFunction{CostFamily::Power, kappa, p};
}

double CostFunction::value(double e) const {
    switch (family) {
        case CostFamily::Quadratic: return kappa * e * e;
        case CostFamily::Power: return kappa * std::pow(e, p) / p;
    }
    return 0.0;
}

double CostFunction::prime(double e) const {
    switch (family) {
        case CostFamily::Quadratic: return 2.0 * kappa * e;
        case CostFamily::Power: return kappa * std::pow(e, p - 1.0);
    }
    return 0.0;
}

double CostFunction::prime_inverse_one() const {
    switch (family) {
        case CostFamily::Quadratic: return 1.0 / (2.0 * kappa);
        case CostFamily::Power: return std::pow(1.0 / kappa, 1.0 / (p - 1.0));
    }
    return 0.0;
}

ModelParams::ModelParams(double alpha_, double b_, CostFunction cost_)
    : alpha(alpha_), b(b_), cost(cost_) {
    require(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)");
    require(b > 0.0 && b < 1.0, "b must lie in (0,1)");
    require(cost.kappa > 0.0, "cost: kappa must be positive");
    if (cost.family == CostFamily::Power)
        require(cost.p >= 2.0, "cost: exponent p must be >= 2");

    require(cost.prime(0.0) == 0.0, "cost: c'(0) must be 0");
    require(cost.prime(1.0 - alpha) > 1.0,
            "cost inadmissible: c'(1-alpha) <= 1");

    // Grid check of c' strictly increasing and c'' nondecreasing on [0, 1-alpha].
    const int n = 200;
    const double h = (1.0 - alpha) / n;
    double prev_prime = cost.prime(0.0);
    double prev_second = -std::numeric_limits<double>::infinity();
    for (int i = 1; i <= n; ++i) {
        const double e = i * h;
        const double cp = cost.prime(e);
        require(cp > prev_prime, "cost: c' not strictly increasing");
        const double second = (cp - prev_prime) / h;
        require(second >= prev_second - 1e-9, "cost: c'' not nondecreasing");
        prev_prime = cp;
        prev_second = second;
    }
}

GradingRule::GradingRule(double g0_, double g1_, double b) : g0(g0_), g1(g1_) {
    require(g0 >= 0.0 && g1 <= 1.0, "grading rule: g0, g1 must lie in [0,1]");
    require(g1 - g0 >= kMinSpread, "grading rule: g1 - g0 below 1e-9");
    require(g1 - g0 <= b + 1e-12, "grading rule: g1 - g0 exceeds cap b");
}

GradingRule GradingRule::tough(double b) { return GradingRule(0.0, b, b); }
GradingRule GradingRule::lenient(double b) { return GradingRule(1.0 - b, 1.0, b); }

double posterior_pass(double theta_bar, double e_hat, const GradingRule& g) {
    const double x = theta_bar + e_hat;
    detail::check_prior(x, "posterior_pass");
    const double num = x * g.g1;
    return num / (num + (1.0 - x) * g.g0);
}

double posterior_fail(double theta_bar, double e_hat, const GradingRule& g) {
    const double x = theta_bar + e_hat;
    detail::check_prior(x, "posterior_fail");
    const double num = x * (1.0 - g.g1);
    return num / (num + (1.0 - x) * (1.0 - g.g0));
}

double marginal_benefit(const GradingRule& g, double x) {
    detail::check_prior(x, "marginal_benefit");
    const double d = g.g1 - g.g0;
    const double pass_term = x * g.g1 / (g.g0 + x * d);
    const double fail_term = x * (1.0 - g.g1) / (1.0 - g.g0 - x * d);
    return d * (pass_term - fail_term);
}

double expected_payoff(double theta, double e, double e_hat, double theta_bar,
                       const GradingRule& g, const CostFunction& cost) {
    if (!(e >= 0.0 && e <= 1.0) || !(e_hat >= 0.0 && e_hat <= 1.0))
        throw std::domain_error("expected_payoff: effort outside [0,1]");
    detail::check_prior(theta + e, "expected_payoff: own success prob");
    const double qp = posterior_pass(theta_bar, e_hat, g);
    const double qm = posterior_fail(theta_bar, e_hat, g);
    const double pass_prob = (theta + e) * g.g1 + (1.0 - theta - e) * g.g0;
    return pass_prob * qp + (1.0 - pass_prob) * qm - cost.value(e);
}

EquilibriumResult equilibrium_effort(double theta_bar, const GradingRule& g,
                                     const ModelParams& params) {
    if (!(theta_bar > 0.0 && theta_bar < params.alpha))
        throw std::invalid_argument("equilibrium_effort: theta_bar outside (0, alpha)");

    const auto h = [&](double e) {
        return marginal_benefit(g, theta_bar + e) - params.cost.prime(e);
    };

    double lo = 0.0;
    double hi = params.max_effort();
    if (!(h(lo) > 0.0))
        throw BracketError("equilibrium_effort: h(0) <= 0, bracket failure");
    if (!(h(hi) < 0.0))
        throw BracketError("equilibrium_effort: h(1-alpha) >= 0, bracket failure");

    int iter = 0;
    while (hi - lo > kBisectTol && iter < kMaxIter) {
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

bool verify_equilibrium(double theta_bar, const GradingRule& g, double e,
                        const ModelParams& params) {
    if (!(e >= 0.0 && e <= params.max_effort()))
        return false;
    const double base =
        expected_payoff(theta_bar, e, e, theta_bar, g, params.cost);
    const double step = 1e-3;
    for (double d = 0.0; d <= params.max_effort() + 1e-15; d += step) {
        const double dev = std::min(d, params.max_effort());
        if (expected_payoff(theta_bar, dev, e, theta_bar, g, params.cost) >
            base + 1e-9)
            return false;
    }
    return true;
}

}  // namespace tiergrade
