#include "frtcd/mc_planner.hpp"

#include "frtcd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frtcd {

double error_bound(std::uint64_t k, double epsilon) {
    if (k == 0) throw input_error("error_bound needs K >= 1");
    if (!(epsilon > 0.0)) throw input_error("error_bound needs epsilon > 0");
    return std::min(1.0, 4.0 * std::exp(-static_cast<double>(k) * epsilon * epsilon / 8.0));
}

std::uint64_t required_k(double epsilon, double delta) {
    if (!(epsilon > 0.0 && epsilon <= 1.0)) throw input_error("epsilon must lie in (0, 1]");
    if (!(delta > 0.0 && delta < 1.0)) throw input_error("delta must lie in (0, 1)");
    // Shave a relative 1e-9 so a threshold that is an integer up to rounding
    // does not tip over to the next one.
    const double k = 8.0 * std::log(4.0 / delta) / (epsilon * epsilon) * (1.0 - 1e-9);
    if (k >= static_cast<double>(std::numeric_limits<std::uint64_t>::max())) throw input_error("epsilon is too small");
    return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::ceil(k)));
}

std::uint64_t mc_plan::draws() const {
    return how == strategy::enumerate ? total.convert_to<std::uint64_t>() : k_threshold;
}

std::string mc_plan::describe() const {
    return how == strategy::enumerate ? "enumerate(" + total.str() + ")"
                                      : "sample(" + std::to_string(k_threshold) + ")";
}

mc_plan plan(const design& d, double epsilon, double delta) {
    mc_plan p;
    p.epsilon = epsilon;
    p.delta = delta;
    p.k_threshold = required_k(epsilon, delta);
    p.total = total_assignments(d);
    p.how = p.total <= p.k_threshold ? mc_plan::strategy::enumerate : mc_plan::strategy::sample;
    return p;
}

const std::vector<double>& default_epsilons() {
    static const std::vector<double> eps{0.1, 0.05, 0.02, 0.01, 0.005, 0.002, 0.001};
    return eps;
}

double sup_distance(const pvalue_step_function& f, const pvalue_step_function& g) {
    if (f.side() != g.side()) throw input_error("sup_distance needs functions of the same side");
    double worst = std::abs(f.at_minus_infinity() - g.at_minus_infinity());
    for (double b : f.breakpoints()) worst = std::max(worst, std::abs(f(b) - g(b)));
    for (double b : g.breakpoints()) worst = std::max(worst, std::abs(f(b) - g(b)));
    return worst;
}

}  // namespace frtcd
