#include "frtcd/simulation.hpp"

#include "frtcd/error.hpp"
#include "frtcd/parallel.hpp"
#include "frtcd/rng.hpp"

#include <algorithm>
#include <cmath>

namespace frtcd {

void population::validate() const {
    if (y0.size() != y1.size()) throw input_error("population columns differ in length");
    if (y0.size() < 2) throw input_error("population needs at least two units");
    double scale = 1.0;
    for (std::size_t i = 0; i < y0.size(); ++i) scale = std::max({scale, std::abs(y0[i]), std::abs(y1[i])});
    for (std::size_t i = 0; i < y0.size(); ++i) {
        if (!std::isfinite(y0[i]) || !std::isfinite(y1[i])) throw input_error("population outcomes must be finite");
        if (std::abs(y1[i] - y0[i] - theta) > 1e-9 * scale)
            throw input_error("unit " + std::to_string(i) + " does not have the population effect " +
                              std::to_string(theta));
    }
}

population generate_population(std::size_t n, double true_theta, std::uint64_t seed) {
    if (n < 2) throw input_error("population needs at least two units");
    if (!std::isfinite(true_theta)) throw input_error("true theta must be finite");
    population pop;
    pop.theta = true_theta;
    pop.y0.resize(n);
    pop.y1.resize(n);
    counter_rng rng(seed, 0);
    for (std::size_t i = 0; i < n; ++i) {
        pop.y0[i] = std::exp(rng.normal());
        pop.y1[i] = pop.y0[i] + true_theta;
    }
    return pop;
}

observed_data realize(const population& pop, std::span<const std::uint8_t> w) {
    if (w.size() != pop.size()) throw input_error("assignment length does not match the population");
    std::vector<double> y(pop.size());
    for (std::size_t i = 0; i < y.size(); ++i) y[i] = w[i] ? pop.y1[i] : pop.y0[i];
    return observed_data(assignment(w.begin(), w.end()), std::move(y));
}

const arm_summary& scenario_result::arm(const std::string& arm_name) const {
    for (const auto& a : arms)
        if (a.name == arm_name) return a;
    throw input_error("scenario result has no arm '" + arm_name + "'");
}

namespace {

run_mode mode_for(const design& d, std::uint64_t k_cap, std::uint64_t seed) {
    const big_count total = total_assignments(d);
    if (total <= k_cap) return run_mode::exact(k_cap);
    return run_mode::monte_carlo(k_cap, seed);
}

arm_summary summarize(std::string name, const std::vector<confidence_interval>& cis, double theta) {
    arm_summary a;
    a.name = std::move(name);
    a.reps = cis.size();
    double sum = 0.0;
    std::size_t finite = 0;
    for (const auto& ci : cis) {
        a.covered += ci.contains(theta);
        const double w = ci.width();
        if (std::isfinite(w)) {
            sum += w;
            ++finite;
        } else {
            ++a.unbounded;
        }
    }
    a.coverage = static_cast<double>(a.covered) / static_cast<double>(a.reps);
    if (finite > 0) a.width_mean = sum / static_cast<double>(finite);
    if (finite > 1) {
        double ss = 0.0;
        for (const auto& ci : cis)
            if (std::isfinite(ci.width())) ss += (ci.width() - a.width_mean) * (ci.width() - a.width_mean);
        a.width_sd = std::sqrt(ss / static_cast<double>(finite - 1));
    }
    return a;
}

}  // namespace

scenario_result run_scenario(const scenario_config& config) {
    if (config.reps == 0) throw input_error("reps must be at least 1");
    if (!(config.alpha > 0.0 && config.alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (config.k_cap == 0) throw input_error("k_cap must be at least 1");
    const statistic& stat = statistic_registry::builtins().get(config.statistic);
    std::vector<combiner_spec> specs;
    for (const auto& c : config.combiners) specs.push_back(combiner_spec::by_name(c));
    const design* designs[2] = {&config.design1, &config.design2};

    build_options opts;
    opts.self_check_samples = config.self_check_samples;
    const std::size_t arms = 2 + specs.size();
    std::vector<std::vector<confidence_interval>> cis(arms, std::vector<confidence_interval>(config.reps));

    parallel_for(config.reps, [&](std::size_t begin, std::size_t end) {
        for (std::size_t r = begin; r < end; ++r) {
            try {
                const std::uint64_t rep_seed = derive_seed(config.master_seed, r);
                std::vector<step_function_set> sets;
                for (int e = 0; e < 2; ++e) {
                    const design& d = *designs[e];
                    const population pop =
                        generate_population(d.n_units(), config.true_theta, derive_seed(rep_seed, 10 + e));
                    assignment w(d.n_units());
                    sample_assignment(d, derive_seed(rep_seed, 20 + e), 0, w);
                    const observed_data data = realize(pop, w);
                    const run_mode mode = mode_for(d, config.k_cap, derive_seed(rep_seed, 30 + e));
                    sets.push_back(build_step_functions(data, draw_assignments(d, mode), stat, opts));
                }
                const double a = config.alpha / 2;
                cis[0][r] = proposed_interval(sets[0].l_plus, sets[0].l_minus, a, a);
                cis[1][r] = proposed_interval(sets[1].l_plus, sets[1].l_minus, a, a);
                for (std::size_t c = 0; c < specs.size(); ++c)
                    cis[2 + c][r] = combine_step_functions(sets, specs[c], config.alpha).combined;
            } catch (const error& e) {
                throw error(e.category(), "rep " + std::to_string(r) + ": " + e.what());
            }
        }
    }, 1);

    scenario_result out;
    out.name = config.name;
    out.mode1 = mode_for(config.design1, config.k_cap, 0).label();
    out.mode2 = mode_for(config.design2, config.k_cap, 0).label();
    out.arms.push_back(summarize("exp1", cis[0], config.true_theta));
    out.arms.push_back(summarize("exp2", cis[1], config.true_theta));
    for (std::size_t c = 0; c < specs.size(); ++c)
        out.arms.push_back(summarize(specs[c].name(), cis[2 + c], config.true_theta));
    return out;
}

audit_report exact_validity_audit(const population& pop, const design& d, const statistic& stat,
                                  const std::vector<double>& alphas, std::uint64_t cap) {
    pop.validate();
    if (pop.size() != d.n_units()) throw input_error("population size does not match the design");
    for (double a : alphas)
        if (!(a > 0.0 && a < 1.0)) throw input_error("audit levels must lie in (0, 1)");
    const assignment_set all = enumerate_assignments(d, cap);
    const std::size_t n = all.size();

    audit_report report;
    report.theta0 = pop.theta;
    report.dominance = compute_dominance_profile(realize(pop, all[0]), d, stat, pop.theta, cap);
    report.dominance_ok = std::all_of(report.dominance.laws.begin(), report.dominance.laws.end(),
                                      [](const pvalue_law& l) { return l.dominance_holds(); });
    report.gamma_bound_ok = true;
    for (auto k : {pvalue_kind::l_plus, pvalue_kind::l_minus})
        report.gamma_bound_ok = report.gamma_bound_ok &&
                                report.dominance.law(k).max_discrepancy() <= report.dominance.gamma_star;

    // covered[j * A + a] bit 0: proposed, bit 1: traditional.
    std::vector<std::uint8_t> covered(n * alphas.size(), 0);
    build_options opts;
    opts.self_check_samples = 0;
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            const auto sets = build_step_functions(realize(pop, all[j]), all, stat, opts);
            for (std::size_t a = 0; a < alphas.size(); ++a) {
                const double half = alphas[a] / 2;
                std::uint8_t bits = 0;
                try {
                    if (proposed_interval(sets.l_plus, sets.l_minus, half, half).contains(pop.theta)) bits |= 1;
                } catch (const level_too_high_error&) {
                }
                if (traditional_interval(sets.l_plus, alphas[a]).contains(pop.theta)) bits |= 2;
                covered[j * alphas.size() + a] = bits;
            }
        }
    }, 16);

    for (std::size_t a = 0; a < alphas.size(); ++a) {
        audit_row row;
        row.alpha = alphas[a];
        row.total = n;
        for (std::size_t j = 0; j < n; ++j) {
            row.proposed_covered += covered[j * alphas.size() + a] & 1;
            row.traditional_covered += (covered[j * alphas.size() + a] >> 1) & 1;
        }
        row.proposed_coverage = static_cast<double>(row.proposed_covered) / static_cast<double>(n);
        row.traditional_coverage = static_cast<double>(row.traditional_covered) / static_cast<double>(n);
        row.proposed_valid = row.proposed_coverage >= 1.0 - row.alpha;
        report.rows.push_back(row);
    }
    return report;
}

namespace fixtures {

population toy_population() {
    return {{1.00, 1.88, 1.52, 4.00, 1.85, 2.27, 0.92, 3.37, 0.72, 1.15},
            {2.00, 2.88, 2.52, 5.00, 2.85, 3.27, 1.92, 4.37, 1.72, 2.15},
            1.0};
}

observed_data toy_data() {
    const assignment w{1, 1, 1, 1, 0, 0, 0, 0, 1, 0};
    observed_data d = realize(toy_population(), w);
    for (int i = 1; i <= 10; ++i) d.unit_ids.push_back(std::to_string(i));
    return d;
}

design toy_design() { return design::completely_randomized(10, 5); }

population studentized_population() {
    return {{0.14, 1.12, 0.80, 1.80, 0.90, 0.44, 1.13, 0.53}, {1.14, 2.12, 1.80, 2.80, 1.90, 1.44, 2.13, 1.53}, 1.0};
}

observed_data studentized_data() {
    const assignment w{1, 1, 0, 1, 0, 0, 1, 0};
    observed_data d = realize(studentized_population(), w);
    for (int i = 1; i <= 8; ++i) d.unit_ids.push_back(std::to_string(i));
    return d;
}

design studentized_design() { return design::completely_randomized(8, 4); }

population discrete_population() {
    population pop;
    for (int i = 0; i < 6; ++i) pop.y0.push_back(0.0);
    for (int i = 0; i < 6; ++i) pop.y0.push_back(1.0);
    for (int i = 0; i < 3; ++i) pop.y0.push_back(2.0);
    pop.y1 = pop.y0;
    pop.theta = 0.0;
    return pop;
}

}  // namespace fixtures

}  // namespace frtcd
