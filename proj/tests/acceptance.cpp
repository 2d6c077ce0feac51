// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.

#include "frtcd/combine.hpp"
#include "frtcd/design.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/mc_planner.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/rng.hpp"
#include "frtcd/simulation.hpp"
#include "frtcd/special_functions.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

using namespace frtcd;

namespace {

struct outcome {
    bool pass = false;
    std::string detail;
};

double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

std::string fmt(double x, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

// 1. Toy p-values and T_obs.
outcome toy_golden() {
    const observed_data toy = fixtures::toy_data();
    const auto all = enumerate_assignments(fixtures::toy_design());
    const std::vector<double> thetas{-3, -1, 0, 1, 3}, expect{0.004, 0.012, 0.131, 0.560, 0.988};
    outcome o{all.size() == 252, ""};
    std::ostringstream s;
    s << "p =";
    for (std::size_t i = 0; i < thetas.size(); ++i) {
        const double p = p_value(toy, all, statistic::diff_means(), thetas[i], pvalue_kind::l_plus);
        o.pass = o.pass && round3(p) == expect[i];
        s << " " << fmt(p, 3);
    }
    const double t = observed_statistic(statistic::diff_means(), toy);
    o.pass = o.pass && round3(t) == 0.912;
    s << ", T_obs = " << fmt(t, 3);
    o.detail = s.str();
    return o;
}

// 2. Threshold table.
outcome threshold_table() {
    const std::vector<std::uint64_t> expect{4794, 19173, 119830, 479318, 1917269, 11982930, 47931717};
    outcome o{true, ""};
    std::ostringstream s;
    for (std::size_t i = 0; i < expect.size(); ++i) {
        const auto k = required_k(default_epsilons()[i], 0.01);
        o.pass = o.pass && k == expect[i];
        s << (i ? " " : "K = ") << k;
    }
    o.detail = s.str();
    return o;
}

// 3. Exact coverage of proposed intervals on seeded populations.
outcome guaranteed_coverage() {
    const design d = design::completely_randomized(12, 6);
    outcome o{true, ""};
    double worst[2] = {1.0, 1.0};
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const population pop = generate_population(12, 1.0, derive_seed(0xacce5, seed));
        const auto r = exact_validity_audit(pop, d, statistic::diff_means(), {0.10, 0.05});
        for (std::size_t a = 0; a < 2; ++a) {
            o.pass = o.pass && r.rows[a].proposed_covered * 1.0 >= (1.0 - r.rows[a].alpha) * r.rows[a].total;
            worst[a] = std::min(worst[a], r.rows[a].proposed_coverage);
        }
    }
    o.detail = "min coverage " + fmt(worst[0]) + " at alpha 0.10, " + fmt(worst[1]) + " at alpha 0.05";
    return o;
}

// 4. Proposed vs traditional coverage on the discrete population.
outcome discrete_gap() {
    const auto r = exact_validity_audit(fixtures::discrete_population(), design::completely_randomized(15, 7),
                                        statistic::diff_means(), {0.05});
    const auto& row = r.rows[0];
    outcome o;
    o.pass = row.proposed_coverage >= 0.95 && row.traditional_coverage < row.proposed_coverage &&
             round3(row.proposed_coverage) == 0.961 && round3(row.traditional_coverage) == 0.897;
    o.detail = "CRD(15,7): proposed " + fmt(row.proposed_coverage) + ", traditional " + fmt(row.traditional_coverage) +
               " over " + std::to_string(row.total) + " assignments";
    return o;
}

// 5. Stochastic dominance on the toy population.
outcome dominance() {
    const auto prof = compute_dominance_profile(fixtures::toy_data(), fixtures::toy_design(), statistic::diff_means(),
                                                fixtures::toy_population().theta);
    outcome o{true, ""};
    for (const auto& law : prof.laws) o.pass = o.pass && law.dominance_holds();
    const double g = 2.0 / 252;
    const double dl = prof.law(pvalue_kind::l_plus).max_discrepancy();
    const double dm = prof.law(pvalue_kind::l_minus).max_discrepancy();
    o.pass = o.pass && std::abs(prof.gamma_star - g) < 1e-15 && dl <= prof.gamma_star && dm <= prof.gamma_star;
    o.detail = "gamma* = " + std::to_string(prof.gamma_star_count) + "/" + std::to_string(prof.total) +
               ", max discrepancy L+ " + fmt(dl * 252, 2) + "/252, L- " + fmt(dm * 252, 2) + "/252";
    return o;
}

// 6. Monotone p-value functions for diff_means, a decrease for the studentized statistic.
outcome monotonicity() {
    const design d = design::completely_randomized(10, 5);
    const auto all = enumerate_assignments(d);
    std::size_t violations = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const population pop = generate_population(10, 1.0, derive_seed(0x6d6f6e6f, seed));
        std::vector<std::uint8_t> w(10);
        sample_assignment(d, seed, 0, w);
        const observed_data data = realize(pop, w);
        double prev = -1.0;
        for (int i = 0; i <= 2000; ++i) {
            const double theta = -10.0 + 20.0 * i / 2000.0;
            const double p = p_value(data, all, statistic::diff_means(), theta, pvalue_kind::l_plus);
            violations += p < prev;
            prev = p;
        }
    }
    const observed_data ex = fixtures::studentized_data();
    const auto ex_all = enumerate_assignments(fixtures::studentized_design());
    std::size_t decreases = 0;
    double prev = -1.0;
    for (int i = 0; i <= 2000; ++i) {
        const double theta = -10.0 + 20.0 * i / 2000.0;
        const double p = p_value(ex, ex_all, statistic::studentized(), theta, pvalue_kind::l_plus);
        decreases += p < prev;
        prev = p;
    }
    outcome o{violations == 0 && decreases > 0, ""};
    o.detail = "diff_means violations " + std::to_string(violations) + " on 50 datasets; studentized decreases " +
               std::to_string(decreases);
    return o;
}

// 7. Coverage and width on two desk-scale scenarios.
outcome table2_slice() {
    outcome o{true, ""};
    std::ostringstream s;
    for (auto [name, d] : {std::pair{"(1,16)x(1,16)", design::balanced_blocks(1, 16)},
                           std::pair{"(2,8)x(2,8)", design::balanced_blocks(2, 8)}}) {
        scenario_config cfg;
        cfg.name = name;
        cfg.design1 = cfg.design2 = d;
        cfg.reps = 500;
        cfg.k_cap = 5000;
        cfg.combiners = {"fisher", "de"};
        const auto r = run_scenario(cfg);
        s << name << " [" << r.mode1 << "]:";
        for (const auto& a : r.arms) {
            o.pass = o.pass && std::abs(a.coverage - 0.95) <= 0.02 && a.unbounded == 0;
            s << " " << a.name << " " << fmt(a.coverage, 3) << "/" << fmt(a.width_mean, 2);
        }
        for (const char* c : {"fisher", "double_exponential"})
            o.pass = o.pass && r.arm(c).width_mean < r.arm("exp1").width_mean &&
                     r.arm(c).width_mean < r.arm("exp2").width_mean;
        s << "; ";
    }
    o.detail = s.str();
    return o;
}

// 8. Sup-norm Monte Carlo error at the planned K.
outcome concentration() {
    const observed_data toy = fixtures::toy_data();
    const design d = fixtures::toy_design();
    const auto exact = build_step_function(toy, d, statistic::diff_means(), curve_side::l_plus, run_mode::exact());
    const auto k = required_k(0.1, 0.01);
    std::size_t exceed = 0;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const auto mc = build_step_function(toy, d, statistic::diff_means(), curve_side::l_plus,
                                            run_mode::monte_carlo(k, derive_seed(0xc0ffee, seed)));
        const double dist = sup_distance(exact, mc);
        worst = std::max(worst, dist);
        exceed += dist > 0.1;
    }
    return {exceed <= 1, "K = " + std::to_string(k) + ", exceedances " + std::to_string(exceed) +
                             "/100, largest sup error " + fmt(worst)};
}

// 9. Combiner numerics.
outcome combiner_numerics() {
    const std::vector<double> fp{0.1, 0.2}, sp{0.5, 0.5};
    const double f = combine_values(fp, combiner_spec::fisher());
    const double st = combine_values(sp, combiner_spec::stouffer());
    outcome o{std::abs(f - 0.098241) <= 1e-5 && st == 0.5, ""};
    const std::size_t draws = 1'000'000;
    double worst = 0.0;
    for (std::size_t m : {2u, 3u, 5u}) {
        std::vector<double> sample(draws);
        for (std::size_t j = 0; j < draws; ++j) {
            counter_rng rng(0x1a91ace + m, j);
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                const double u = rng.uniform01();
                s += u <= 0.5 ? std::log(2 * u) : -std::log(2 * (1 - u));
            }
            sample[j] = s;
        }
        std::sort(sample.begin(), sample.end());
        for (double x = -8.0; x <= 8.0; x += 0.5) {
            const double emp =
                static_cast<double>(std::upper_bound(sample.begin(), sample.end(), x) - sample.begin()) / draws;
            worst = std::max(worst, std::abs(laplace_sum_cdf(m, x) - emp));
        }
    }
    o.pass = o.pass && worst <= 3e-3;
    o.detail = "fisher " + fmt(f, 6) + ", stouffer " + fmt(st, 6) + ", Laplace sum max error " + fmt(worst, 5);
    return o;
}

// 10. Exact law of the combined Lplus p-value over both assignment spaces.
outcome combined_validity() {
    const design d = design::completely_randomized(6, 3);
    const auto all = enumerate_assignments(d);
    const double theta0 = 1.0;
    const population a = generate_population(6, theta0, 0x5eed1), b = generate_population(6, theta0, 0x5eed2);
    std::vector<double> pa, pb;
    for (std::size_t j = 0; j < all.size(); ++j) {
        pa.push_back(p_value(realize(a, all[j]), all, statistic::diff_means(), theta0, pvalue_kind::l_plus));
        pb.push_back(p_value(realize(b, all[j]), all, statistic::diff_means(), theta0, pvalue_kind::l_plus));
    }
    outcome o{true, ""};
    std::ostringstream s;
    for (const char* name : {"fisher", "stouffer"}) {
        const auto spec = combiner_spec::by_name(name);
        std::map<double, std::size_t> law;
        for (double x : pa)
            for (double y : pb) {
                const std::vector<double> p{x, y};
                ++law[combine_values(p, spec)];
            }
        const double total = static_cast<double>(pa.size() * pb.size());
        std::size_t cum = 0;
        double worst = -1.0;
        for (const auto& [level, mass] : law) {
            cum += mass;
            // P(p_c <= level) <= level at every attained level; between levels the CDF is flat.
            const double excess = cum / total - level;
            worst = std::max(worst, excess);
            o.pass = o.pass && excess <= 0.0;
        }
        s << name << ": " << law.size() << " levels, max P(p<=a)-a = " << fmt(worst, 5) << "; ";
    }
    o.detail = s.str();
    return o;
}

}  // namespace

int main() {
    struct criterion {
        const char* name;
        double budget_s;
        std::function<outcome()> run;
    };
    const std::vector<criterion> criteria{
        {"toy example p-values", 1, toy_golden},
        {"threshold table", 0.001, threshold_table},
        {"guaranteed coverage", 30, guaranteed_coverage},
        {"traditional vs proposed gap", 60, discrete_gap},
        {"stochastic dominance", 10, dominance},
        {"monotonicity and counterexample", 60, monotonicity},
        {"desk-scale simulation slice", 900, table2_slice},
        {"Monte Carlo concentration", 300, concentration},
        {"combiner numerics", 120, combiner_numerics},
        {"exact combined validity", 30, combined_validity},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs <= criteria[i].budget_s;
        const bool ok = o.pass && in_time;
        failed += !ok;
        std::printf("%s %2zu %s: %s [%.3fs%s]\n", ok ? "PASS" : "FAIL", i + 1, criteria[i].name, o.detail.c_str(), secs,
                    in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
