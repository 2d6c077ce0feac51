// frtcd: randomization tests, p-value functions, interval inversion and
// combination of experiments from the command line.

#include "frtcd/combine.hpp"
#include "frtcd/design.hpp"
#include "frtcd/error.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/io.hpp"
#include "frtcd/mc_planner.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/rng.hpp"
#include "frtcd/simulation.hpp"
#include "frtcd/statistics.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

using namespace frtcd;
using nlohmann::json;

namespace {

struct globals {
    std::uint64_t seed = 20240611;
    std::string mode = "auto";
    double epsilon = 0.01;
    double delta = 0.01;
    std::uint64_t k = 0;  // 0: derive from epsilon and delta
    std::uint64_t cap = default_enumeration_cap;
    bool json = false;
};

std::uint64_t draws_for(const globals& g) { return g.k ? g.k : required_k(g.epsilon, g.delta); }

// exact: enumerate (up to --cap). mc: K seeded draws. auto: enumerate when the
// design has no more assignments than K, otherwise sample K.
run_mode resolve_mode(const globals& g, const design& d, std::uint64_t seed) {
    if (g.mode == "exact") return run_mode::exact(g.cap);
    const std::uint64_t k = draws_for(g);
    if (g.mode == "mc") return run_mode::monte_carlo(k, seed);
    const big_count total = total_assignments(d);
    if (total <= k && total <= g.cap) return run_mode::exact(g.cap);
    return run_mode::monte_carlo(k, seed);
}

void add_mode_fields(json& j, const run_mode& mode, const assignment_set& a, const globals& g) {
    j["mode"] = mode.label();
    if (mode.is_exact()) {
        j["total"] = a.size();
    } else {
        j["k"] = mode.k;
        j["seed"] = g.seed;
    }
}

std::string mode_text(const run_mode& mode, const assignment_set& a, const globals& g) {
    if (mode.is_exact()) return "exact (" + std::to_string(a.size()) + " assignments)";
    return "mc (K = " + std::to_string(mode.k) + ", seed = " + std::to_string(g.seed) + ")";
}

const statistic& lookup_statistic(const std::string& name) { return statistic_registry::builtins().get(name); }

struct loaded_experiment {
    std::string path;
    experiment_file file;
    design des;
};

loaded_experiment load(const std::string& path, const std::optional<std::string>& declared) {
    experiment_file f = read_experiment_csv(path);
    design d = resolve_design(f, declared);
    return {path, std::move(f), std::move(d)};
}

std::optional<std::string> opt_string(const std::string& s) {
    if (s.empty()) return std::nullopt;
    return s;
}

void print_json(const json& j) { std::cout << j.dump(2) << "\n"; }

std::string fixed(double x, int digits = 3) {
    if (std::isinf(x)) return format_number(x);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, x);
    return buf;
}

void print_rows(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (width.size() <= c) width.push_back(0);
            width[c] = std::max(width[c], r[c].size());
        }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            line += r[c];
            if (c + 1 < r.size()) line += std::string(width[c] - r[c].size() + 2, ' ');
        }
        std::cout << line << "\n";
    }
}

std::string bracket(const confidence_interval& ci) {
    return "[" + format_number(ci.lower) + ", " + format_number(ci.upper) + ")";
}

json interval_json(const confidence_interval& ci, const std::string& stat) {
    json j = to_json(ci);
    j["statistic"] = stat;
    return j;
}

struct group_means {
    std::size_t n = 0, n0 = 0, n1 = 0;
    double mean1 = 0.0, mean0 = 0.0;
};

group_means summarize(const std::vector<const observed_data*>& parts) {
    group_means g;
    double s1 = 0.0, s0 = 0.0;
    for (const auto* d : parts)
        for (std::size_t i = 0; i < d->n_units(); ++i) {
            if (d->w_obs[i]) {
                s1 += d->y_obs[i];
                ++g.n1;
            } else {
                s0 += d->y_obs[i];
                ++g.n0;
            }
        }
    g.n = g.n0 + g.n1;
    g.mean1 = g.n1 ? s1 / static_cast<double>(g.n1) : 0.0;
    g.mean0 = g.n0 ? s0 / static_cast<double>(g.n0) : 0.0;
    return g;
}

void add_means(json& j, const group_means& m) {
    j["N"] = m.n;
    j["N0"] = m.n0;
    j["N1"] = m.n1;
    j["mean_treated"] = json_number(m.mean1);
    j["mean_control"] = json_number(m.mean0);
    j["tau_hat"] = json_number(m.mean1 - m.mean0);
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    if (n < 2) throw input_error("--range needs at least 2 points");
    if (!(lo < hi)) throw input_error("--range needs lo < hi");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i)
        out[i] = i + 1 == n ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return out;
}

// ---- test ----

struct test_args {
    std::string file, design, stat = "diff_means";
    double theta = 0.0;
};

int cmd_test(const globals& g, const test_args& a) {
    const auto ex = load(a.file, opt_string(a.design));
    const statistic& stat = lookup_statistic(a.stat);
    const run_mode mode = resolve_mode(g, ex.des, derive_seed(g.seed, 0));
    const assignment_set as = draw_assignments(ex.des, mode);
    const auto dist = compute_distribution(ex.file.data, as, stat, a.theta);
    const pvalue_kind kinds[] = {pvalue_kind::l_plus, pvalue_kind::u_plus, pvalue_kind::l_minus, pvalue_kind::u_minus,
                                 pvalue_kind::two_sided_l};
    if (g.json) {
        json j{{"file", a.file},
               {"design", ex.des.describe()},
               {"statistic", stat.name},
               {"theta", json_number(a.theta)},
               {"T_obs", json_number(dist.t_obs)}};
        for (auto k : kinds) j["p_" + to_string(k)] = json_number(dist.tails.p(k));
        add_mode_fields(j, mode, as, g);
        print_json(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows{{"design", ex.des.describe()},
                                               {"statistic", stat.name},
                                               {"mode", mode_text(mode, as, g)},
                                               {"theta", format_number(a.theta)},
                                               {"T_obs", format_number(dist.t_obs)}};
    for (auto k : kinds) rows.push_back({"p_" + to_string(k), format_number(dist.tails.p(k))});
    print_rows(rows);
    return 0;
}

// ---- pcurve ----

struct pcurve_args {
    std::string file, design, stat = "diff_means", side = "Lplus";
    std::vector<double> grid;
    std::vector<double> range;
    bool exact = false;
};

int cmd_pcurve(const globals& g, const pcurve_args& a) {
    const auto ex = load(a.file, opt_string(a.design));
    const statistic& stat = lookup_statistic(a.stat);
    const run_mode mode = resolve_mode(g, ex.des, derive_seed(g.seed, 0));
    const assignment_set as = draw_assignments(ex.des, mode);
    const observed_data& data = ex.file.data;

    if (a.exact) {
        if (!a.grid.empty() || !a.range.empty()) throw input_error("--exact cannot be combined with --grid or --range");
        const auto f = build_step_function(data, as, stat, parse_curve_side(a.side));
        if (g.json) {
            json j = to_json(f);
            j["file"] = a.file;
            j["design"] = ex.des.describe();
            j["statistic"] = stat.name;
            j["T_obs"] = json_number(observed_statistic(stat, data));
            add_mode_fields(j, mode, as, g);
            print_json(j);
            return 0;
        }
        std::cout << "start,end,p\n";
        for (std::size_t s = 0; s < f.n_segments(); ++s) {
            const double end = s + 1 < f.n_segments() ? f.segment_start(s + 1) : INFINITY;
            std::cout << format_number(f.segment_start(s)) << "," << format_number(end) << ","
                      << format_number(f.segment_value(s)) << "\n";
        }
        return 0;
    }

    const pvalue_kind kind = parse_pvalue_kind(a.side);
    std::vector<double> grid = a.grid;
    if (!grid.empty() && !a.range.empty()) throw input_error("give either --grid or --range, not both");
    if (grid.empty()) {
        if (!a.range.empty()) {
            if (a.range.size() != 3 || a.range[2] < 2 || a.range[2] != std::floor(a.range[2]))
                throw input_error("--range expects lo,hi,n with an integer n >= 2");
            grid = linspace(a.range[0], a.range[1], static_cast<std::size_t>(a.range[2]));
        } else {
            const double t = observed_statistic(statistic::diff_means(), data);
            const auto [mn, mx] = std::minmax_element(data.y_obs.begin(), data.y_obs.end());
            const double half = std::max(2.0 * (*mx - *mn), 1.0);
            grid = linspace(t - half, t + half, 401);
        }
    }
    for (double th : grid)
        if (!std::isfinite(th)) throw input_error("grid points must be finite");

    std::vector<double> p(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) p[i] = p_value(data, as, stat, grid[i], kind);

    if (g.json) {
        json pts = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back({{"theta", json_number(grid[i])}, {"p", json_number(p[i])}});
        json j{{"file", a.file},
               {"design", ex.des.describe()},
               {"statistic", stat.name},
               {"side", to_string(kind)},
               {"T_obs", json_number(observed_statistic(stat, data))},
               {"points", pts}};
        add_mode_fields(j, mode, as, g);
        print_json(j);
        return 0;
    }
    std::cout << "theta,p\n";
    for (std::size_t i = 0; i < grid.size(); ++i) std::cout << format_number(grid[i]) << "," << format_number(p[i]) << "\n";
    return 0;
}

// ---- invert ----

struct invert_args {
    std::string file, design, stat = "diff_means";
    double alpha1 = 0.025, alpha2 = 0.025;
    bool traditional = false;
    std::vector<double> grid;
};

int cmd_invert(const globals& g, const invert_args& a) {
    const auto ex = load(a.file, opt_string(a.design));
    const statistic& stat = lookup_statistic(a.stat);
    const run_mode mode = resolve_mode(g, ex.des, derive_seed(g.seed, 0));
    const assignment_set as = draw_assignments(ex.des, mode);
    const auto set = build_step_functions(ex.file.data, as, stat);
    const auto ci = proposed_interval(set.l_plus, set.l_minus, a.alpha1, a.alpha2);
    if (!a.grid.empty() && !a.traditional) throw input_error("--grid only applies with --traditional");

    std::optional<confidence_interval> trad;
    if (a.traditional) {
        const double alpha = a.alpha1 + a.alpha2;
        trad = a.grid.empty() ? traditional_interval(set.l_plus, alpha)
                              : traditional_interval_on_grid(set.l_plus, alpha, a.grid);
    }
    if (g.json) {
        json j = interval_json(ci, stat.name);
        j["file"] = a.file;
        j["design"] = ex.des.describe();
        j["T_obs"] = json_number(set.t_obs);
        add_mode_fields(j, mode, as, g);
        if (trad) {
            json t = interval_json(*trad, stat.name);
            if (!a.grid.empty()) {
                t["grid"] = json::array();
                for (double th : a.grid) t["grid"].push_back(json_number(th));
            }
            j["traditional"] = t;
        }
        print_json(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows{{"design", ex.des.describe()},
                                               {"statistic", stat.name},
                                               {"mode", mode_text(mode, as, g)},
                                               {"T_obs", format_number(set.t_obs)},
                                               {"alpha1", format_number(a.alpha1)},
                                               {"alpha2", format_number(a.alpha2)},
                                               {"proposed", bracket(ci)}};
    if (trad) rows.push_back({a.grid.empty() ? "traditional" : "traditional (grid)", bracket(*trad)});
    print_rows(rows);
    return 0;
}

// ---- combine ----

struct combine_args {
    std::vector<std::string> files;
    std::vector<std::string> designs;
    std::string stat = "diff_means";
    std::vector<std::string> combiners{"fisher", "stouffer", "de"};
    std::vector<double> weights;
    double alpha = 0.05;
};

int cmd_combine(const globals& g, const combine_args& a) {
    if (!a.designs.empty() && a.designs.size() != a.files.size())
        throw input_error("give one --design per file or none");
    const statistic& stat = lookup_statistic(a.stat);
    std::vector<loaded_experiment> exps;
    std::vector<step_function_set> sets;
    std::vector<run_mode> modes;
    std::vector<std::uint64_t> sizes;
    for (std::size_t i = 0; i < a.files.size(); ++i) {
        exps.push_back(load(a.files[i], a.designs.empty() ? std::nullopt : opt_string(a.designs[i])));
        modes.push_back(resolve_mode(g, exps.back().des, derive_seed(g.seed, i)));
        const assignment_set as = draw_assignments(exps.back().des, modes.back());
        sizes.push_back(as.size());
        sets.push_back(build_step_functions(exps.back().file.data, as, stat));
    }
    std::vector<combined_result> results;
    for (const auto& name : a.combiners) results.push_back(combine_step_functions(sets, combiner_spec::by_name(name, a.weights), a.alpha));

    std::vector<const observed_data*> all;
    for (const auto& e : exps) all.push_back(&e.file.data);

    if (g.json) {
        json experiments = json::array();
        for (std::size_t i = 0; i < exps.size(); ++i) {
            json e{{"file", exps[i].path}, {"design", exps[i].des.describe()}, {"T_obs", json_number(sets[i].t_obs)}};
            add_means(e, summarize({&exps[i].file.data}));
            e["mode"] = modes[i].label();
            if (modes[i].is_exact())
                e["total"] = sizes[i];
            else
                e["k"] = modes[i].k, e["seed"] = derive_seed(g.seed, i);
            e["interval"] = interval_json(results.front().individual[i], stat.name);
            experiments.push_back(e);
        }
        json combined = json::array();
        for (const auto& r : results) {
            json c = interval_json(r.combined, stat.name);
            c["combiner"] = r.spec.name();
            if (!a.weights.empty()) c["weights"] = a.weights;
            combined.push_back(c);
        }
        json pooled;
        add_means(pooled, summarize(all));
        print_json({{"statistic", stat.name},
                    {"alpha", json_number(a.alpha)},
                    {"seed", g.seed},
                    {"experiments", experiments},
                    {"pooled", pooled},
                    {"combined", combined}});
        return 0;
    }
    const int pct = static_cast<int>(std::lround(100 * (1 - a.alpha)));
    std::vector<std::vector<std::string>> rows{
        {"experiment", "N", "N0", "N1", "mean(1)", "mean(0)", "tau_hat", std::to_string(pct) + "% CI", "method"}};
    auto means_cells = [](const group_means& m) {
        return std::vector<std::string>{std::to_string(m.n), std::to_string(m.n0), std::to_string(m.n1),
                                        fixed(m.mean1), fixed(m.mean0), fixed(m.mean1 - m.mean0)};
    };
    for (std::size_t i = 0; i < exps.size(); ++i) {
        std::vector<std::string> r{std::to_string(i + 1)};
        for (auto& c : means_cells(summarize({&exps[i].file.data}))) r.push_back(c);
        r.push_back(bracket(results.front().individual[i]));
        r.push_back(modes[i].label());
        rows.push_back(r);
    }
    const auto pooled = means_cells(summarize(all));
    for (std::size_t k = 0; k < results.size(); ++k) {
        std::vector<std::string> r{k == 0 ? "combined" : ""};
        for (const auto& c : pooled) r.push_back(k == 0 ? c : "");
        r.push_back(bracket(results[k].combined));
        r.push_back(results[k].spec.name());
        rows.push_back(r);
    }
    print_rows(rows);
    return 0;
}

// ---- mc-threshold ----

struct threshold_args {
    std::vector<double> epsilons;
    std::string design;
};

int cmd_threshold(const globals& g, const threshold_args& a) {
    const std::vector<double> eps = a.epsilons.empty() ? default_epsilons() : a.epsilons;
    std::optional<design> d;
    if (!a.design.empty()) d = parse_design(a.design);
    if (g.json) {
        json rows = json::array();
        for (double e : eps) {
            json r{{"epsilon", json_number(e)}, {"K", required_k(e, g.delta)}};
            if (d) {
                const auto p = plan(*d, e, g.delta);
                r["strategy"] = p.how == mc_plan::strategy::enumerate ? "enumerate" : "sample";
                r["draws"] = p.draws();
            }
            rows.push_back(r);
        }
        json j{{"delta", json_number(g.delta)}, {"rows", rows}};
        if (d) {
            j["design"] = d->describe();
            j["total_assignments"] = total_assignments(*d).str();
        }
        print_json(j);
        return 0;
    }
    std::vector<std::vector<std::string>> rows{{"epsilon", "K"}};
    if (d) rows[0].push_back("plan for " + d->describe());
    for (double e : eps) {
        rows.push_back({format_number(e), std::to_string(required_k(e, g.delta))});
        if (d) rows.back().push_back(plan(*d, e, g.delta).describe());
    }
    std::cout << "delta = " << format_number(g.delta) << "\n";
    print_rows(rows);
    return 0;
}

// ---- simulate ----

struct simulate_args {
    std::string config;
    std::size_t reps = 0;
    std::uint64_t k_cap = 0;
    bool full = false;
};

int cmd_simulate(const globals& g, const simulate_args& a, bool seed_given) {
    scenario_config cfg = read_scenario(a.config);
    if (a.full) {
        cfg.reps = 1500;
        cfg.k_cap = 10000;
    }
    if (a.reps) cfg.reps = a.reps;
    if (a.k_cap) cfg.k_cap = a.k_cap;
    if (seed_given) cfg.master_seed = g.seed;
    const auto r = run_scenario(cfg);
    if (g.json) {
        print_json({{"config", to_json(cfg)}, {"result", to_json(r)}});
        return 0;
    }
    std::cout << "scenario " << cfg.name << ": " << cfg.design1.describe() << " (" << r.mode1 << ") + "
              << cfg.design2.describe() << " (" << r.mode2 << "), theta = " << format_number(cfg.true_theta)
              << ", alpha = " << format_number(cfg.alpha) << ", reps = " << cfg.reps << ", k_cap = " << cfg.k_cap
              << ", seed = " << cfg.master_seed << "\n";
    std::vector<std::vector<std::string>> rows{{"arm", "coverage", "width_mean", "width_sd", "unbounded"}};
    for (const auto& arm : r.arms)
        rows.push_back({arm.name, fixed(arm.coverage), fixed(arm.width_mean), fixed(arm.width_sd),
                        std::to_string(arm.unbounded)});
    print_rows(rows);
    return 0;
}

// ---- audit ----

struct audit_args {
    std::string population = "toy";
    std::string design;
    std::string stat = "diff_means";
    std::vector<double> alphas{0.05};
};

int cmd_audit(const globals& g, const audit_args& a) {
    population pop;
    design d = fixtures::toy_design();
    if (a.population == "toy") {
        pop = fixtures::toy_population();
    } else if (a.population == "example2") {
        pop = fixtures::studentized_population();
        d = fixtures::studentized_design();
    } else if (a.population == "discrete") {
        pop = fixtures::discrete_population();
        d = design::completely_randomized(15, 7);
    } else {
        throw input_error("unknown population '" + a.population + "' (toy, example2, discrete)");
    }
    if (!a.design.empty()) d = parse_design(a.design);
    const statistic& stat = lookup_statistic(a.stat);
    const auto report = exact_validity_audit(pop, d, stat, a.alphas, g.cap);
    if (g.json) {
        json j = to_json(report);
        j["population"] = a.population;
        j["design"] = d.describe();
        j["statistic"] = stat.name;
        print_json(j);
        return 0;
    }
    std::cout << "population " << a.population << ", " << d.describe() << ", " << stat.name << ", theta0 = "
              << format_number(report.theta0) << ", " << report.dominance.total << " assignments\n";
    std::cout << "gamma* = " << format_number(report.dominance.gamma_star) << " ("
              << report.dominance.gamma_star_count << "/" << report.dominance.total << ")\n";
    std::vector<std::vector<std::string>> laws{{"p-value", "dominance", "max discrepancy"}};
    for (const auto& law : report.dominance.laws)
        laws.push_back({to_string(law.kind), law.dominance_holds() ? "holds" : "FAILS", format_number(law.max_discrepancy())});
    print_rows(laws);
    std::cout << "discrepancy within gamma*: " << (report.gamma_bound_ok ? "yes" : "no") << "\n";
    std::vector<std::vector<std::string>> rows{{"alpha", "proposed", "traditional", "proposed >= 1 - alpha"}};
    for (const auto& row : report.rows)
        rows.push_back({format_number(row.alpha),
                        std::to_string(row.proposed_covered) + "/" + std::to_string(row.total) + " = " +
                            fixed(row.proposed_coverage),
                        std::to_string(row.traditional_covered) + "/" + std::to_string(row.total) + " = " +
                            fixed(row.traditional_coverage),
                        row.proposed_valid ? "yes" : "NO"});
    print_rows(rows);
    return 0;
}

// ---- toy ----

int cmd_toy(const globals& g) {
    const population pop = fixtures::toy_population();
    const observed_data data = fixtures::toy_data();
    const design d = fixtures::toy_design();
    const statistic stat = statistic::diff_means();
    const assignment_set as = enumerate_assignments(d);
    const auto set = build_step_functions(data, as, stat);
    const std::vector<double> grid{-3, -1, 0, 1, 3};
    std::vector<double> p;
    for (double th : grid) p.push_back(p_value(data, as, stat, th, pvalue_kind::l_plus));
    const auto ci = proposed_interval(set.l_plus, set.l_minus, 0.025, 0.025);
    const auto trad_grid = traditional_interval_on_grid(set.l_plus, 0.05, grid);
    const auto trad = traditional_interval(set.l_plus, 0.05);

    if (g.json) {
        json units = json::array();
        for (std::size_t i = 0; i < pop.size(); ++i)
            units.push_back({{"unit", data.unit_ids[i]},
                             {"y0", json_number(pop.y0[i])},
                             {"y1", json_number(pop.y1[i])},
                             {"w", data.w_obs[i]},
                             {"y_obs", json_number(data.y_obs[i])}});
        json pts = json::array();
        for (std::size_t i = 0; i < grid.size(); ++i) pts.push_back({{"theta", json_number(grid[i])}, {"p_Lplus", json_number(p[i])}});
        print_json({{"design", d.describe()},
                    {"statistic", stat.name},
                    {"total", as.size()},
                    {"units", units},
                    {"T_obs", json_number(set.t_obs)},
                    {"pvalues", pts},
                    {"proposed", interval_json(ci, stat.name)},
                    {"traditional_grid", interval_json(trad_grid, stat.name)},
                    {"traditional", interval_json(trad, stat.name)}});
        return 0;
    }
    std::cout << "Toy example: " << d.describe() << ", " << as.size() << " assignments, statistic " << stat.name << "\n\n";
    std::vector<std::vector<std::string>> rows{{"unit", "Y(0)", "Y(1)", "W", "Y_obs"}};
    for (std::size_t i = 0; i < pop.size(); ++i)
        rows.push_back({data.unit_ids[i], fixed(pop.y0[i], 2), fixed(pop.y1[i], 2), std::to_string(data.w_obs[i]),
                        fixed(data.y_obs[i], 2)});
    print_rows(rows);
    std::cout << "\nT_obs = " << format_number(set.t_obs) << "\n\n";
    std::vector<std::vector<std::string>> prow{{"theta", "p_Lplus"}};
    for (std::size_t i = 0; i < grid.size(); ++i) prow.push_back({format_number(grid[i]), fixed(p[i])});
    print_rows(prow);
    std::cout << "\nproposed 95% interval (alpha1 = alpha2 = 0.025): " << bracket(ci) << "\n"
              << "traditional 95% interval on the grid above: [" << format_number(trad_grid.lower) << ", "
              << format_number(trad_grid.upper) << "]\n"
              << "traditional 95% interval on exact breakpoints: " << bracket(trad) << "\n";
    return 0;
}

// ---- data ----

int cmd_data(const std::string& which) {
    experiment_file f;
    if (which == "toy") {
        f.data = fixtures::toy_data();
        f.inferred = fixtures::toy_design();
    } else if (which == "example2") {
        f.data = fixtures::studentized_data();
        f.inferred = fixtures::studentized_design();
    } else {
        throw input_error("unknown dataset '" + which + "' (toy, example2)");
    }
    write_experiment_csv(std::cout, f);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Fisher randomization tests as confidence distributions"};
    app.require_subcommand(1);
    app.fallthrough();

    globals g;
    auto* seed_opt = app.add_option("--seed", g.seed, "Seed for Monte Carlo draws")->capture_default_str();
    app.add_option("--mode", g.mode, "exact, mc, or auto (enumerate when the design has at most K assignments)")
        ->check(CLI::IsMember({"exact", "mc", "auto"}))
        ->capture_default_str();
    app.add_option("--epsilon", g.epsilon, "Target sup error of a Monte Carlo p-value function")->capture_default_str();
    app.add_option("--delta", g.delta, "Allowed probability of exceeding epsilon")->capture_default_str();
    app.add_option("--k", g.k, "Monte Carlo draws (overrides epsilon/delta)");
    app.add_option("--cap", g.cap, "Largest assignment count to enumerate")->capture_default_str();
    app.add_flag("--json", g.json, "Machine-readable output");

    test_args ta;
    auto* test = app.add_subcommand("test", "All five p-values at one theta");
    test->add_option("file", ta.file, "Experiment CSV")->required();
    test->add_option("--design", ta.design, "CRD(N,N1), RBD[(k,t),...] or blocks(b,k); inferred when omitted");
    test->add_option("--stat", ta.stat, "diff_means, studentized or wilcoxon_rank_sum")->capture_default_str();
    test->add_option("--theta", ta.theta, "Sharp null effect")->capture_default_str();

    pcurve_args pa;
    auto* pcurve = app.add_subcommand("pcurve", "Dump a p-value function of theta");
    pcurve->add_option("file", pa.file, "Experiment CSV")->required();
    pcurve->add_option("--design", pa.design, "Design string");
    pcurve->add_option("--stat", pa.stat, "Statistic")->capture_default_str();
    pcurve->add_option("--side", pa.side, "Lplus, Uplus, Lminus, Uminus (or two_sided on a grid)")->capture_default_str();
    pcurve->add_option("--grid", pa.grid, "Comma-separated theta values")->delimiter(',');
    pcurve->add_option("--range", pa.range, "lo,hi,n evenly spaced points")->delimiter(',');
    pcurve->add_flag("--exact", pa.exact, "Exact breakpoints and segment values");

    invert_args ia;
    auto* invert = app.add_subcommand("invert", "Confidence interval by inverting the p-value functions");
    invert->add_option("file", ia.file, "Experiment CSV")->required();
    invert->add_option("--design", ia.design, "Design string");
    invert->add_option("--stat", ia.stat, "Statistic")->capture_default_str();
    invert->add_option("--alpha1", ia.alpha1, "Lower tail level")->capture_default_str();
    invert->add_option("--alpha2", ia.alpha2, "Upper tail level")->capture_default_str();
    invert->add_flag("--traditional", ia.traditional, "Also report the traditional interval");
    invert->add_option("--grid", ia.grid, "Theta grid for the traditional interval")->delimiter(',');

    combine_args ca;
    auto* combine = app.add_subcommand("combine", "Combine independent experiments");
    combine->add_option("files", ca.files, "Experiment CSVs")->required();
    combine->add_option("--design", ca.designs, "One design per file, in order");
    combine->add_option("--stat", ca.stat, "Statistic")->capture_default_str();
    combine->add_option("--combiner", ca.combiners, "fisher, stouffer, de")->delimiter(',')->capture_default_str();
    combine->add_option("--weights", ca.weights, "One weight per experiment")->delimiter(',');
    combine->add_option("--alpha", ca.alpha, "Total level, split equally between tails")->capture_default_str();

    threshold_args tha;
    auto* threshold = app.add_subcommand("mc-threshold", "Monte Carlo sample size for a sup-error target");
    threshold->add_option("--epsilons", tha.epsilons, "Comma-separated epsilon list")->delimiter(',');
    threshold->add_option("--design", tha.design, "Also show the enumerate/sample plan for this design");

    simulate_args sa;
    auto* simulate = app.add_subcommand("simulate", "Run a coverage and width simulation scenario");
    simulate->add_option("config", sa.config, "Scenario JSON")->required();
    simulate->add_option("--reps", sa.reps, "Override the number of reps");
    simulate->add_option("--k-cap", sa.k_cap, "Override the enumeration cap per experiment");
    simulate->add_flag("--full", sa.full, "1500 reps and k_cap 10000");

    audit_args aa;
    auto* audit = app.add_subcommand("audit", "Exact validity audit on a bundled population");
    audit->add_option("--population", aa.population, "toy, example2 or discrete")->capture_default_str();
    audit->add_option("--design", aa.design, "Override the population's design");
    audit->add_option("--stat", aa.stat, "Statistic")->capture_default_str();
    audit->add_option("--alpha", aa.alphas, "Comma-separated levels")->delimiter(',');

    auto* toy = app.add_subcommand("toy", "Worked toy example end to end");

    std::string dataset;
    auto* data = app.add_subcommand("data", "Write a bundled dataset as experiment CSV");
    data->add_option("name", dataset, "toy or example2")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (g.epsilon <= 0 || g.epsilon > 1) throw input_error("--epsilon must be in (0, 1]");
        if (g.delta <= 0 || g.delta >= 1) throw input_error("--delta must be in (0, 1)");
        if (*test) return cmd_test(g, ta);
        if (*pcurve) return cmd_pcurve(g, pa);
        if (*invert) return cmd_invert(g, ia);
        if (*combine) return cmd_combine(g, ca);
        if (*threshold) return cmd_threshold(g, tha);
        if (*simulate) return cmd_simulate(g, sa, seed_opt->count() > 0);
        if (*audit) return cmd_audit(g, aa);
        if (*toy) return cmd_toy(g);
        if (*data) return cmd_data(dataset);
    } catch (const frtcd::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
