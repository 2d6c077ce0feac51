#include "frtcd/statistics.hpp"

#include "frtcd/error.hpp"
#include "frtcd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frtcd {

observed_data::observed_data(assignment w, std::vector<double> y, std::vector<std::string> ids)
    : w_obs(std::move(w)), y_obs(std::move(y)), unit_ids(std::move(ids)) {
    if (w_obs.size() != y_obs.size())
        throw input_error("assignment and outcome vectors differ in length (" + std::to_string(w_obs.size()) +
                          " vs " + std::to_string(y_obs.size()) + ")");
    if (!unit_ids.empty() && unit_ids.size() != y_obs.size())
        throw input_error("unit id column has the wrong length");
    for (std::size_t i = 0; i < w_obs.size(); ++i) {
        if (w_obs[i] > 1) throw input_error("assignment entries must be 0 or 1");
        if (!std::isfinite(y_obs[i])) throw input_error("outcome of unit " + std::to_string(i) + " is not finite");
    }
}

double observed_data::outcome_scale() const noexcept {
    double s = 0.0;
    for (double y : y_obs) s = std::max(s, std::abs(y));
    return s > 0.0 ? s : 1.0;
}

void check_compatible(const observed_data& data, const design& d) {
    if (data.n_units() != d.n_units())
        throw input_error("data has " + std::to_string(data.n_units()) + " units but design " + d.describe() +
                          " has " + std::to_string(d.n_units()));
    if (!d.admits(data.w_obs))
        throw input_error("observed assignment is not a valid assignment of " + d.describe());
}

imputed_outcomes impute(const observed_data& data, double theta) {
    if (!std::isfinite(theta)) throw input_error("theta must be finite");
    imputed_outcomes out;
    out.theta = theta;
    const std::size_t n = data.n_units();
    out.y1.resize(n);
    out.y0.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = data.y_obs[i];
        if (data.w_obs[i]) {
            out.y1[i] = y;
            out.y0[i] = y - theta;
        } else {
            out.y1[i] = y + theta;
            out.y0[i] = y;
        }
    }
    return out;
}

statistic statistic::diff_means() {
    return {"diff_means", statistic_kind::diff_means, true, true, true, {}};
}

statistic statistic::studentized() {
    return {"studentized", statistic_kind::studentized, true, false, false, {}};
}

statistic statistic::wilcoxon_rank_sum() {
    return {"wilcoxon_rank_sum", statistic_kind::wilcoxon_rank_sum, true, true, true, {}};
}

statistic statistic::custom(std::string name, statistic_fn fn) {
    if (!fn) throw input_error("custom statistic '" + name + "' has no evaluator");
    return {std::move(name), statistic_kind::custom, true, false, false, std::move(fn)};
}

statistic_registry::statistic_registry() {
    add(statistic::diff_means());
    add(statistic::studentized());
    add(statistic::wilcoxon_rank_sum());
}

void statistic_registry::add(statistic s) {
    if (s.ei_certified && !s.theta_monotone_rightcontinuous)
        throw input_error("statistic '" + s.name + "' is EI-certified but not marked theta-monotone");
    auto name = s.name;
    by_name_.insert_or_assign(std::move(name), std::move(s));
}

const statistic& statistic_registry::get(std::string_view name) const {
    auto it = by_name_.find(name);
    if (it == by_name_.end()) {
        std::string known;
        for (const auto& [k, _] : by_name_) known += (known.empty() ? "" : ", ") + k;
        throw input_error("unknown statistic '" + std::string(name) + "' (known: " + known + ")");
    }
    return it->second;
}

bool statistic_registry::contains(std::string_view name) const { return by_name_.find(name) != by_name_.end(); }

std::vector<std::string> statistic_registry::names() const {
    std::vector<std::string> out;
    for (const auto& [k, _] : by_name_) out.push_back(k);
    return out;
}

const statistic_registry& statistic_registry::builtins() {
    static const statistic_registry reg;
    return reg;
}

namespace {

double diff_means_realized(std::span<const double> y, std::span<const std::uint8_t> w) {
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (w[i]) {
            s1 += y[i];
            ++n1;
        } else {
            s0 += y[i];
        }
    }
    const std::size_t n0 = y.size() - n1;
    if (n1 == 0 || n0 == 0) throw computation_error("difference in means needs both arms non-empty");
    return s1 / static_cast<double>(n1) - s0 / static_cast<double>(n0);
}

double studentized_realized(std::span<const double> y, std::span<const std::uint8_t> w) {
    double s1 = 0.0, s0 = 0.0;
    std::size_t n1 = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (w[i]) {
            s1 += y[i];
            ++n1;
        } else {
            s0 += y[i];
        }
    }
    const std::size_t n0 = y.size() - n1;
    if (n1 < 2 || n0 < 2) throw degenerate_statistic_error("studentized statistic needs at least two units per arm");
    const double m1 = s1 / static_cast<double>(n1);
    const double m0 = s0 / static_cast<double>(n0);
    double ss1 = 0.0, ss0 = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double d = y[i] - (w[i] ? m1 : m0);
        (w[i] ? ss1 : ss0) += d * d;
    }
    const double v1 = ss1 / static_cast<double>(n1 - 1);
    const double v0 = ss0 / static_cast<double>(n0 - 1);
    const double se2 = v1 / static_cast<double>(n1) + v0 / static_cast<double>(n0);
    if (!(se2 > 0.0)) throw degenerate_statistic_error("studentized statistic: both arm variances are zero");
    return (m1 - m0) / std::sqrt(se2);
}

// Values tied at this theta are ordered by how they move with theta, so
// the rank sum equals its limit from the right. Only equal values with equal
// slopes share a midrank.
double wilcoxon_realized(std::span<const double> y, std::span<const std::uint8_t> w,
                         std::span<const std::int8_t> slope) {
    thread_local std::vector<std::size_t> order;
    order.resize(y.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    auto s = [&](std::size_t i) { return slope.empty() ? 0 : slope[i]; };
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return y[a] < y[b] || (y[a] == y[b] && s(a) < s(b)); });
    // Ranks are 1-based; tied runs share their midrank.
    double rank_sum = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i + 1;
        while (j < order.size() && y[order[j]] == y[order[i]] && s(order[j]) == s(order[i])) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t k = i; k < j; ++k)
            if (w[order[k]]) rank_sum += midrank;
        i = j;
    }
    return rank_sum;
}

}  // namespace

double evaluate_realized(const statistic& stat, std::span<const double> realized,
                         std::span<const std::uint8_t> w) {
    switch (stat.kind) {
        case statistic_kind::diff_means:
            return diff_means_realized(realized, w);
        case statistic_kind::studentized:
            return studentized_realized(realized, w);
        case statistic_kind::wilcoxon_rank_sum:
            return wilcoxon_realized(realized, w, {});
        case statistic_kind::custom:
            break;
    }
    throw input_error("statistic '" + stat.name + "' needs the full imputed table");
}

double evaluate_on_path(const statistic& stat, std::span<const double> realized, std::span<const std::int8_t> slope,
                        std::span<const std::uint8_t> w) {
    if (stat.kind == statistic_kind::wilcoxon_rank_sum) return wilcoxon_realized(realized, w, slope);
    return evaluate_realized(stat, realized, w);
}

double evaluate(const statistic& stat, const imputed_outcomes& imputed, std::span<const std::uint8_t> w) {
    if (w.size() != imputed.y1.size()) throw input_error("assignment length does not match the imputed table");
    if (stat.kind == statistic_kind::custom) return stat.fn(imputed.y1, imputed.y0, w);
    thread_local std::vector<double> realized;
    realized.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) realized[i] = w[i] ? imputed.y1[i] : imputed.y0[i];
    return evaluate_realized(stat, realized, w);
}

ei_probe_result ei_probe(const statistic& stat, const observed_data& data, const design& d,
                         std::size_t trials, std::uint64_t seed) {
    if (trials == 0) throw input_error("ei_probe needs at least one trial");
    check_compatible(data, d);
    const double scale = data.outcome_scale();
    const std::size_t n = data.n_units();
    ei_probe_result result;
    assignment w(n);
    for (std::size_t t = 0; t < trials; ++t) {
        counter_rng rng(seed, t);
        const double theta = scale * (2.0 * rng.uniform01() - 1.0);
        imputed_outcomes table = impute(data, theta);
        sample_assignment(d, derive_seed(seed, 0x5eed), t, w);
        const std::size_t unit = rng.uniform_below(n);
        const bool raise_treated = rng.uniform_below(2) == 0;
        // Bump sizes span three decades around the outcome scale.
        const double delta = scale * std::pow(10.0, 3.0 * rng.uniform01() - 2.0);
        double before = 0.0, after = 0.0;
        try {
            before = evaluate(stat, table, w);
            if (raise_treated)
                table.y1[unit] += delta;
            else
                table.y0[unit] -= delta;
            after = evaluate(stat, table, w);
        } catch (const degenerate_statistic_error&) {
            continue;
        }
        result.trials_run = t + 1;
        if (after < before) {
            result.counterexample = ei_counterexample{unit, raise_treated, delta, theta, w, before, after};
            return result;
        }
    }
    result.trials_run = trials;
    return result;
}

}  // namespace frtcd
