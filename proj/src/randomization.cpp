#include "frtcd/randomization.hpp"

#include "frtcd/error.hpp"
#include "frtcd/parallel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

namespace frtcd {

std::string to_string(pvalue_kind k) {
    switch (k) {
        case pvalue_kind::l_plus: return "Lplus";
        case pvalue_kind::u_plus: return "Uplus";
        case pvalue_kind::l_minus: return "Lminus";
        case pvalue_kind::u_minus: return "Uminus";
        case pvalue_kind::two_sided_l: return "two_sided";
    }
    return "?";
}

pvalue_kind parse_pvalue_kind(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != '_' && c != '-') t += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (t == "lplus") return pvalue_kind::l_plus;
    if (t == "uplus") return pvalue_kind::u_plus;
    if (t == "lminus") return pvalue_kind::l_minus;
    if (t == "uminus") return pvalue_kind::u_minus;
    if (t == "twosided" || t == "twosidedl") return pvalue_kind::two_sided_l;
    throw input_error("unknown p-value kind '" + s + "' (Lplus, Uplus, Lminus, Uminus, two_sided)");
}

double tie_band::quantum_for(double scale) {
    scale = std::abs(scale);
    if (!(scale > 0.0) || !std::isfinite(scale)) scale = 1.0;
    return std::pow(10.0, std::floor(std::log10(scale)) - 11.0);
}

tie_band tie_band::around(double t_obs, double scale) {
    tie_band b;
    b.t_obs = t_obs;
    b.quantum = quantum_for(scale);
    const double k = collation_key(t_obs, b.quantum);
    b.lo = (k - 0.5) * b.quantum;
    b.hi = (k + 0.5) * b.quantum;
    return b;
}

double collation_key(double t, double quantum) noexcept { return std::floor(t / quantum + 0.5); }

double tie_scale(const statistic& stat, const observed_data& data, double t_obs) {
    switch (stat.kind) {
        case statistic_kind::wilcoxon_rank_sum:
        case statistic_kind::studentized:
            return std::max(std::abs(t_obs), 1.0);
        default:
            return std::max(std::abs(t_obs), data.outcome_scale());
    }
}

assignment_set draw_assignments(const design& d, const run_mode& mode) {
    if (mode.is_exact()) return enumerate_assignments(d, mode.cap);
    if (mode.k == 0) throw input_error("Monte Carlo mode needs k >= 1");
    return sample_assignments(d, mode.k, mode.seed);
}

double tail_counts::p(pvalue_kind k) const {
    if (total == 0) throw computation_error("p-value over an empty assignment set");
    const auto t = static_cast<double>(total);
    switch (k) {
        case pvalue_kind::l_plus: return static_cast<double>(ge) / t;
        case pvalue_kind::u_plus: return static_cast<double>(gt) / t;
        case pvalue_kind::l_minus: return static_cast<double>(le) / t;
        case pvalue_kind::u_minus: return static_cast<double>(lt) / t;
        case pvalue_kind::two_sided_l: return std::min(1.0, 2.0 * static_cast<double>(std::min(ge, le)) / t);
    }
    return 0.0;
}

double statistic_at(const statistic& stat, const observed_data& data, double theta,
                    std::span<const std::uint8_t> w) {
    const std::size_t n = data.n_units();
    if (w.size() != n) throw input_error("assignment length does not match the data");
    if (stat.kind == statistic_kind::custom) return evaluate(stat, impute(data, theta), w);
    thread_local std::vector<double> realized;
    thread_local std::vector<std::int8_t> slope;
    realized.resize(n);
    slope.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double y = data.y_obs[i];
        slope[i] = w[i] == data.w_obs[i] ? 0 : (w[i] ? 1 : -1);
        realized[i] = y + slope[i] * theta;
    }
    return evaluate_on_path(stat, realized, slope, w);
}

double observed_statistic(const statistic& stat, const observed_data& data) {
    return statistic_at(stat, data, 0.0, data.w_obs);
}

namespace {

std::vector<double> evaluate_all(const observed_data& data, const assignment_set& assignments,
                                 const statistic& stat, double theta) {
    if (assignments.size() == 0) throw input_error("empty assignment set");
    if (assignments.n_units() != data.n_units()) throw input_error("assignment set does not match the data");
    if (!std::isfinite(theta)) throw input_error("theta must be finite");
    std::vector<double> t(assignments.size());
    parallel_for(t.size(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) t[j] = statistic_at(stat, data, theta, assignments[j]);
    });
    return t;
}

tail_counts classify(const std::vector<double>& t, const tie_band& band) {
    tail_counts c;
    c.total = t.size();
    for (double v : t) {
        c.ge += band.ge(v);
        c.gt += band.gt(v);
        c.le += band.le(v);
        c.lt += band.lt(v);
    }
    return c;
}

}  // namespace

randomization_distribution compute_distribution(const observed_data& data, const assignment_set& assignments,
                                                const statistic& stat, double theta) {
    const std::vector<double> t = evaluate_all(data, assignments, stat, theta);
    randomization_distribution out;
    out.theta = theta;
    out.exhaustive = assignments.exhaustive();
    out.total = t.size();
    out.t_obs = observed_statistic(stat, data);
    out.band = tie_band::around(out.t_obs, tie_scale(stat, data, out.t_obs));
    out.tails = classify(t, out.band);

    std::vector<double> keys(t.size());
    std::transform(t.begin(), t.end(), keys.begin(), [&](double v) { return collation_key(v, out.band.quantum); });
    std::sort(keys.begin(), keys.end());
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        out.values.push_back(keys[i] * out.band.quantum);
        out.counts.push_back(j - i);
        i = j;
    }
    const auto total = static_cast<double>(out.total);
    std::uint64_t biggest = 0;
    for (auto c : out.counts) {
        out.probs.push_back(static_cast<double>(c) / total);
        biggest = std::max(biggest, c);
    }
    out.gamma_star = static_cast<double>(biggest) / total;
    return out;
}

randomization_distribution compute_distribution(const observed_data& data, const design& d,
                                                const statistic& stat, double theta, const run_mode& mode) {
    check_compatible(data, d);
    return compute_distribution(data, draw_assignments(d, mode), stat, theta);
}

tail_counts compute_tail_counts(const observed_data& data, const assignment_set& assignments,
                                const statistic& stat, double theta) {
    const std::vector<double> t = evaluate_all(data, assignments, stat, theta);
    const double t_obs = observed_statistic(stat, data);
    return classify(t, tie_band::around(t_obs, tie_scale(stat, data, t_obs)));
}

double p_value(const observed_data& data, const assignment_set& assignments, const statistic& stat,
               double theta, pvalue_kind kind) {
    return compute_tail_counts(data, assignments, stat, theta).p(kind);
}

double p_value(const observed_data& data, const design& d, const statistic& stat, double theta,
               pvalue_kind kind, const run_mode& mode) {
    check_compatible(data, d);
    return p_value(data, draw_assignments(d, mode), stat, theta, kind);
}

namespace {

bool is_lower_kind(pvalue_kind k) { return k == pvalue_kind::l_plus || k == pvalue_kind::l_minus; }

}  // namespace

double pvalue_law::cdf(double alpha) const {
    std::uint64_t below = 0;
    for (std::size_t i = 0; i < level_counts.size(); ++i)
        if (level(i) <= alpha) below += mass[i];
    return static_cast<double>(below) / static_cast<double>(total);
}

bool pvalue_law::dominance_holds() const {
    std::uint64_t cum = 0;
    for (std::size_t i = 0; i < level_counts.size(); ++i) {
        if (is_lower_kind(kind)) {
            // At a = level_i the CDF jumps to cum + mass_i.
            if (cum + mass[i] > level_counts[i]) return false;
        } else {
            // Just below level_i the CDF is still cum.
            if (cum < level_counts[i]) return false;
        }
        cum += mass[i];
    }
    return true;
}

double pvalue_law::max_discrepancy() const {
    std::int64_t worst = 0;
    std::uint64_t cum = 0;
    for (std::size_t i = 0; i < level_counts.size(); ++i) {
        const auto lvl = static_cast<std::int64_t>(level_counts[i]);
        if (is_lower_kind(kind))
            worst = std::max(worst, lvl - static_cast<std::int64_t>(cum));
        cum += mass[i];
        if (!is_lower_kind(kind))
            worst = std::max(worst, static_cast<std::int64_t>(cum) - lvl);
    }
    return static_cast<double>(worst) / static_cast<double>(total);
}

std::vector<std::pair<double, double>> pvalue_law::profile() const {
    std::vector<std::pair<double, double>> out;
    std::uint64_t cum = 0;
    for (std::size_t i = 0; i < level_counts.size(); ++i) {
        cum += mass[i];
        out.emplace_back(level(i), static_cast<double>(cum) / static_cast<double>(total));
    }
    return out;
}

const pvalue_law& dominance_profile::law(pvalue_kind k) const {
    switch (k) {
        case pvalue_kind::l_plus: return laws[0];
        case pvalue_kind::u_plus: return laws[1];
        case pvalue_kind::l_minus: return laws[2];
        case pvalue_kind::u_minus: return laws[3];
        default: break;
    }
    throw input_error("dominance profile covers the four one-sided kinds only");
}

dominance_profile compute_dominance_profile(const observed_data& data, const design& d, const statistic& stat,
                                            double theta0, std::uint64_t cap) {
    check_compatible(data, d);
    const assignment_set all = enumerate_assignments(d, cap);
    // Under the true theta0 every realized dataset imputes back to the same
    // table, so T_rep over assignments is one fixed vector and assignment j's
    // p-values are its tail counts within that vector.
    const std::vector<double> t = evaluate_all(data, all, stat, theta0);
    double tmax = 0.0;
    for (double v : t) tmax = std::max(tmax, std::abs(v));
    const double q = tie_band::quantum_for(tie_scale(stat, data, tmax));
    std::vector<double> keys(t.size());
    std::transform(t.begin(), t.end(), keys.begin(), [&](double v) { return collation_key(v, q); });
    std::sort(keys.begin(), keys.end());
    std::vector<std::uint64_t> mass;
    for (std::size_t i = 0; i < keys.size();) {
        std::size_t j = i;
        while (j < keys.size() && keys[j] == keys[i]) ++j;
        mass.push_back(j - i);
        i = j;
    }
    const std::size_t m = mass.size();
    const std::uint64_t n = keys.size();
    std::vector<std::uint64_t> below(m + 1, 0);  // below[l] = mass at levels < l
    for (std::size_t l = 0; l < m; ++l) below[l + 1] = below[l] + mass[l];

    dominance_profile out;
    out.total = n;
    out.gamma_star_count = *std::max_element(mass.begin(), mass.end());
    out.gamma_star = static_cast<double>(out.gamma_star_count) / static_cast<double>(n);
    const pvalue_kind kinds[4] = {pvalue_kind::l_plus, pvalue_kind::u_plus, pvalue_kind::l_minus,
                                  pvalue_kind::u_minus};
    for (int k = 0; k < 4; ++k) {
        std::vector<std::pair<std::uint64_t, std::uint64_t>> pairs;  // (level count, mass)
        for (std::size_t l = 0; l < m; ++l) {
            std::uint64_t lvl = 0;
            switch (kinds[k]) {
                case pvalue_kind::l_plus: lvl = n - below[l]; break;
                case pvalue_kind::u_plus: lvl = n - below[l + 1]; break;
                case pvalue_kind::l_minus: lvl = below[l + 1]; break;
                case pvalue_kind::u_minus: lvl = below[l]; break;
                default: break;
            }
            pairs.emplace_back(lvl, mass[l]);
        }
        std::sort(pairs.begin(), pairs.end());
        pvalue_law& law = out.laws[k];
        law.kind = kinds[k];
        law.total = n;
        for (auto [lvl, ms] : pairs) {
            law.level_counts.push_back(lvl);
            law.mass.push_back(ms);
        }
    }
    return out;
}

}  // namespace frtcd
