#pragma once

#include "frtcd/design.hpp"
#include "frtcd/statistics.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace frtcd {

/// The five p-value functions of theta.
///   l_plus  = P(T_rep >= T_obs)     u_plus  = P(T_rep >  T_obs)
///   l_minus = P(T_rep <= T_obs)     u_minus = P(T_rep <  T_obs)
///   two_sided_l = min(1, 2 min(l_plus, l_minus))
enum class pvalue_kind { l_plus, u_plus, l_minus, u_minus, two_sided_l };

std::string to_string(pvalue_kind k);
pvalue_kind parse_pvalue_kind(const std::string& s);

/// Tie classification against T_obs. Values are compared after rounding to
/// 12 significant digits of `scale` (quantum = 10^(floor(log10 scale) - 11)),
/// i.e. T equals T_obs iff lo <= T < hi. Every comparison in the library
/// goes through this band, which keeps all four one-sided p-value functions
/// right-continuous in theta.
struct tie_band {
    double t_obs = 0.0;
    double quantum = 0.0;
    double lo = 0.0;
    double hi = 0.0;

    static double quantum_for(double scale);
    static tie_band around(double t_obs, double scale);

    bool ge(double t) const noexcept { return t >= lo; }
    bool gt(double t) const noexcept { return t >= hi; }
    bool le(double t) const noexcept { return t < hi; }
    bool lt(double t) const noexcept { return t < lo; }
};

/// Rounding key used to collate statistic values into unique levels.
double collation_key(double t, double quantum) noexcept;

/// Scale the tie quantum is relative to: max(|T_obs|, outcome scale) for
/// location statistics, max(|T_obs|, 1) for rank and studentized ones.
double tie_scale(const statistic& stat, const observed_data& data, double t_obs);

/// How the randomization distribution is realized.
struct run_mode {
    enum class kind { exact, monte_carlo };

    kind type = kind::exact;
    std::uint64_t k = 0;     // Monte Carlo draws
    std::uint64_t seed = 0;  // Monte Carlo seed
    std::uint64_t cap = default_enumeration_cap;

    static run_mode exact(std::uint64_t cap = default_enumeration_cap) { return {kind::exact, 0, 0, cap}; }
    static run_mode monte_carlo(std::uint64_t k, std::uint64_t seed) { return {kind::monte_carlo, k, seed}; }

    bool is_exact() const noexcept { return type == kind::exact; }
    std::string label() const { return is_exact() ? "exact" : "mc"; }
};

/// Full enumeration (exact) or k seeded draws (monte_carlo).
assignment_set draw_assignments(const design& d, const run_mode& mode);

/// Exact integer tail counts; p = count / total.
struct tail_counts {
    std::uint64_t ge = 0, gt = 0, le = 0, lt = 0;
    std::uint64_t total = 0;

    double p(pvalue_kind k) const;
};

struct randomization_distribution {
    std::vector<double> values;         // unique collated levels, strictly increasing
    std::vector<std::uint64_t> counts;  // assignments at each level
    std::vector<double> probs;          // counts / total
    double gamma_star = 0.0;            // largest atom
    std::uint64_t total = 0;
    bool exhaustive = true;
    double theta = 0.0;
    double t_obs = 0.0;
    tie_band band;
    tail_counts tails;
};

/// T(D_obs), computed once from the data.
double observed_statistic(const statistic& stat, const observed_data& data);

/// T on the dataset realized by w from the table imputed at theta.
double statistic_at(const statistic& stat, const observed_data& data, double theta,
                    std::span<const std::uint8_t> w);

randomization_distribution compute_distribution(const observed_data& data, const assignment_set& assignments,
                                                const statistic& stat, double theta);
randomization_distribution compute_distribution(const observed_data& data, const design& d,
                                                const statistic& stat, double theta, const run_mode& mode);

tail_counts compute_tail_counts(const observed_data& data, const assignment_set& assignments,
                                const statistic& stat, double theta);

double p_value(const observed_data& data, const assignment_set& assignments, const statistic& stat,
               double theta, pvalue_kind kind);
double p_value(const observed_data& data, const design& d, const statistic& stat, double theta,
               pvalue_kind kind, const run_mode& mode);

/// Exact law of one p-value kind at the true theta, taking every assignment
/// in turn as the observed one. Levels and probabilities are integer counts
/// over `total`, so the dominance checks are exact.
struct pvalue_law {
    pvalue_kind kind = pvalue_kind::l_plus;
    std::vector<std::uint64_t> level_counts;  // attained p-value * total, ascending
    std::vector<std::uint64_t> mass;          // assignments attaining each level
    std::uint64_t total = 0;

    double level(std::size_t i) const { return static_cast<double>(level_counts[i]) / static_cast<double>(total); }
    /// P(p <= alpha).
    double cdf(double alpha) const;
    /// Lower kinds: P(p <= a) <= a for every a in (0,1). Upper kinds: P(p <= a) >= a.
    bool dominance_holds() const;
    /// Lower kinds: sup_a (a - P(p <= a)). Upper kinds: sup_a (P(p <= a) - a).
    double max_discrepancy() const;
    /// (level, P(p <= level)) pairs for reporting.
    std::vector<std::pair<double, double>> profile() const;
};

struct dominance_profile {
    std::array<pvalue_law, 4> laws;  // l_plus, u_plus, l_minus, u_minus
    double gamma_star = 0.0;
    std::uint64_t gamma_star_count = 0;
    std::uint64_t total = 0;

    const pvalue_law& law(pvalue_kind k) const;
};

/// The population is the table imputed from `data` at theta0.
dominance_profile compute_dominance_profile(const observed_data& data, const design& d, const statistic& stat,
                                            double theta0, std::uint64_t cap = default_enumeration_cap);

}  // namespace frtcd
