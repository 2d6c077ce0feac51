#pragma once

#include "frtcd/design.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/statistics.hpp"

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace frtcd {

enum class combiner_method { stouffer, fisher, double_exponential, custom };

std::string to_string(combiner_method m);

/// Inputs are clipped to [p_clip, 1 - p_clip] before any quantile transform.
constexpr double p_clip = 1e-12;

/// Recipe G_c(g_c(u)) with g_c(u) = sum_i w_i F0^{-1}(u_i). Empty weights mean
/// unit weights. The three built-ins have closed or tabulated G_c; custom
/// recipes carry their own quantile and reference CDF.
struct combiner_spec {
    combiner_method method = combiner_method::fisher;
    std::vector<double> weights;
    std::function<double(double)> quantile;       // F0^{-1}, custom only
    std::function<double(double)> reference_cdf;  // G_c, custom only
    std::string label;

    static combiner_spec stouffer(std::vector<double> weights = {});
    /// Weighted requests become a custom recipe with a Monte Carlo G_c.
    static combiner_spec fisher(std::vector<double> weights = {});
    static combiner_spec double_exponential(std::vector<double> weights = {});
    static combiner_spec custom(std::string label, std::function<double(double)> quantile,
                                std::function<double(double)> reference_cdf, std::vector<double> weights = {});
    /// Custom recipe whose G_c is the empirical CDF of `draws` seeded samples
    /// of sum_i w_i F0^{-1}(U_i).
    static combiner_spec monte_carlo(std::string label, std::function<double(double)> quantile,
                                     std::vector<double> weights, std::size_t draws = 1'000'000,
                                     std::uint64_t seed = 0xc0b1e5ULL);
    /// "stouffer", "fisher", "de" / "double_exponential".
    static combiner_spec by_name(const std::string& name, std::vector<double> weights = {});

    std::string name() const;
    bool unit_weights() const;
};

/// G_c(sum_i w_i F0^{-1}(p_i)).
double combine_values(std::span<const double> p, const combiner_spec& spec);

/// Combination of M step functions of one side, itself a step function on
/// the union of their breakpoints.
class combined_pvalue_function {
   public:
    combined_pvalue_function(std::vector<pvalue_step_function> components, combiner_spec spec);

    curve_side side() const noexcept { return side_; }
    const combiner_spec& spec() const noexcept { return spec_; }
    const std::vector<pvalue_step_function>& components() const noexcept { return components_; }

    double operator()(double theta) const;

    const std::vector<double>& breakpoints() const noexcept { return points_; }
    std::size_t n_segments() const noexcept { return values_.size(); }
    double segment_start(std::size_t j) const noexcept;
    double segment_value(std::size_t j) const noexcept { return values_[j]; }

   private:
    std::vector<pvalue_step_function> components_;
    combiner_spec spec_;
    curve_side side_;
    std::vector<double> points_;
    std::vector<double> values_;  // one per segment
};

combined_pvalue_function combine_functions(std::vector<pvalue_step_function> fs, const combiner_spec& spec);

/// min(1, 2 min(p_c^{L+}, 1 - p_c^{U+})) at theta.
double combined_two_sided(const combined_pvalue_function& l_plus, const combined_pvalue_function& u_plus,
                          double theta);

/// One experiment's data, design and realization mode.
struct experiment {
    observed_data data;
    design des;
    run_mode mode;
    std::string label;
};

struct combined_result {
    confidence_interval combined;
    std::vector<confidence_interval> individual;  // proposed, alpha/2 per tail
    std::vector<double> t_obs;
    combiner_spec spec;
};

/// theta_l = sup{p_c^{L+} <= alpha/2}, theta_u = inf{1 - p_c^{U+} <= alpha/2}.
confidence_interval combined_interval(const combined_pvalue_function& l_plus, const combined_pvalue_function& u_plus,
                                      double alpha);
/// From prebuilt per-experiment step function sets.
combined_result combine_step_functions(const std::vector<step_function_set>& sets, const combiner_spec& spec,
                                       double alpha);
combined_result compute_combined_interval(const std::vector<experiment>& experiments, const statistic& stat,
                                          const combiner_spec& spec, double alpha, const build_options& opts = {});

}  // namespace frtcd
