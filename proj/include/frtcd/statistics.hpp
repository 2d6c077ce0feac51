#pragma once

#include "frtcd/design.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frtcd {

/// One experiment's realized assignment and outcomes.
struct observed_data {
    assignment w_obs;
    std::vector<double> y_obs;
    std::vector<std::string> unit_ids;  // optional, carried for reporting

    observed_data() = default;
    /// Validates equal lengths, binary w and finite y.
    observed_data(assignment w, std::vector<double> y, std::vector<std::string> ids = {});

    std::size_t n_units() const noexcept { return y_obs.size(); }
    /// max |y_obs|, or 1 when every outcome is zero.
    double outcome_scale() const noexcept;
};

/// Throws input_error when the data cannot come from the design.
void check_compatible(const observed_data& data, const design& d);

/// Potential-outcome table completed under the sharp null Y(1) - Y(0) = theta.
struct imputed_outcomes {
    std::vector<double> y1;
    std::vector<double> y0;
    double theta = 0.0;
};

imputed_outcomes impute(const observed_data& data, double theta);

enum class statistic_kind { diff_means, studentized, wilcoxon_rank_sum, custom };

/// User statistic: receives the full imputed table and the assignment.
using statistic_fn = std::function<double(std::span<const double> y1, std::span<const double> y0,
                                          std::span<const std::uint8_t> w)>;

struct statistic {
    std::string name;
    statistic_kind kind = statistic_kind::custom;
    bool large_favor_plus = true;
    bool ei_certified = false;
    bool theta_monotone_rightcontinuous = false;
    statistic_fn fn;

    static statistic diff_means();
    static statistic studentized();
    static statistic wilcoxon_rank_sum();
    /// Uncertified until ei_probe (or the caller) says otherwise.
    static statistic custom(std::string name, statistic_fn fn);
};

/// Name -> statistic lookup, preloaded with the built-ins.
class statistic_registry {
   public:
    statistic_registry();

    void add(statistic s);
    const statistic& get(std::string_view name) const;
    bool contains(std::string_view name) const;
    std::vector<std::string> names() const;

    static const statistic_registry& builtins();

   private:
    std::map<std::string, statistic, std::less<>> by_name_;
};

/// T computed on the dataset that assignment w realizes from the imputed table.
double evaluate(const statistic& stat, const imputed_outcomes& imputed, std::span<const std::uint8_t> w);

/// Same, for built-ins that only see the realized outcomes (w ? y1 : y0).
double evaluate_realized(const statistic& stat, std::span<const double> realized,
                         std::span<const std::uint8_t> w);

/// Same, where realized[i] moves with theta at rate slope[i] (+1, 0 or -1).
/// Ties are then resolved by their limit from the right; only the rank
/// statistic is affected.
double evaluate_on_path(const statistic& stat, std::span<const double> realized, std::span<const std::int8_t> slope,
                        std::span<const std::uint8_t> w);

/// A perturbation that moved the statistic the wrong way.
struct ei_counterexample {
    std::size_t unit = 0;
    bool raised_treatment_potential = true;  // else lowered the control potential
    double delta = 0.0;
    double theta = 0.0;
    assignment w;
    double before = 0.0;
    double after = 0.0;
};

struct ei_probe_result {
    std::optional<ei_counterexample> counterexample;
    std::size_t trials_run = 0;

    bool consistent_with_ei() const noexcept { return !counterexample.has_value(); }
};

/// Randomized search for EI violations: raise one Y(1) coordinate (or lower
/// one Y(0) coordinate) of an imputed table and check that the statistic does
/// not drop for a sampled assignment. A counterexample is definitive; a clean
/// run is not a proof.
ei_probe_result ei_probe(const statistic& stat, const observed_data& data, const design& d,
                         std::size_t trials, std::uint64_t seed);

}  // namespace frtcd
