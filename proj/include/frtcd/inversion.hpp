#pragma once

#include "frtcd/design.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/statistics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace frtcd {

/// Which one-sided p-value function a step function represents.
enum class curve_side { l_plus, u_plus, l_minus, u_minus };

std::string to_string(curve_side s);
curve_side parse_curve_side(const std::string& s);
/// l_plus and u_plus are non-decreasing in theta; the minus sides are non-increasing.
constexpr bool is_increasing(curve_side s) noexcept { return s == curve_side::l_plus || s == curve_side::u_plus; }

/// Exact p-value function of theta. Each assignment contributes an indicator
/// that switches at its breakpoint b:
///   increasing sides: on for theta >= b
///   decreasing sides: on for theta <  b
/// Assignments whose indicator never changes are in `base` (always on) or
/// simply absent (never on). p(theta) = (base + active breakpoints) / total.
/// Both sides are right-continuous.
class pvalue_step_function {
   public:
    pvalue_step_function() = default;
    pvalue_step_function(curve_side side, std::vector<double> breakpoints, std::uint64_t base,
                         std::uint64_t total, bool exhaustive);

    curve_side side() const noexcept { return side_; }
    bool increasing() const noexcept { return is_increasing(side_); }
    /// Unique sorted breakpoints.
    const std::vector<double>& breakpoints() const noexcept { return points_; }
    /// Assignments switching at each breakpoint.
    const std::vector<std::uint64_t>& weights() const noexcept { return weights_; }
    std::uint64_t base() const noexcept { return base_; }
    std::uint64_t total() const noexcept { return total_; }
    bool exhaustive() const noexcept { return exhaustive_; }

    std::uint64_t count_at(double theta) const;
    double operator()(double theta) const {
        return static_cast<double>(count_at(theta)) / static_cast<double>(total_);
    }

    /// Segment j is [b_j, b_{j+1}) with b_0 = -inf; there are breakpoints().size() + 1 segments.
    std::size_t n_segments() const noexcept { return points_.size() + 1; }
    std::uint64_t segment_count(std::size_t j) const noexcept { return seg_counts_[j]; }
    double segment_value(std::size_t j) const noexcept {
        return static_cast<double>(seg_counts_[j]) / static_cast<double>(total_);
    }
    /// Left end of segment j (-inf for j = 0).
    double segment_start(std::size_t j) const noexcept;

    double at_minus_infinity() const noexcept { return segment_value(0); }
    double at_plus_infinity() const noexcept { return segment_value(n_segments() - 1); }

   private:
    curve_side side_ = curve_side::l_plus;
    std::vector<double> points_;
    std::vector<std::uint64_t> weights_;
    std::vector<std::uint64_t> seg_counts_;
    std::uint64_t base_ = 0;
    std::uint64_t total_ = 0;
    bool exhaustive_ = true;
};

struct build_options {
    /// Assignments on which the diff_means closed form is re-derived by
    /// bisection as a self-check. 0 disables the check.
    std::size_t self_check_samples = 100;
    std::uint64_t self_check_seed = 0x5e1fc4ecULL;
    /// Cap on bracket doublings before giving up.
    int max_doublings = 200;
};

/// All four one-sided step functions from one pass over the assignments.
struct step_function_set {
    pvalue_step_function l_plus, u_plus, l_minus, u_minus;
    double t_obs = 0.0;

    const pvalue_step_function& get(curve_side s) const;
};

step_function_set build_step_functions(const observed_data& data, const assignment_set& assignments,
                                       const statistic& stat, const build_options& opts = {});
pvalue_step_function build_step_function(const observed_data& data, const assignment_set& assignments,
                                         const statistic& stat, curve_side side, const build_options& opts = {});
pvalue_step_function build_step_function(const observed_data& data, const design& d, const statistic& stat,
                                         curve_side side, const run_mode& mode, const build_options& opts = {});

/// inf{theta : T(theta, w) >= threshold} by bracketing and bisection. +inf
/// when the statistic saturates below the threshold, -inf when it never
/// falls below it.
double bisect_crossing(const observed_data& data, const statistic& stat, std::span<const std::uint8_t> w,
                       double threshold, int max_doublings = 200);

enum class interval_method { proposed, traditional };
std::string to_string(interval_method m);

/// [lower, upper): lower-closed, upper-open.
struct confidence_interval {
    double lower = 0.0;
    double upper = 0.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    interval_method method = interval_method::proposed;

    bool contains(double theta) const noexcept { return lower <= theta && theta < upper; }
    double width() const noexcept { return upper - lower; }
};

/// sup{theta : f(theta) <= alpha} for a non-decreasing f; -inf when f(-inf) > alpha.
double invert_lower(const pvalue_step_function& f, double alpha1);
/// inf{theta : f(theta) <= alpha} for a non-increasing f; +inf when f never drops to alpha.
double invert_upper(const pvalue_step_function& f, double alpha2);
/// inf{theta : f(theta) >= level} for a non-decreasing f.
double first_at_or_above(const pvalue_step_function& f, double level);

/// [theta_l(alpha1), theta_u(alpha2)). Throws level_too_high_error when lower > upper.
confidence_interval proposed_interval(const pvalue_step_function& l_plus, const pvalue_step_function& l_minus,
                                      double alpha1, double alpha2);
confidence_interval compute_confidence_interval(const observed_data& data, const design& d, const statistic& stat,
                                                double alpha1, double alpha2, const run_mode& mode,
                                                const build_options& opts = {});

/// Lower at the alpha/2 crossing and upper at the 1 - alpha/2 crossing of
/// the same Lplus function. No coverage guarantee.
confidence_interval traditional_interval(const pvalue_step_function& l_plus, double alpha);
confidence_interval compute_traditional_interval(const observed_data& data, const design& d,
                                                 const statistic& stat, double alpha, const run_mode& mode,
                                                 const build_options& opts = {});
/// The same recipe restricted to a theta grid: lower is the smallest grid
/// point with p > alpha/2, upper the smallest with p >= 1 - alpha/2.
confidence_interval traditional_interval_on_grid(const pvalue_step_function& l_plus, double alpha,
                                                 std::vector<double> grid);

}  // namespace frtcd
