#include "frtcd/inversion.hpp"

#include "frtcd/error.hpp"
#include "frtcd/parallel.hpp"
#include "frtcd/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace frtcd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void check_alpha(double a, const char* name) {
    if (!(a > 0.0 && a < 1.0)) throw input_error(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

std::string to_string(curve_side s) {
    switch (s) {
        case curve_side::l_plus: return "Lplus";
        case curve_side::u_plus: return "Uplus";
        case curve_side::l_minus: return "Lminus";
        case curve_side::u_minus: return "Uminus";
    }
    return "?";
}

curve_side parse_curve_side(const std::string& s) {
    switch (parse_pvalue_kind(s)) {
        case pvalue_kind::l_plus: return curve_side::l_plus;
        case pvalue_kind::u_plus: return curve_side::u_plus;
        case pvalue_kind::l_minus: return curve_side::l_minus;
        case pvalue_kind::u_minus: return curve_side::u_minus;
        default: break;
    }
    throw input_error("a p-value curve side must be one-sided (Lplus, Uplus, Lminus, Uminus)");
}

std::string to_string(interval_method m) { return m == interval_method::proposed ? "proposed" : "traditional"; }

pvalue_step_function::pvalue_step_function(curve_side side, std::vector<double> breakpoints, std::uint64_t base,
                                           std::uint64_t total, bool exhaustive)
    : side_(side), base_(base), total_(total), exhaustive_(exhaustive) {
    if (total_ == 0) throw input_error("step function over zero assignments");
    if (base_ + breakpoints.size() > total_) throw input_error("step function mass exceeds its total");
    std::sort(breakpoints.begin(), breakpoints.end());
    for (std::size_t i = 0; i < breakpoints.size();) {
        if (!std::isfinite(breakpoints[i])) throw input_error("step function breakpoints must be finite");
        std::size_t j = i;
        while (j < breakpoints.size() && breakpoints[j] == breakpoints[i]) ++j;
        points_.push_back(breakpoints[i]);
        weights_.push_back(j - i);
        i = j;
    }
    seg_counts_.resize(points_.size() + 1);
    if (increasing()) {
        seg_counts_[0] = base_;
        for (std::size_t j = 0; j < points_.size(); ++j) seg_counts_[j + 1] = seg_counts_[j] + weights_[j];
    } else {
        seg_counts_[0] = base_ + breakpoints.size();
        for (std::size_t j = 0; j < points_.size(); ++j) seg_counts_[j + 1] = seg_counts_[j] - weights_[j];
    }
}

std::uint64_t pvalue_step_function::count_at(double theta) const {
    if (std::isnan(theta)) throw input_error("p-value function evaluated at NaN");
    const auto idx = static_cast<std::size_t>(std::upper_bound(points_.begin(), points_.end(), theta) - points_.begin());
    return seg_counts_[idx];
}

double pvalue_step_function::segment_start(std::size_t j) const noexcept { return j == 0 ? -inf : points_[j - 1]; }

const pvalue_step_function& step_function_set::get(curve_side s) const {
    switch (s) {
        case curve_side::l_plus: return l_plus;
        case curve_side::u_plus: return u_plus;
        case curve_side::l_minus: return l_minus;
        case curve_side::u_minus: return u_minus;
    }
    return l_plus;
}

double bisect_crossing(const observed_data& data, const statistic& stat, std::span<const std::uint8_t> w,
                       double threshold, int max_doublings) {
    auto value = [&](double theta) { return statistic_at(stat, data, theta, w); };
    double ymin = data.y_obs.front(), ymax = data.y_obs.front();
    for (double y : data.y_obs) {
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    const double range = std::max(1.0, ymax - ymin);
    const double tol = 1e-9 * std::max(1.0, data.outcome_scale());

    // Walk away from 0 until the indicator flips. Past a few ranges every
    // ordering of the realized outcomes is fixed, so an unchanged value there
    // means the statistic has saturated and the crossing is at infinity.
    const bool on_at_zero = value(0.0) >= threshold;
    const double dir = on_at_zero ? -1.0 : 1.0;
    double inside = 0.0;  // last point on the starting side
    double outside = 0.0;
    bool found = false;
    double prev_value = value(0.0);
    for (int k = 0; k <= max_doublings; ++k) {
        const double theta = dir * range * std::ldexp(1.0, k);
        const double v = value(theta);
        if ((v >= threshold) != on_at_zero) {
            outside = theta;
            found = true;
            break;
        }
        if (std::abs(theta) > 4.0 * range && v == prev_value) return on_at_zero ? -inf : inf;
        prev_value = v;
        inside = theta;
    }
    if (!found)
        throw computation_error("statistic '" + stat.name + "' did not cross its threshold after " +
                                std::to_string(max_doublings) + " bracket doublings");
    double lo = on_at_zero ? outside : inside;  // off
    double hi = on_at_zero ? inside : outside;  // on
    // Bisect down to adjacent doubles so the breakpoint is the exact switch
    // point of the evaluated indicator.
    for (int it = 0; it < 400; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) break;
        (value(mid) >= threshold ? hi : lo) = mid;
    }
    if (value(hi - tol) >= threshold || value(hi + tol) < threshold)
        throw non_monotone_statistic_error("statistic '" + stat.name + "' is not monotone in theta near " +
                                           std::to_string(hi));
    return hi;
}

namespace {

struct affine_parts {
    double intercept;
    double slope;
};

// diff_means(theta, w) = intercept + theta * slope.
affine_parts diff_means_affine(const observed_data& data, std::span<const std::uint8_t> w) {
    std::size_t n1 = 0, moved_in = 0, moved_out = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        n1 += w[i];
        moved_in += (w[i] && !data.w_obs[i]);
        moved_out += (!w[i] && data.w_obs[i]);
    }
    const std::size_t n0 = w.size() - n1;
    const double a = statistic_at(statistic::diff_means(), data, 0.0, w);
    const double s = static_cast<double>(moved_in) / static_cast<double>(n1) +
                     static_cast<double>(moved_out) / static_cast<double>(n0);
    return {a, s};
}

double affine_crossing(const affine_parts& p, double threshold) {
    if (p.slope == 0.0) return p.intercept >= threshold ? -inf : inf;
    return (threshold - p.intercept) / p.slope;
}

void self_check(const observed_data& data, const assignment_set& assignments, const tie_band& band,
                const build_options& opts) {
    const statistic dm = statistic::diff_means();
    const double tol = 1e-9 * std::max(1.0, data.outcome_scale());
    const std::size_t n = assignments.size();
    const std::size_t checks = std::min(opts.self_check_samples, n);
    for (std::size_t c = 0; c < checks; ++c) {
        counter_rng rng(opts.self_check_seed, c);
        const auto w = assignments[checks == n ? c : rng.uniform_below(n)];
        const affine_parts parts = diff_means_affine(data, w);
        for (double thr : {band.lo, band.hi}) {
            const double closed = affine_crossing(parts, thr);
            const double numeric = bisect_crossing(data, dm, w, thr, opts.max_doublings);
            const bool agree = std::isinf(closed) ? closed == numeric
                                                  : std::abs(closed - numeric) <= 4.0 * tol + 1e-12 * std::abs(closed);
            if (!agree)
                throw computation_error("diff_means breakpoint self-check failed: closed form " +
                                        std::to_string(closed) + " vs bisection " + std::to_string(numeric));
        }
    }
}

}  // namespace

step_function_set build_step_functions(const observed_data& data, const assignment_set& assignments,
                                       const statistic& stat, const build_options& opts) {
    if (!stat.theta_monotone_rightcontinuous)
        throw non_monotone_statistic_error(
            "statistic '" + stat.name +
            "' is not certified effect-increasing; its p-value function can be non-monotone in theta, so "
            "inverting it does not guarantee coverage (use pcurve to inspect it on a grid)");
    if (assignments.size() == 0) throw input_error("empty assignment set");
    if (assignments.n_units() != data.n_units()) throw input_error("assignment set does not match the data");

    const double t_obs = observed_statistic(stat, data);
    const tie_band band = tie_band::around(t_obs, tie_scale(stat, data, t_obs));
    const std::size_t n = assignments.size();
    const bool closed_form = stat.kind == statistic_kind::diff_means;
    if (closed_form && opts.self_check_samples > 0) self_check(data, assignments, band, opts);

    std::vector<double> c_lo(n), c_hi(n);
    parallel_for(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            if (closed_form) {
                const affine_parts parts = diff_means_affine(data, assignments[j]);
                c_lo[j] = affine_crossing(parts, band.lo);
                c_hi[j] = affine_crossing(parts, band.hi);
            } else {
                c_lo[j] = bisect_crossing(data, stat, assignments[j], band.lo, opts.max_doublings);
                c_hi[j] = bisect_crossing(data, stat, assignments[j], band.hi, opts.max_doublings);
            }
        }
    }, closed_form ? 4096 : 64);

    auto make = [&](curve_side side, const std::vector<double>& crossings) {
        std::vector<double> points;
        points.reserve(n);
        std::uint64_t base = 0;
        const bool inc = is_increasing(side);
        for (double c : crossings) {
            if (std::isfinite(c))
                points.push_back(c);
            else if ((c < 0.0) == inc)
                ++base;  // always on: -inf for increasing sides, +inf for decreasing ones
        }
        return pvalue_step_function(side, std::move(points), base, n, assignments.exhaustive());
    };
    step_function_set out;
    out.t_obs = t_obs;
    out.l_plus = make(curve_side::l_plus, c_lo);   // T >= lo
    out.u_minus = make(curve_side::u_minus, c_lo);  // T <  lo
    out.u_plus = make(curve_side::u_plus, c_hi);   // T >= hi
    out.l_minus = make(curve_side::l_minus, c_hi);  // T <  hi
    return out;
}

pvalue_step_function build_step_function(const observed_data& data, const assignment_set& assignments,
                                         const statistic& stat, curve_side side, const build_options& opts) {
    return build_step_functions(data, assignments, stat, opts).get(side);
}

pvalue_step_function build_step_function(const observed_data& data, const design& d, const statistic& stat,
                                         curve_side side, const run_mode& mode, const build_options& opts) {
    check_compatible(data, d);
    return build_step_function(data, draw_assignments(d, mode), stat, side, opts);
}

double invert_lower(const pvalue_step_function& f, double alpha1) {
    check_alpha(alpha1, "alpha1");
    if (!f.increasing()) throw input_error("invert_lower needs a non-decreasing (Lplus or Uplus) function");
    for (std::size_t j = 0; j < f.n_segments(); ++j)
        if (f.segment_value(j) > alpha1) return f.segment_start(j);
    return inf;
}

double invert_upper(const pvalue_step_function& f, double alpha2) {
    check_alpha(alpha2, "alpha2");
    if (f.increasing()) throw input_error("invert_upper needs a non-increasing (Lminus or Uminus) function");
    for (std::size_t j = 0; j < f.n_segments(); ++j)
        if (f.segment_value(j) <= alpha2) return f.segment_start(j);
    return inf;
}

double first_at_or_above(const pvalue_step_function& f, double level) {
    if (!f.increasing()) throw input_error("first_at_or_above needs a non-decreasing function");
    for (std::size_t j = 0; j < f.n_segments(); ++j)
        if (f.segment_value(j) >= level) return f.segment_start(j);
    return inf;
}

confidence_interval proposed_interval(const pvalue_step_function& l_plus, const pvalue_step_function& l_minus,
                                      double alpha1, double alpha2) {
    if (alpha1 + alpha2 > 1.0) throw input_error("alpha1 + alpha2 must not exceed 1");
    confidence_interval ci;
    ci.lower = invert_lower(l_plus, alpha1);
    ci.upper = invert_upper(l_minus, alpha2);
    ci.alpha1 = alpha1;
    ci.alpha2 = alpha2;
    ci.method = interval_method::proposed;
    if (ci.lower > ci.upper)
        throw level_too_high_error("levels alpha1=" + std::to_string(alpha1) + ", alpha2=" + std::to_string(alpha2) +
                                   " give lower " + std::to_string(ci.lower) + " > upper " + std::to_string(ci.upper));
    return ci;
}

confidence_interval compute_confidence_interval(const observed_data& data, const design& d, const statistic& stat,
                                                double alpha1, double alpha2, const run_mode& mode,
                                                const build_options& opts) {
    check_alpha(alpha1, "alpha1");
    check_alpha(alpha2, "alpha2");
    check_compatible(data, d);
    const auto fs = build_step_functions(data, draw_assignments(d, mode), stat, opts);
    return proposed_interval(fs.l_plus, fs.l_minus, alpha1, alpha2);
}

confidence_interval traditional_interval(const pvalue_step_function& l_plus, double alpha) {
    check_alpha(alpha, "alpha");
    confidence_interval ci;
    ci.lower = invert_lower(l_plus, alpha / 2);
    ci.upper = first_at_or_above(l_plus, 1.0 - alpha / 2);
    ci.alpha1 = ci.alpha2 = alpha / 2;
    ci.method = interval_method::traditional;
    return ci;
}

confidence_interval compute_traditional_interval(const observed_data& data, const design& d,
                                                 const statistic& stat, double alpha, const run_mode& mode,
                                                 const build_options& opts) {
    check_compatible(data, d);
    return traditional_interval(build_step_function(data, draw_assignments(d, mode), stat, curve_side::l_plus, opts),
                                alpha);
}

confidence_interval traditional_interval_on_grid(const pvalue_step_function& l_plus, double alpha,
                                                 std::vector<double> grid) {
    check_alpha(alpha, "alpha");
    if (!l_plus.increasing()) throw input_error("traditional inversion needs the Lplus function");
    if (grid.empty()) throw input_error("theta grid is empty");
    std::sort(grid.begin(), grid.end());
    confidence_interval ci;
    ci.lower = ci.upper = inf;
    ci.alpha1 = ci.alpha2 = alpha / 2;
    ci.method = interval_method::traditional;
    for (double t : grid)
        if (l_plus(t) > alpha / 2) {
            ci.lower = t;
            break;
        }
    for (double t : grid)
        if (l_plus(t) >= 1.0 - alpha / 2) {
            ci.upper = t;
            break;
        }
    return ci;
}

}  // namespace frtcd
