#include "frtcd/combine.hpp"

#include "frtcd/error.hpp"
#include "frtcd/rng.hpp"
#include "frtcd/special_functions.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>

namespace frtcd {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double laplace_quantile(double u) { return u <= 0.5 ? std::log(2.0 * u) : -std::log(2.0 * (1.0 - u)); }

void check_weights(const std::vector<double>& w) {
    bool any = false;
    for (double v : w) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw input_error("combiner weights must be finite and non-negative");
        any = any || v > 0.0;
    }
    if (!w.empty() && !any) throw input_error("combiner weights are all zero");
}

}  // namespace

std::string to_string(combiner_method m) {
    switch (m) {
        case combiner_method::stouffer: return "stouffer";
        case combiner_method::fisher: return "fisher";
        case combiner_method::double_exponential: return "double_exponential";
        case combiner_method::custom: return "custom";
    }
    return "?";
}

combiner_spec combiner_spec::stouffer(std::vector<double> weights) {
    check_weights(weights);
    return {combiner_method::stouffer, std::move(weights), {}, {}, "stouffer"};
}

combiner_spec combiner_spec::fisher(std::vector<double> weights) {
    check_weights(weights);
    combiner_spec s{combiner_method::fisher, std::move(weights), {}, {}, "fisher"};
    if (s.unit_weights()) {
        s.weights.clear();
        return s;
    }
    // The chi-square reference only holds for unit weights.
    return monte_carlo("fisher_weighted", [](double u) { return std::log(u); }, std::move(s.weights));
}

combiner_spec combiner_spec::double_exponential(std::vector<double> weights) {
    check_weights(weights);
    return {combiner_method::double_exponential, std::move(weights), {}, {}, "double_exponential"};
}

combiner_spec combiner_spec::custom(std::string label, std::function<double(double)> quantile,
                                    std::function<double(double)> reference_cdf, std::vector<double> weights) {
    check_weights(weights);
    if (!quantile) throw input_error("custom combiner '" + label + "' has no quantile function");
    if (!reference_cdf) throw input_error("custom combiner '" + label + "' has no reference CDF evaluator");
    return {combiner_method::custom, std::move(weights), std::move(quantile), std::move(reference_cdf),
            std::move(label)};
}

combiner_spec combiner_spec::monte_carlo(std::string label, std::function<double(double)> quantile,
                                         std::vector<double> weights, std::size_t draws, std::uint64_t seed) {
    check_weights(weights);
    if (!quantile) throw input_error("custom combiner '" + label + "' has no quantile function");
    if (weights.empty()) throw input_error("Monte Carlo reference needs an explicit weight vector");
    if (draws == 0) throw input_error("Monte Carlo reference needs at least one draw");
    auto sample = std::make_shared<std::vector<double>>(draws);
    for (std::size_t j = 0; j < draws; ++j) {
        counter_rng rng(seed, j);
        double s = 0.0;
        for (double w : weights) s += w * quantile(rng.uniform01());
        (*sample)[j] = s;
    }
    std::sort(sample->begin(), sample->end());
    auto cdf = [sample](double x) {
        const auto k = std::upper_bound(sample->begin(), sample->end(), x) - sample->begin();
        return static_cast<double>(k) / static_cast<double>(sample->size());
    };
    return custom(std::move(label), std::move(quantile), std::move(cdf), std::move(weights));
}

combiner_spec combiner_spec::by_name(const std::string& name, std::vector<double> weights) {
    std::string n;
    for (char c : name) n += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (n == "stouffer") return stouffer(std::move(weights));
    if (n == "fisher") return fisher(std::move(weights));
    if (n == "de" || n == "double_exponential" || n == "laplace") return double_exponential(std::move(weights));
    throw input_error("unknown combiner '" + name + "' (stouffer, fisher, de)");
}

std::string combiner_spec::name() const { return method == combiner_method::custom ? label : to_string(method); }

bool combiner_spec::unit_weights() const {
    return std::all_of(weights.begin(), weights.end(), [](double w) { return w == 1.0; });
}

double combine_values(std::span<const double> p, const combiner_spec& spec) {
    const std::size_t m = p.size();
    if (m == 0) throw input_error("nothing to combine");
    if (!spec.weights.empty() && spec.weights.size() != m)
        throw input_error("combiner has " + std::to_string(spec.weights.size()) + " weights for " + std::to_string(m) +
                          " p-values");
    for (double v : p)
        if (!(v >= 0.0 && v <= 1.0)) throw input_error("p-values to combine must lie in [0, 1]");
    auto weight = [&](std::size_t i) { return spec.weights.empty() ? 1.0 : spec.weights[i]; };
    if (m == 1) {
        if (weight(0) <= 0.0) throw input_error("combiner weights are all zero");
        return p[0];
    }
    auto clipped = [&](std::size_t i) { return std::clamp(p[i], p_clip, 1.0 - p_clip); };

    switch (spec.method) {
        case combiner_method::stouffer: {
            double s = 0.0, ss = 0.0;
            for (std::size_t i = 0; i < m; ++i) {
                s += weight(i) * normal_quantile(clipped(i));
                ss += weight(i) * weight(i);
            }
            return normal_cdf(s / std::sqrt(ss));
        }
        case combiner_method::fisher: {
            if (!spec.unit_weights()) throw input_error("the fisher combiner takes unit weights only");
            double x = 0.0;
            for (std::size_t i = 0; i < m; ++i) x -= 2.0 * std::log(clipped(i));
            return chisq_upper(2.0 * static_cast<double>(m), x);
        }
        case combiner_method::double_exponential: {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += weight(i) * laplace_quantile(clipped(i));
            if (spec.weights.empty()) return laplace_sum_cdf(m, s);
            return laplace_sum_cdf(std::span<const double>(spec.weights), s);
        }
        case combiner_method::custom: {
            if (!spec.quantile || !spec.reference_cdf)
                throw input_error("custom combiner '" + spec.label + "' lacks a quantile or reference CDF");
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += weight(i) * spec.quantile(clipped(i));
            return std::clamp(spec.reference_cdf(s), 0.0, 1.0);
        }
    }
    return 0.0;
}

combined_pvalue_function::combined_pvalue_function(std::vector<pvalue_step_function> components,
                                                   combiner_spec spec)
    : components_(std::move(components)), spec_(std::move(spec)) {
    if (components_.empty()) throw input_error("nothing to combine");
    side_ = components_.front().side();
    for (const auto& f : components_)
        if (f.side() != side_) throw input_error("combined functions must share one side");
    for (const auto& f : components_) points_.insert(points_.end(), f.breakpoints().begin(), f.breakpoints().end());
    std::sort(points_.begin(), points_.end());
    points_.erase(std::unique(points_.begin(), points_.end()), points_.end());

    const std::size_t m = components_.size();
    std::vector<std::size_t> cursor(m, 0);  // component segment index
    std::vector<double> p(m);
    values_.resize(points_.size() + 1);
    for (std::size_t j = 0; j < values_.size(); ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            const auto& f = components_[i];
            if (j > 0)
                while (cursor[i] < f.breakpoints().size() && f.breakpoints()[cursor[i]] <= points_[j - 1]) ++cursor[i];
            p[i] = f.segment_value(cursor[i]);
        }
        values_[j] = combine_values(p, spec_);
    }
}

double combined_pvalue_function::operator()(double theta) const {
    std::vector<double> p;
    p.reserve(components_.size());
    for (const auto& f : components_) p.push_back(f(theta));
    return combine_values(p, spec_);
}

double combined_pvalue_function::segment_start(std::size_t j) const noexcept {
    return j == 0 ? -inf : points_[j - 1];
}

combined_pvalue_function combine_functions(std::vector<pvalue_step_function> fs, const combiner_spec& spec) {
    return combined_pvalue_function(std::move(fs), spec);
}

double combined_two_sided(const combined_pvalue_function& l_plus, const combined_pvalue_function& u_plus,
                          double theta) {
    return std::min(1.0, 2.0 * std::min(l_plus(theta), 1.0 - u_plus(theta)));
}

confidence_interval combined_interval(const combined_pvalue_function& l_plus, const combined_pvalue_function& u_plus,
                                      double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw input_error("alpha must lie in (0, 1)");
    if (l_plus.side() != curve_side::l_plus || u_plus.side() != curve_side::u_plus)
        throw input_error("combined interval needs Lplus and Uplus combinations");
    confidence_interval ci;
    ci.alpha1 = ci.alpha2 = alpha / 2;
    ci.method = interval_method::proposed;
    ci.lower = ci.upper = inf;
    for (std::size_t j = 0; j < l_plus.n_segments(); ++j)
        if (l_plus.segment_value(j) > alpha / 2) {
            ci.lower = l_plus.segment_start(j);
            break;
        }
    for (std::size_t j = 0; j < u_plus.n_segments(); ++j)
        if (1.0 - u_plus.segment_value(j) <= alpha / 2) {
            ci.upper = u_plus.segment_start(j);
            break;
        }
    if (ci.lower > ci.upper) throw level_too_high_error("combined interval has lower > upper");
    return ci;
}

combined_result combine_step_functions(const std::vector<step_function_set>& sets, const combiner_spec& spec,
                                       double alpha) {
    if (sets.empty()) throw input_error("no experiments to combine");
    combined_result out;
    out.spec = spec;
    std::vector<pvalue_step_function> lp, up;
    for (const auto& s : sets) {
        out.individual.push_back(proposed_interval(s.l_plus, s.l_minus, alpha / 2, alpha / 2));
        out.t_obs.push_back(s.t_obs);
        lp.push_back(s.l_plus);
        up.push_back(s.u_plus);
    }
    if (sets.size() == 1) {
        // The combination is the identity; reuse Lminus directly so the
        // answer is bit-identical to the single-experiment interval.
        out.combined = out.individual.front();
        return out;
    }
    out.combined = combined_interval(combine_functions(std::move(lp), spec), combine_functions(std::move(up), spec),
                                     alpha);
    return out;
}

combined_result compute_combined_interval(const std::vector<experiment>& experiments, const statistic& stat,
                                          const combiner_spec& spec, double alpha, const build_options& opts) {
    std::vector<step_function_set> sets;
    for (const auto& e : experiments) {
        check_compatible(e.data, e.des);
        sets.push_back(build_step_functions(e.data, draw_assignments(e.des, e.mode), stat, opts));
    }
    return combine_step_functions(sets, spec, alpha);
}

}  // namespace frtcd
