#include "frtcd/special_functions.hpp"

#include "frtcd/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>

namespace frtcd {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw input_error("normal_quantile needs 0 < p < 1");
    const double q = p - 0.5;
    if (std::abs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        const double num =
            ((((((2509.0809287301226727 * r + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608;
        const double den =
            ((((((5226.495278852545925 * r + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0;
        return q * num / den;
    }
    double r = q < 0.0 ? p : 1.0 - p;
    r = std::sqrt(-std::log(r));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        const double num =
            ((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
             4.6303378461565452959) * r + 1.42343711074968357734;
        const double den =
            ((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
             2.05319162663775882187) * r + 1.0;
        val = num / den;
    } else {
        r -= 5.0;
        const double num =
            ((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
             5.4637849111641143699) * r + 6.6579046435011037772;
        const double den =
            ((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
             0.59983220655588793769) * r + 1.0;
        val = num / den;
    }
    return q < 0.0 ? -val : val;
}

namespace {

// Lower regularized gamma P(a, x) by its power series; converges fast for x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 10000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-17) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by Lentz's continued fraction; for x >= a + 1.
double gamma_q_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 10000; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || std::isnan(x) || x < 0.0) throw input_error("gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_fraction(a, x);
}

double chisq_upper(double df, double x) {
    if (!(df > 0.0)) throw input_error("chi-square degrees of freedom must be positive");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * df, 0.5 * x);
}

namespace {

double laplace_cdf(double x, double s) {
    return x < 0.0 ? 0.5 * std::exp(x / s) : 1.0 - 0.5 * std::exp(-x / s);
}

}  // namespace

laplace_sum_table::laplace_sum_table(std::vector<double> scales) {
    std::erase_if(scales, [](double s) { return s == 0.0; });
    if (scales.empty()) throw input_error("Laplace sum needs at least one positive scale");
    for (double s : scales)
        if (!(s > 0.0) || !std::isfinite(s)) throw input_error("Laplace scales must be positive and finite");
    const double smax = *std::max_element(scales.begin(), scales.end());
    const double half_width = smax * (30.0 + 3.0 * static_cast<double>(scales.size()));
    step_ = 1e-3 * smax;
    lower_ = -half_width;
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * half_width / step_)) + 1;
    cdf_.resize(n);
    for (std::size_t k = 0; k < n; ++k) cdf_[k] = laplace_cdf(lower_ + step_ * static_cast<double>(k), scales[0]);

    std::vector<double> left(n), right(n);
    for (std::size_t m = 1; m < scales.size(); ++m) {
        // G = F * Laplace(s): the kernel splits into a left-looking and a
        // right-looking exponential, each integrated exactly against the
        // linear interpolant of F between grid points.
        const double s = scales[m];
        const double r = step_ / s;
        const double e = std::exp(-r);
        const double c0 = -std::expm1(-r);
        const double c1 = (1.0 - (1.0 + r) * e) / r;
        left[0] = cdf_[0];
        for (std::size_t k = 1; k < n; ++k) left[k] = cdf_[k] * (c0 - c1) + cdf_[k - 1] * c1 + e * left[k - 1];
        right[n - 1] = cdf_[n - 1];
        for (std::size_t k = n - 1; k-- > 0;) right[k] = cdf_[k] * (c0 - c1) + cdf_[k + 1] * c1 + e * right[k + 1];
        for (std::size_t k = 0; k < n; ++k) cdf_[k] = std::clamp(0.5 * (left[k] + right[k]), 0.0, 1.0);
    }
    // Rounding can leave tiny inversions; the CDF must be monotone.
    for (std::size_t k = 1; k < n; ++k) cdf_[k] = std::max(cdf_[k], cdf_[k - 1]);
}

double laplace_sum_table::cdf(double x) const {
    if (std::isnan(x)) throw input_error("laplace_sum_cdf at NaN");
    const double pos = (x - lower_) / step_;
    if (pos <= 0.0) return cdf_.front();
    if (pos >= static_cast<double>(cdf_.size() - 1)) return cdf_.back();
    const auto k = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(k);
    return cdf_[k] + frac * (cdf_[k + 1] - cdf_[k]);
}

namespace {

std::shared_ptr<const laplace_sum_table> cached_table(std::vector<double> scales) {
    static std::shared_mutex mutex;
    static std::map<std::vector<double>, std::shared_ptr<const laplace_sum_table>> cache;
    std::sort(scales.begin(), scales.end());
    {
        std::shared_lock lock(mutex);
        if (auto it = cache.find(scales); it != cache.end()) return it->second;
    }
    auto table = std::make_shared<const laplace_sum_table>(scales);
    std::unique_lock lock(mutex);
    return cache.try_emplace(std::move(scales), std::move(table)).first->second;
}

}  // namespace

double laplace_sum_cdf(std::size_t m, double x) {
    if (m == 0) throw input_error("laplace_sum_cdf needs M >= 1");
    if (m == 1) return laplace_cdf(x, 1.0);
    return cached_table(std::vector<double>(m, 1.0))->cdf(x);
}

double laplace_sum_cdf(std::span<const double> scales, double x) {
    std::vector<double> s;
    for (double v : scales)
        if (v != 0.0) s.push_back(std::abs(v));
    if (s.empty()) throw input_error("Laplace sum needs at least one nonzero scale");
    if (s.size() == 1) return laplace_cdf(x, s[0]);
    return cached_table(std::move(s))->cdf(x);
}

}  // namespace frtcd
