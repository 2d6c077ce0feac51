#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace frtcd {

double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura AS 241). Throws input_error unless
/// 0 < p < 1.
double normal_quantile(double p);

/// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

/// P(chi^2_df >= x).
double chisq_upper(double df, double x);

/// CDF at x of the sum of M iid standard Laplace variables.
double laplace_sum_cdf(std::size_t m, double x);

/// CDF at x of sum_i s_i * L_i with L_i iid standard Laplace and scales s_i
/// (zero scales are dropped). Tables are built once per scale vector and
/// cached process-wide.
double laplace_sum_cdf(std::span<const double> scales, double x);

/// Grid table for the distribution of a weighted Laplace sum. Built by
/// repeated convolution of a CDF with a Laplace density, each done as two
/// one-sided exponential filters over a piecewise-linear interpolant.
class laplace_sum_table {
   public:
    explicit laplace_sum_table(std::vector<double> scales);

    double cdf(double x) const;
    double lower() const noexcept { return lower_; }
    double upper() const noexcept { return lower_ + step_ * static_cast<double>(cdf_.size() - 1); }
    double step() const noexcept { return step_; }

   private:
    double lower_ = 0.0;
    double step_ = 0.0;
    std::vector<double> cdf_;
};

}  // namespace frtcd
