#pragma once

#include "frtcd/design.hpp"
#include "frtcd/inversion.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace frtcd {

/// min(1, 4 exp(-K eps^2 / 8)): bound on P(sup_theta |p_hat_K - p| > eps).
double error_bound(std::uint64_t k, double epsilon);

/// Smallest K with 4 exp(-K eps^2 / 8) <= delta.
std::uint64_t required_k(double epsilon, double delta);

struct mc_plan {
    enum class strategy { enumerate, sample };

    strategy how = strategy::enumerate;
    double epsilon = 0.0;
    double delta = 0.0;
    std::uint64_t k_threshold = 0;
    big_count total;

    /// Draws to take: total when enumerating, else k_threshold.
    std::uint64_t draws() const;
    std::string describe() const;
};

/// Enumerate when total_assignments <= required_k(eps, delta), else sample that many.
mc_plan plan(const design& d, double epsilon, double delta);

/// The epsilon list of the standard threshold table.
const std::vector<double>& default_epsilons();

/// sup_theta |f(theta) - g(theta)| for two step functions of the same side,
/// evaluated on every segment of the union of their breakpoints.
double sup_distance(const pvalue_step_function& f, const pvalue_step_function& g);

}  // namespace frtcd
