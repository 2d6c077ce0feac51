#pragma once

#include "frtcd/combine.hpp"
#include "frtcd/design.hpp"
#include "frtcd/inversion.hpp"
#include "frtcd/randomization.hpp"
#include "frtcd/statistics.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace frtcd {

/// Full potential-outcome table with a constant unit effect theta.
struct population {
    std::vector<double> y0;
    std::vector<double> y1;
    double theta = 0.0;

    std::size_t size() const noexcept { return y0.size(); }
    /// Throws input_error unless y1 - y0 == theta for every unit (to rounding).
    void validate() const;
};

/// Y(0) iid lognormal(0, 1) via exp of seeded normals, Y(1) = Y(0) + true_theta.
population generate_population(std::size_t n, double true_theta, std::uint64_t seed);

/// The observed data an assignment reveals.
observed_data realize(const population& pop, std::span<const std::uint8_t> w);

struct scenario_config {
    std::string name = "scenario";
    design design1 = design::completely_randomized(16, 8);
    design design2 = design::completely_randomized(16, 8);
    double true_theta = 1.0;
    std::size_t reps = 500;
    std::uint64_t k_cap = 5000;
    double alpha = 0.05;
    std::vector<std::string> combiners{"fisher", "de"};
    std::uint64_t master_seed = 20240611;
    std::string statistic = "diff_means";
    std::size_t self_check_samples = 100;
};

struct arm_summary {
    std::string name;
    std::size_t reps = 0;
    std::size_t covered = 0;
    std::size_t unbounded = 0;  // reps with an infinite endpoint, left out of the width moments
    double coverage = 0.0;
    double width_mean = 0.0;
    double width_sd = 0.0;
};

struct scenario_result {
    std::string name;
    std::string mode1;
    std::string mode2;
    std::vector<arm_summary> arms;  // exp1, exp2, then one per combiner

    const arm_summary& arm(const std::string& name) const;
};

/// Per rep: fresh populations and observed assignments from (master_seed, rep),
/// exact enumeration when total <= k_cap else k_cap Monte Carlo draws,
/// individual proposed intervals at alpha/2 per tail and combined intervals.
scenario_result run_scenario(const scenario_config& config);

struct audit_row {
    double alpha = 0.0;
    std::uint64_t proposed_covered = 0;
    std::uint64_t traditional_covered = 0;
    std::uint64_t total = 0;
    double proposed_coverage = 0.0;
    double traditional_coverage = 0.0;
    bool proposed_valid = false;  // covered / total >= 1 - alpha, exactly
};

struct audit_report {
    double theta0 = 0.0;
    dominance_profile dominance;
    bool dominance_ok = false;
    bool gamma_bound_ok = false;  // max discrepancy of the L kinds <= gamma*
    std::vector<audit_row> rows;
};

/// Treats each assignment in turn as the observed one: exact law of the
/// p-values at the true theta, and exact coverage of proposed and
/// traditional intervals for each alpha.
audit_report exact_validity_audit(const population& pop, const design& d, const statistic& stat,
                                  const std::vector<double>& alphas, std::uint64_t cap = default_enumeration_cap);

namespace fixtures {

/// Ten units, CRD(10,5), true effect 1.
population toy_population();
observed_data toy_data();
design toy_design();

/// Eight units, CRD(8,4), true effect 1; the studentized statistic is not
/// monotone in theta on this dataset.
population studentized_population();
observed_data studentized_data();
design studentized_design();

/// Fifteen units with zero effect: six (0,0), six (1,1), three (2,2).
population discrete_population();

}  // namespace fixtures

}  // namespace frtcd
