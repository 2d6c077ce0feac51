#include "frtcd/error.hpp"
#include "frtcd/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace frtcd;

TEST_CASE("generated populations") {
    const population p = generate_population(2000, 1.5, 42);
    CHECK(p.size() == 2000);
    CHECK_NOTHROW(p.validate());
    double log_mean = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        CHECK(p.y0[i] > 0.0);
        CHECK(p.y1[i] == p.y0[i] + 1.5);
        log_mean += std::log(p.y0[i]);
    }
    CHECK(std::abs(log_mean / 2000) < 0.1);
    const population q = generate_population(2000, 1.5, 42);
    CHECK(q.y0 == p.y0);
    CHECK(generate_population(5, 0.0, 43).y0 != generate_population(5, 0.0, 42).y0);
    CHECK_THROWS_AS(generate_population(1, 1.0, 1), input_error);
}

TEST_CASE("population validation and realization") {
    population bad{{1.0, 2.0}, {2.0, 2.5}, 1.0};
    CHECK_THROWS_AS(bad.validate(), input_error);
    const population pop = fixtures::toy_population();
    CHECK_NOTHROW(pop.validate());
    const std::vector<std::uint8_t> w{0, 1, 0, 0, 0, 1, 1, 1, 0, 1};
    const auto d = realize(pop, w);
    for (std::size_t i = 0; i < 10; ++i) CHECK(d.y_obs[i] == (w[i] ? pop.y1[i] : pop.y0[i]));
    CHECK_THROWS_AS(realize(pop, std::vector<std::uint8_t>{1, 0}), input_error);
}

TEST_CASE("fixtures") {
    const population disc = fixtures::discrete_population();
    CHECK(disc.size() == 15);
    CHECK(std::count(disc.y0.begin(), disc.y0.end(), 0.0) == 6);
    CHECK(std::count(disc.y0.begin(), disc.y0.end(), 2.0) == 3);
    CHECK(disc.y0 == disc.y1);
    CHECK(fixtures::toy_data().unit_ids.size() == 10);
    CHECK(fixtures::studentized_design().n_units() == 8);
}

TEST_CASE("scenario runs are deterministic and sized as configured") {
    scenario_config cfg;
    cfg.design1 = design::completely_randomized(8, 4);
    cfg.design2 = design::balanced_blocks(2, 4);
    cfg.reps = 12;
    cfg.k_cap = 100;
    cfg.combiners = {"fisher", "de", "stouffer"};
    const auto a = run_scenario(cfg);
    const auto b = run_scenario(cfg);
    REQUIRE(a.arms.size() == 5);
    CHECK(a.mode1 == "exact");  // 70 assignments
    CHECK(a.mode2 == "exact");  // 36 assignments
    for (std::size_t i = 0; i < a.arms.size(); ++i) {
        CHECK(a.arms[i].reps == 12);
        CHECK(a.arms[i].covered == b.arms[i].covered);
        CHECK(a.arms[i].width_mean == b.arms[i].width_mean);
        CHECK(a.arms[i].coverage == static_cast<double>(a.arms[i].covered) / 12);
    }
    CHECK(a.arm("exp1").name == "exp1");
    CHECK(a.arm("double_exponential").reps == 12);
    CHECK_THROWS_AS(a.arm("nope"), input_error);

    cfg.k_cap = 50;
    const auto c = run_scenario(cfg);
    CHECK(c.mode1 == "mc");
    CHECK(c.mode2 == "exact");
}

TEST_CASE("one rep and a shifted effect") {
    scenario_config cfg;
    cfg.design1 = cfg.design2 = design::completely_randomized(8, 4);
    cfg.reps = 1;
    cfg.combiners = {"fisher"};
    const auto r = run_scenario(cfg);
    CHECK(r.arms.size() == 3);
    for (const auto& a : r.arms) CHECK((a.coverage == 0.0 || a.coverage == 1.0));
    CHECK_THROWS_AS(
        [] {
            scenario_config z;
            z.reps = 0;
            run_scenario(z);
        }(),
        input_error);
}

TEST_CASE("exact audit on the discrete population") {
    const auto report = exact_validity_audit(fixtures::discrete_population(), design::completely_randomized(15, 7),
                                             statistic::diff_means(), {0.05});
    REQUIRE(report.rows.size() == 1);
    const auto& row = report.rows[0];
    CHECK(row.total == 6435);
    CHECK(row.proposed_valid);
    CHECK(row.proposed_coverage >= 0.95);
    CHECK(row.traditional_coverage < row.proposed_coverage);
    CHECK(report.dominance_ok);
    CHECK(report.gamma_bound_ok);
}

TEST_CASE("exact audit on the toy population") {
    const auto report = exact_validity_audit(fixtures::toy_population(), fixtures::toy_design(),
                                             statistic::diff_means(), {0.05, 0.1, 0.2, 0.5});
    for (const auto& row : report.rows) {
        CAPTURE(row.alpha);
        CHECK(row.proposed_valid);
        CHECK(row.proposed_coverage >= 1 - row.alpha);
    }
    CHECK(report.dominance.gamma_star == doctest::Approx(2.0 / 252));
}

TEST_CASE("constant outcomes are always covered") {
    population pop{std::vector<double>(8, 3.0), std::vector<double>(8, 3.0), 0.0};
    const auto report = exact_validity_audit(pop, design::completely_randomized(8, 4), statistic::diff_means(), {0.05, 0.5});
    for (const auto& row : report.rows) {
        CHECK(row.proposed_covered == row.total);
        CHECK(row.proposed_coverage == 1.0);
    }
    // Every replicate ties with T_obs: the L kinds are 1 and the strict U kinds 0.
    for (const auto& law : report.dominance.laws) {
        const bool lower = law.kind == pvalue_kind::l_plus || law.kind == pvalue_kind::l_minus;
        CHECK(law.level_counts == std::vector<std::uint64_t>{lower ? law.total : 0});
    }
}

TEST_CASE("scaling outcomes scales the interval") {
    const auto d = fixtures::toy_design();
    const auto base = fixtures::toy_data();
    const auto ci = compute_confidence_interval(base, d, statistic::diff_means(), 0.025, 0.025, run_mode::exact());
    for (double c : {10.0, 0.5, 3.0}) {
        observed_data scaled = base;
        for (double& y : scaled.y_obs) y *= c;
        const auto s = compute_confidence_interval(scaled, d, statistic::diff_means(), 0.025, 0.025, run_mode::exact());
        CAPTURE(c);
        CHECK(s.lower == doctest::Approx(c * ci.lower).epsilon(1e-9));
        CHECK(s.upper == doctest::Approx(c * ci.upper).epsilon(1e-9));
    }
}

TEST_CASE("zero effect gives identical potential outcomes") {
    const population p = generate_population(50, 0.0, 9);
    CHECK(p.y0 == p.y1);
    for (double y : p.y0) CHECK(y > 0.0);
}
