#include "frtcd/error.hpp"
#include "frtcd/mc_planner.hpp"
#include "frtcd/simulation.hpp"

#include <doctest.h>

#include <cmath>

using namespace frtcd;

TEST_CASE("threshold table") {
    const std::vector<std::uint64_t> expect{4794, 19173, 119830, 479318, 1917269, 11982930, 47931717};
    const auto& eps = default_epsilons();
    REQUIRE(eps.size() == expect.size());
    for (std::size_t i = 0; i < eps.size(); ++i) {
        CAPTURE(eps[i]);
        CHECK(required_k(eps[i], 0.01) == expect[i]);
    }
}

TEST_CASE("required K is the smallest K meeting the bound") {
    for (double eps : {0.3, 0.1, 0.07, 0.05, 0.013, 0.004}) {
        for (double delta : {0.2, 0.05, 0.01, 0.001}) {
            const auto k = required_k(eps, delta);
            CAPTURE(eps);
            CAPTURE(delta);
            CHECK(error_bound(k, eps) <= delta * (1 + 1e-9));
            if (k > 1) CHECK(error_bound(k - 1, eps) > delta);
        }
    }
    // Independent count: 8 ln(4 / 0.5) / 1 = 16.63..., so 17.
    CHECK(required_k(1.0, 0.5) == 17);
}

TEST_CASE("error bound") {
    CHECK(error_bound(4794, 0.1) <= 0.01);
    CHECK(error_bound(4793, 0.1) > 0.01);
    CHECK(error_bound(1, 0.01) == 1.0);
    CHECK(error_bound(1, 100.0) == doctest::Approx(4 * std::exp(-10000.0 / 8)));
    CHECK_THROWS_AS(error_bound(0, 0.1), input_error);
    CHECK_THROWS_AS(error_bound(10, 0.0), input_error);
    CHECK_THROWS_AS(required_k(0.1, 1.0), input_error);
    CHECK_THROWS_AS(required_k(1.5, 0.01), input_error);
}

TEST_CASE("enumerate or sample") {
    const auto toy = plan(design::completely_randomized(10, 5), 0.1, 0.01);
    CHECK(toy.how == mc_plan::strategy::enumerate);
    CHECK(toy.draws() == 252);
    CHECK(toy.describe() == "enumerate(252)");
    const auto big = plan(design::completely_randomized(30, 15), 0.1, 0.01);
    CHECK(big.how == mc_plan::strategy::sample);
    CHECK(big.draws() == 4794);
    CHECK(big.total == 155117520);
    CHECK(plan(design::completely_randomized(2, 1), 0.5, 0.3).how == mc_plan::strategy::enumerate);
    CHECK(plan(design::completely_randomized(100, 50), 0.1, 0.01).how == mc_plan::strategy::sample);
}

TEST_CASE("sup distance on step functions") {
    const pvalue_step_function f(curve_side::l_plus, {0.0, 1.0, 2.0}, 1, 4, true);
    const pvalue_step_function g(curve_side::l_plus, {0.5, 1.0, 2.5}, 1, 4, false);
    // On [0, 0.5) f = 2/4 and g = 1/4; on [2, 2.5) f = 1 and g = 3/4.
    CHECK(sup_distance(f, g) == 0.25);
    CHECK(sup_distance(f, f) == 0.0);
    const pvalue_step_function h(curve_side::l_plus, {-1.0}, 0, 2, false);
    CHECK(sup_distance(f, h) == 0.5);
    CHECK_THROWS_AS(sup_distance(f, pvalue_step_function(curve_side::l_minus, {0.0}, 0, 1, true)), input_error);
}

TEST_CASE("sampled p-value function concentrates around the exact one") {
    const observed_data toy = fixtures::toy_data();
    const design d = fixtures::toy_design();
    const auto exact = build_step_function(toy, d, statistic::diff_means(), curve_side::l_plus, run_mode::exact());
    std::size_t exceed = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto mc = build_step_function(toy, d, statistic::diff_means(), curve_side::l_plus,
                                            run_mode::monte_carlo(4794, seed));
        exceed += sup_distance(exact, mc) > 0.1;
    }
    CHECK(exceed == 0);
}
