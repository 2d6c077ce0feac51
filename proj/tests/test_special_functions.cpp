#include "frtcd/error.hpp"
#include "frtcd/rng.hpp"
#include "frtcd/special_functions.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace frtcd;

TEST_CASE("normal quantile matches Boost.Math to 1e-12") {
    const boost::math::normal_distribution<double> n01;
    for (double p : {1e-15, 1e-10, 1e-6, 0.001, 0.02, 0.07, 0.2, 0.3, 0.4999, 0.5, 0.6, 0.925, 0.975, 0.999999,
                     1 - 1e-12}) {
        CAPTURE(p);
        CHECK(normal_quantile(p) == doctest::Approx(boost::math::quantile(n01, p)).epsilon(1e-12));
        CHECK(std::abs(normal_quantile(p) - boost::math::quantile(n01, p)) < 1e-12 * std::max(1.0, std::abs(normal_quantile(p))));
    }
    CHECK(normal_quantile(0.5) == 0.0);
}

TEST_CASE("normal quantile rejects the closed unit interval ends") {
    CHECK_THROWS_AS(normal_quantile(0.0), input_error);
    CHECK_THROWS_AS(normal_quantile(1.0), input_error);
    CHECK_THROWS_AS(normal_quantile(std::nan("")), input_error);
}

TEST_CASE("normal cdf matches Boost.Math and inverts the quantile") {
    const boost::math::normal_distribution<double> n01;
    for (double x = -8.0; x <= 8.0; x += 0.37) {
        CHECK(std::abs(normal_cdf(x) - boost::math::cdf(n01, x)) < 1e-12);
    }
    for (double p : {0.01, 0.3, 0.5, 0.77, 0.99}) CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-13));
}

TEST_CASE("upper incomplete gamma matches Boost.Math to 1e-10 relative") {
    for (double a : {0.5, 1.0, 2.0, 3.5, 10.0, 40.0}) {
        for (double x : {0.01, 0.5, 1.0, 2.5, 5.0, 12.0, 30.0, 60.0}) {
            const double expect = boost::math::gamma_q(a, x);
            CAPTURE(a);
            CAPTURE(x);
            CHECK(std::abs(gamma_q(a, x) - expect) <= 1e-10 * expect + 1e-300);
        }
    }
    CHECK(gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("chi-square survival against the df=4 closed form") {
    // P(chi2_4 >= x) = (1 + x/2) exp(-x/2)
    for (double x : {0.1, 1.0, 4.0, 7.824046, 15.0, 40.0}) {
        const double closed = (1 + x / 2) * std::exp(-x / 2);
        CHECK(chisq_upper(4, x) == doctest::Approx(closed).epsilon(1e-12));
    }
    CHECK(chisq_upper(4, 7.824046) == doctest::Approx(0.098241).epsilon(1e-5));
    const boost::math::chi_squared_distribution<double> c6(6);
    CHECK(chisq_upper(6, 9.3) == doctest::Approx(boost::math::cdf(boost::math::complement(c6, 9.3))).epsilon(1e-10));
    CHECK(chisq_upper(4, 0.0) == 1.0);
}

TEST_CASE("Laplace sum CDF for one term is the Laplace CDF") {
    CHECK(laplace_sum_cdf(1, 0.0) == 0.5);
    CHECK(laplace_sum_cdf(1, -1.0) == doctest::Approx(0.5 * std::exp(-1.0)));
    CHECK(laplace_sum_cdf(1, 2.0) == doctest::Approx(1 - 0.5 * std::exp(-2.0)));
}

TEST_CASE("Laplace sum CDF for two terms against its closed form") {
    // Density (1 + |x|) e^{-|x|} / 4, so F(x) = e^x (2 - x) / 4 for x < 0.
    auto closed = [](double x) { return x < 0 ? std::exp(x) * (2 - x) / 4 : 1 - std::exp(-x) * (2 + x) / 4; };
    double worst = 0.0;
    for (double x = -20.0; x <= 20.0; x += 0.0731) worst = std::max(worst, std::abs(laplace_sum_cdf(2, x) - closed(x)));
    CHECK(worst < 1e-6);
    CHECK(laplace_sum_cdf(2, 0.0) == doctest::Approx(0.5).epsilon(1e-9));
}

TEST_CASE("Laplace sum CDF is symmetric, monotone and has unit mass") {
    for (std::size_t m : {3u, 5u}) {
        double prev = 0.0;
        for (double x = -40.0; x <= 40.0; x += 0.25) {
            const double f = laplace_sum_cdf(m, x);
            CHECK(f >= prev);
            CHECK(f + laplace_sum_cdf(m, -x) == doctest::Approx(1.0).epsilon(1e-7));
            prev = f;
        }
        CHECK(laplace_sum_cdf(m, -200.0) < 1e-12);
        CHECK(laplace_sum_cdf(m, 200.0) > 1 - 1e-12);
    }
}

TEST_CASE("weighted Laplace sum against a seeded Monte Carlo oracle") {
    const std::vector<double> scales{0.5, 2.0};
    const std::size_t draws = 400000;
    std::vector<double> sample(draws);
    for (std::size_t j = 0; j < draws; ++j) {
        counter_rng rng(99, j);
        double s = 0.0;
        for (double w : scales) {
            const double u = rng.uniform01();
            s += w * (u <= 0.5 ? std::log(2 * u) : -std::log(2 * (1 - u)));
        }
        sample[j] = s;
    }
    std::sort(sample.begin(), sample.end());
    for (double x : {-6.0, -2.0, -0.5, 0.0, 1.0, 3.0, 7.0}) {
        const double emp = static_cast<double>(std::upper_bound(sample.begin(), sample.end(), x) - sample.begin()) / draws;
        CHECK(std::abs(laplace_sum_cdf(scales, x) - emp) < 4e-3);
    }
}

TEST_CASE("Laplace sum with equal scales equals the unweighted table") {
    const std::vector<double> ones{1.0, 1.0, 1.0};
    for (double x : {-3.0, 0.2, 4.0}) CHECK(laplace_sum_cdf(ones, x) == laplace_sum_cdf(3, x));
    CHECK_THROWS_AS(laplace_sum_cdf(0, 1.0), input_error);
}
