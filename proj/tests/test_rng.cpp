#include "frtcd/rng.hpp"

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

using namespace frtcd;

TEST_CASE("counter generator is a pure function of seed, stream and position") {
    counter_rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
    for (int i = 0; i < 10; ++i) {
        const auto x = a();
        CHECK(x == b());
        CHECK(x != c());
        CHECK(x != d());
    }
}

TEST_CASE("uniform_below stays in range and covers it evenly") {
    counter_rng rng(1, 0);
    std::vector<int> hist(7, 0);
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.uniform_below(7);
        REQUIRE(v < 7);
        ++hist[v];
    }
    for (int h : hist) CHECK(std::abs(h - 10000) < 500);
    CHECK(rng.uniform_below(1) == 0);
}

TEST_CASE("uniform01 lies strictly inside (0, 1)") {
    counter_rng rng(3, 3);
    double lo = 1.0, hi = 0.0, sum = 0.0;
    for (int i = 0; i < 100000; ++i) {
        const double u = rng.uniform01();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo > 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100000 == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("normal draws have standard moments and quantiles") {
    counter_rng rng(11, 0);
    std::vector<double> x(200000);
    for (auto& v : x) v = rng.normal();
    double m = 0.0, ss = 0.0;
    for (double v : x) m += v;
    m /= x.size();
    for (double v : x) ss += (v - m) * (v - m);
    CHECK(std::abs(m) < 0.01);
    CHECK(std::sqrt(ss / (x.size() - 1)) == doctest::Approx(1.0).epsilon(0.01));
    std::sort(x.begin(), x.end());
    const boost::math::normal_distribution<double> n01;
    for (double p : {0.05, 0.5, 0.9}) CHECK(std::abs(x[static_cast<std::size_t>(p * x.size())] - boost::math::quantile(n01, p)) < 0.02);
}

TEST_CASE("derived seeds separate indices") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 9) == derive_seed(5, 9));
}
