#include <doctest.h>

#include <cmath>
#include <vector>

#include "oracles.hpp"
#include "spdtest/rng.hpp"

using namespace spdtest;
using namespace spdtest::testing;

TEST_CASE("streams replay exactly and differ across ids") {
    RngStream a(42, 7), b(42, 7), c(42, 8);
    bool all_equal = true, any_equal_to_c = false;
    for (int i = 0; i < 100; ++i) {
        const auto va = a.next_u64();
        all_equal = all_equal && va == b.next_u64();
        any_equal_to_c = any_equal_to_c || va == c.next_u64();
    }
    CHECK(all_equal);
    CHECK_FALSE(any_equal_to_c);
}

TEST_CASE("uniform01 stays in [0,1)") {
    RngStream rng(1, 0);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform01();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("uniform_below covers the range without excess") {
    RngStream rng(5, 0);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 7000; ++i) ++counts[rng.uniform_below(7)];
    for (int k = 0; k < 7; ++k) CHECK(counts[k] > 700);  // ~1000 expected
}

TEST_CASE("normal moments") {
    RngStream rng(2, 0);
    std::vector<double> xs(100000);
    for (double& x : xs) x = rng.normal();
    const auto est = mc_mean(xs);
    CHECK(std::fabs(est.mean) < 4.0 * est.se);
    double m2 = 0.0;
    for (double x : xs) m2 += x * x;
    CHECK(m2 / static_cast<double>(xs.size()) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("gamma and chi-square moments") {
    RngStream rng(3, 0);
    // Gamma(shape, scale): mean shape*scale, variance shape*scale^2
    for (double shape : {0.25, 1.0, 3.5}) {
        std::vector<double> xs(100000);
        for (double& x : xs) x = rng.gamma(shape, 2.0);
        const auto est = mc_mean(xs);
        CHECK(est.mean == doctest::Approx(shape * 2.0).epsilon(0.03));
    }
    std::vector<double> chi(100000);
    for (double& x : chi) x = rng.chi_square(2.5);
    CHECK(mc_mean(chi).mean == doctest::Approx(2.5).epsilon(0.03));
    for (double x : chi) {
        CHECK(x > 0.0);
        break;
    }
}
