#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "oracles.hpp"
#include "spdtest/samplers.hpp"
#include "spdtest/statistic.hpp"

using namespace spdtest;
using namespace spdtest::testing;

namespace {

NcwParams identity_params(std::size_t d, double nu, double omega_scale) {
    return NcwParams(nu, SpdMatrix::identity(d),
                     SpdMatrix::scaled_identity(d, omega_scale));
}

MatrixSample random_sample(std::size_t d, std::size_t n, RngStream& rng) {
    MatrixSample s;
    for (std::size_t k = 0; k < n; ++k) s.push_back(random_spd(d, rng));
    return s;
}

}  // namespace

TEST_CASE("kernel collapses exactly when all arguments coincide") {
    RngStream rng(201, 0);
    const SpdMatrix a = random_spd(2, rng);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    CHECK(kernel_psi(a, a, a, a, p) == 0.0);
}

TEST_CASE("kernel pair swaps are exact") {
    RngStream rng(202, 0);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    for (int rep = 0; rep < 10; ++rep) {
        const SpdMatrix xi = random_spd(2, rng), xj = random_spd(2, rng);
        const SpdMatrix yk = random_spd(2, rng), yl = random_spd(2, rng);
        const double v = kernel_psi(xi, xj, yk, yl, p);
        CHECK(v == kernel_psi(xj, xi, yk, yl, p));
        CHECK(v == kernel_psi(xi, xj, yl, yk, p));
    }
}

TEST_CASE("scalar kernel value") {
    // d=1, nu=1, sigma=1, omega=0, Xi=Xj=0, Yk=Yl=t:
    // Psi = 1 + 1/(1+4t) - 2/(1+2t); at t=0.5 this is 1/3.
    const NcwParams p(1.0, scalar_spd(1.0), SpdMatrix::scaled_identity(1, 0.0));
    const SpdMatrix zero = SpdMatrix::scaled_identity(1, 0.0);
    const SpdMatrix t = scalar_spd(0.5);
    CHECK(kernel_psi(zero, zero, t, t, p) == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("identical samples give a vanishing statistic") {
    RngStream rng(203, 0);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    const MatrixSample x = random_sample(2, 5, rng);
    CHECK(std::fabs(statistic_fast(x, x, p).raw) <= 1e-12);
    CHECK(std::fabs(statistic_reference(x, x, p).raw) <= 1e-12);
}

TEST_CASE("single-pair reduction") {
    RngStream rng(204, 0);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    const SpdMatrix a = random_spd(2, rng), b = random_spd(2, rng);
    MatrixSample x, y;
    x.push_back(a);
    y.push_back(b);
    LaplaceTransform lt(p);
    Matrix two_a = a.entries(), two_b = b.entries();
    two_a *= 2.0;
    two_b *= 2.0;
    const double expected = lt.value(two_a) + lt.value(two_b) -
                            2.0 * lt.value(a.entries() + b.entries());
    CHECK(statistic_reference(x, y, p).raw == doctest::Approx(expected).epsilon(1e-12));
    CHECK(statistic_fast(x, y, p).raw == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("reference and fast forms agree on randomized instances") {
    RngStream rng(205, 0);
    for (int rep = 0; rep < 50; ++rep) {
        const std::size_t d = 1 + rng.uniform_below(3);
        const std::size_t n1 = 1 + rng.uniform_below(6);
        const std::size_t n2 = 1 + rng.uniform_below(6);
        const double omega_scale = rng.uniform_below(2) == 0 ? 0.0 : 1.0;
        const NcwParams p = identity_params(d, 0.5 + 2.0 * rng.uniform01(), omega_scale);
        const MatrixSample x = random_sample(d, n1, rng);
        const MatrixSample y = random_sample(d, n2, rng);
        const double ref = statistic_reference(x, y, p).raw;
        const double fast = statistic_fast(x, y, p).raw;
        CHECK(std::fabs(ref - fast) <= 1e-10 * std::max(1.0, std::fabs(ref)));
        CHECK(fast >= -1e-12);  // integral of a square
    }
}

TEST_CASE("sample swap is bit-exact") {
    RngStream rng(206, 0);
    const NcwParams p = identity_params(3, 1.0, 1.0);
    const MatrixSample x = random_sample(3, 4, rng);
    const MatrixSample y = random_sample(3, 6, rng);
    const StatisticValue a = statistic_fast(x, y, p);
    const StatisticValue b = statistic_fast(y, x, p);
    CHECK(a.raw == b.raw);
    CHECK(a.scaled == b.scaled);
    CHECK(a.n1 == 4);
    CHECK(b.n1 == 6);
}

TEST_CASE("permutation within a sample is bit-exact") {
    RngStream rng(207, 0);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    const MatrixSample x = random_sample(2, 6, rng);
    const MatrixSample y = random_sample(2, 5, rng);
    const double base = statistic_fast(x, y, p).raw;

    std::vector<SpdMatrix> shuffled(x.items());
    for (std::size_t k = shuffled.size(); k > 1; --k)
        std::swap(shuffled[k - 1], shuffled[rng.uniform_below(k)]);
    CHECK(statistic_fast(MatrixSample(shuffled), y, p).raw == base);
}

TEST_CASE("duplicating both samples leaves the statistic unchanged") {
    RngStream rng(208, 0);
    const NcwParams p = identity_params(2, 1.0, 1.0);
    const MatrixSample x = random_sample(2, 4, rng);
    const MatrixSample y = random_sample(2, 3, rng);
    auto doubled = [](const MatrixSample& s) {
        MatrixSample out;
        for (const auto& m : s.items()) out.push_back(m);
        for (const auto& m : s.items()) out.push_back(m);
        return out;
    };
    const double base = statistic_fast(x, y, p).raw;
    const double dup = statistic_fast(doubled(x), doubled(y), p).raw;
    CHECK(std::fabs(base - dup) <= 1e-12);
}

TEST_CASE("scaled statistic") {
    StatisticValue v;
    v.raw = 0.0;
    v.n1 = 10;
    v.n2 = 20;
    CHECK(scaled_statistic(v) == 0.0);

    v.raw = 0.125;
    v.n1 = v.n2 = 8;
    CHECK(scaled_statistic(v) == doctest::Approx(0.5));  // (n/2) * raw

    v.raw = 0.00099;
    v.n1 = v.n2 = 100;
    CHECK(scaled_statistic(v) == doctest::Approx(0.0495));
}

TEST_CASE("statistic matches Monte Carlo integration over the measure") {
    // draw T from the weight measure and average (L1(T)-L2(T))^2 directly
    struct Instance {
        std::size_t d;
        unsigned two_nu;
        std::size_t n1, n2;
    };
    const Instance instances[] = {
        {1, 2, 2, 1}, {1, 1, 3, 2}, {2, 2, 2, 3}, {2, 4, 1, 2}, {1, 2, 4, 4}};
    int idx = 0;
    for (const auto& inst : instances) {
        RngStream rng(209, idx++);
        const SpdMatrix sigma = inst.d == 1 ? scalar_spd(1.0) : SpdMatrix::identity(2);
        std::vector<std::vector<double>> means;
        Matrix omega_m(inst.d, inst.d);
        for (unsigned i = 0; i < inst.two_nu; ++i) {
            std::vector<double> m(inst.d);
            for (double& v : m) v = 0.5 * rng.normal();
            means.push_back(m);
            for (std::size_t r = 0; r < inst.d; ++r)
                for (std::size_t c = 0; c < inst.d; ++c) omega_m(r, c) += m[r] * m[c];
        }
        const NcwParams p(0.5 * inst.two_nu, sigma,
                          validate_spd(omega_m, Definiteness::Psd));
        const MatrixSample x = random_sample(inst.d, inst.n1, rng);
        const MatrixSample y = random_sample(inst.d, inst.n2, rng);
        const double stat = statistic_fast(x, y, p).raw;

        const std::size_t reps = 200000;
        std::vector<double> sq(reps);
        for (double& v : sq) {
            const SpdMatrix t = sample_ncw(inst.two_nu, sigma, means, rng);
            const double diff = empirical_laplace(x, t) - empirical_laplace(y, t);
            v = diff * diff;
        }
        const auto est = mc_mean(sq);
        INFO("instance d=", inst.d, " two_nu=", inst.two_nu, " stat=", stat,
             " mc=", est.mean);
        CHECK(std::fabs(stat - est.mean) <= 3.0 * est.se);
    }
}

TEST_CASE("statistic input validation") {
    const NcwParams p = identity_params(2, 1.0, 1.0);
    RngStream rng(210, 0);
    const MatrixSample x = random_sample(2, 2, rng);
    CHECK_THROWS_AS(statistic_fast(MatrixSample{}, x, p), EmptySampleError);
    CHECK_THROWS_AS(statistic_fast(x, random_sample(3, 2, rng), p),
                    DimensionMismatchError);
}
