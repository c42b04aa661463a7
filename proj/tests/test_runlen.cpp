#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "monkey/numerics.hpp"
#include "monkey/rng.hpp"
#include "monkey/runlen.hpp"

using namespace monkey;
using Catch::Approx;

TEST_CASE("inverse-CDF sampling per kind", "[runlen]") {
    CHECK(RunLengthDistribution::deterministic(2.0).sample(0.7) == 2.0);
    CHECK(RunLengthDistribution::exponential(1.0).sample(0.5) ==
          Approx(0.69314718055994531).epsilon(1e-14));
    // geometric: smallest n with 1 - (1-q)^n >= u
    CHECK(RunLengthDistribution::geometric(0.5).sample(0.6) == 2.0);
    CHECK(RunLengthDistribution::geometric(0.5).sample(0.49) == 1.0);
    CHECK(RunLengthDistribution::uniform(1.0, 3.0).sample(0.25) == Approx(1.5));
    CHECK_THROWS_AS(RunLengthDistribution::exponential(1.0).sample(0.0), std::domain_error);
}

TEST_CASE("gamma sampling inverts the regularized incomplete gamma", "[runlen]") {
    for (double shape : {0.7, 2.0, 5.5}) {
        for (double u : {0.01, 0.2, 0.5, 0.9, 0.999}) {
            const double x = RunLengthDistribution::gamma(shape, 2.0).sample(u);
            CHECK(gamma_p(shape, 2.0 * x) == Approx(u).epsilon(1e-9));
        }
    }
}

TEST_CASE("exact moments", "[runlen]") {
    CHECK(RunLengthDistribution::exponential(1.0).moment(3) == Approx(6.0).epsilon(1e-14));
    CHECK(RunLengthDistribution::deterministic(3.0).moment(2) == Approx(9.0));
    CHECK(RunLengthDistribution::uniform(0.0, 1.0).moment(2) == Approx(1.0 / 3.0).epsilon(1e-14));
    CHECK(RunLengthDistribution::geometric(0.5).moment(1) == Approx(2.0).epsilon(1e-13));
    CHECK(RunLengthDistribution::geometric(0.5).moment(2) == Approx(6.0).epsilon(1e-13));
    CHECK(RunLengthDistribution::gamma(2.0, 3.0).moment(2) == Approx(6.0 / 9.0).epsilon(1e-14));
    CHECK_THROWS_AS(RunLengthDistribution::exponential(1.0).moment(13), std::domain_error);
    CHECK_THROWS_AS(RunLengthDistribution::exponential(1.0).moment(0), std::domain_error);
}

TEST_CASE("exponential-type transforms", "[runlen]") {
    CHECK(RunLengthDistribution::exponential(1.0).exp_laplace(1.0) == Approx(0.5).epsilon(1e-14));
    CHECK(RunLengthDistribution::exponential(2.0).exp_laplace(1.0) == Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(RunLengthDistribution::deterministic(1.0).exp_laplace(1.0) ==
          Approx(0.36787944117144233).epsilon(1e-14));

    // E[L e^{-gL}] = -d/dg E[e^{-gL}]: central difference as an independent oracle
    const double g = 0.8, h = 1e-6;
    const RunLengthDistribution dists[] = {
        RunLengthDistribution::exponential(1.3), RunLengthDistribution::geometric(0.4),
        RunLengthDistribution::deterministic(2.5), RunLengthDistribution::gamma(2.0, 1.5),
        RunLengthDistribution::uniform(0.5, 2.0)};
    for (const auto& d : dists) {
        const double num_t1 = (d.exp_laplace(g - h) - d.exp_laplace(g + h)) / (2.0 * h);
        CHECK(d.laplace_t1(g) == Approx(num_t1).epsilon(1e-7));
        const double num_t2 = (d.laplace_t1(g - h) - d.laplace_t1(g + h)) / (2.0 * h);
        CHECK(d.laplace_t2(g) == Approx(num_t2).epsilon(1e-6));
    }
}

TEST_CASE("required moment order p = max{8, floor(1/(1-delta)) + 1}", "[runlen]") {
    CHECK(required_moment_order(0.6) == 8);
    CHECK(required_moment_order(0.5) == 8);
    CHECK(required_moment_order(0.875) == 9);
    CHECK(required_moment_order(0.9) == 11);
    CHECK_THROWS_AS(required_moment_order(1.0), std::domain_error);
    CHECK_THROWS_AS(required_moment_order(0.0), std::domain_error);
}

TEST_CASE("integer-valued detection", "[runlen]") {
    CHECK(RunLengthDistribution::geometric(0.3).integer_valued());
    CHECK(RunLengthDistribution::deterministic(4.0).integer_valued());
    CHECK_FALSE(RunLengthDistribution::deterministic(1.5).integer_valued());
    CHECK_FALSE(RunLengthDistribution::exponential(1.0).integer_valued());
}

TEST_CASE("Monte Carlo agrees with exact moments and transforms", "[runlen]") {
    const double g = 0.9;
    const RunLengthDistribution dists[] = {
        RunLengthDistribution::exponential(1.0), RunLengthDistribution::geometric(0.5),
        RunLengthDistribution::deterministic(2.0), RunLengthDistribution::gamma(2.0, 2.0),
        RunLengthDistribution::uniform(0.0, 1.0)};
    Rng rng(20240601);
    const int n = 1000000;
    for (const auto& d : dists) {
        double sums[5] = {0, 0, 0, 0, 0};  // L, L^2, L^3, L^4, e^{-gL}
        for (int i = 0; i < n; ++i) {
            const double x = d.sample(rng.uniform_open01());
            double p = x;
            for (int k = 0; k < 4; ++k, p *= x) sums[k] += p;
            sums[4] += std::exp(-g * x);
        }
        for (int k = 1; k <= 4; ++k) {
            const double mk = d.moment(k);
            const double var = d.moment(2 * k) - mk * mk;
            const double se = std::sqrt(var / n) + 1e-15;
            INFO(d.describe() << " moment " << k);
            CHECK(std::fabs(sums[k - 1] / n - mk) <= 5.0 * se);
        }
        const double lap = d.exp_laplace(g);
        const double lap_var = d.exp_laplace(2.0 * g) - lap * lap;  // Var(e^{-gL})
        const double lap_se = std::sqrt(std::max(lap_var, 0.0) / n) + 1e-15;
        INFO(d.describe() << " exp_laplace");
        CHECK(std::fabs(sums[4] / n - lap) <= 5.0 * lap_se);
    }
}
