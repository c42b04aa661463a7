#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "monkey/direct.hpp"
#include "monkey/stats.hpp"

using namespace monkey;
using Catch::Approx;

namespace {
ModelParams brownian_params(double delta, double gamma = 1.0, double drift = 1.0) {
    return {MemoryKernel(gamma, delta), RunLengthDistribution::exponential(1.0),
            ProcessDescriptor::brownian_drift(drift, 1)};
}
}  // namespace

TEST_CASE("trajectory queries are deterministic and causally ordered", "[direct]") {
    const auto params = brownian_params(1.0);
    Rng rng(21);
    Trajectory traj(params, 40.0, rng);
    const double x1 = traj.position_at(40.0, rng)[0];
    const double x2 = traj.position_at(40.0, rng)[0];
    CHECK(x1 == x2);
    const auto& targets = traj.relocation_targets();
    REQUIRE(targets.size() + 1 >= run_index_at(traj.runs(), 40.0));
    for (std::size_t n = 0; n < targets.size(); ++n) {
        CHECK(targets[n] < traj.runs().times[n]);  // R_n < T_n strictly
        CHECK(targets[n] > 0.0);
    }
}

TEST_CASE("before the first relocation the walk is the bare process", "[direct]") {
    const ModelParams params{MemoryKernel(1.0, 1.0), RunLengthDistribution::deterministic(5.0),
                             ProcessDescriptor::brownian_drift(1.0, 1)};
    std::vector<double> x(10000);
    for (std::size_t r = 0; r < x.size(); ++r) {
        Rng rng(22, r);
        x[r] = simulate(params, 0.5, rng)[0];
    }
    const auto ks = ks_one_sample(x, [](double v) { return gaussian_cdf(v, 0.5, 0.5); });
    CHECK(ks.p_value > 0.01);
}

TEST_CASE("position converges to the origin as t -> 0+", "[direct]") {
    const auto params = brownian_params(1.0);
    for (std::uint64_t r = 0; r < 100; ++r) {
        Rng rng(23, r);
        CHECK(std::fabs(simulate(params, 1e-6, rng)[0]) < 0.01);
    }
}

TEST_CASE("direct and composed samplers agree in law (smoke)", "[direct]") {
    const auto params = brownian_params(1.0);
    const std::size_t n = 4000;
    std::vector<double> a(n), b(n);
    for (std::size_t r = 0; r < n; ++r) {
        Rng rng(24, 2 * r);
        a[r] = simulate(params, 30.0, rng)[0];
        Rng rng2(24, 2 * r + 1);
        b[r] = compose_via_effective_time(params, 30.0, rng2)[0];
    }
    CHECK(ks_two_sample(a, b).p_value > 0.001);
}

TEST_CASE("composition at forced S = 0 returns the origin", "[direct]") {
    const auto proc = ProcessDescriptor::brownian_drift(1.0, 1);
    Rng rng(25);
    CHECK(proc.sample_from_origin(0.0, rng)[0] == 0.0);
}

TEST_CASE("lattice walk: integer positions, integer relocation targets", "[direct]") {
    const ModelParams params{MemoryKernel(1.0, 1.0), RunLengthDistribution::geometric(0.5),
                             ProcessDescriptor::lattice_walk(1)};
    for (std::uint64_t r = 0; r < 200; ++r) {
        Rng rng(26, r);
        Trajectory traj(params, 7.3, rng);
        const double x = traj.position_at(7.3, rng)[0];
        CHECK(x == std::floor(x));
        for (double target : traj.relocation_targets()) {
            CHECK(target == std::floor(target));  // rounded to the integer above
            CHECK(target >= 1.0);
        }
        CHECK(traj.position_at(7.3, rng)[0] == x);
    }
}

TEST_CASE("lattice walk rejects non-integer run lengths", "[direct]") {
    CHECK_THROWS_AS(ModelParams(MemoryKernel(1.0, 1.0), RunLengthDistribution::exponential(1.0),
                                ProcessDescriptor::lattice_walk(1)),
                    std::invalid_argument);
}

TEST_CASE("deterministic lengths hit run boundaries without bias", "[direct]") {
    // with unit runs every relocation target of the lattice variant lands on a
    // knot; the query must reuse it and stay within the revealed past
    const ModelParams params{MemoryKernel(1.0, 1.2), RunLengthDistribution::deterministic(1.0),
                             ProcessDescriptor::lattice_walk(1)};
    for (std::uint64_t r = 0; r < 200; ++r) {
        Rng rng(27, r);
        const double x = simulate(params, 9.5, rng)[0];
        CHECK(x == std::floor(x));
        CHECK(std::fabs(x) <= 10.0);
    }
}
