#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "monkey/stats.hpp"
#include "monkey/theory.hpp"
#include "oracle_helpers.hpp"

using namespace monkey;
using Catch::Approx;

namespace {
const auto kExp1 = RunLengthDistribution::exponential(1.0);
}

TEST_CASE("regimes and summand counts", "[theory]") {
    CHECK(regime_of(0.6) == DeltaRegime::Small);
    CHECK(regime_of(1.0) == DeltaRegime::Critical);
    CHECK(regime_of(1.2) == DeltaRegime::MidLarge);
    CHECK(regime_of(2.0) == DeltaRegime::Large);
    CHECK(regime_of(2.5) == DeltaRegime::Large);

    CHECK(summand_count(0.55) == 1);
    CHECK(summand_count(0.6) == 1);
    CHECK(summand_count(2.0 / 3.0) == 2);  // boundary value entered as a double
    CHECK(summand_count(0.7) == 2);
    CHECK(summand_count(0.74) == 2);
    CHECK(summand_count(0.75) == 3);
    CHECK(summand_count(0.5) == 1);
    CHECK_THROWS_AS(summand_count(1.0), std::domain_error);
}

TEST_CASE("centering s(t) across the four regimes", "[theory]") {
    // delta in (1/2, 2/3): single summand gamma E[L^2]/(2 E[L]) t^delta
    CHECK(centering(0.6, 1.0, kExp1, 1000.0) == Approx(63.095734448019325).epsilon(1e-13));
    // delta = 1: (E[L] - (1 - E[e^{-gamma L}])/gamma) t = gamma t/(gamma+1)
    CHECK(centering(1.0, 1.0, kExp1, 1000.0) == Approx(500.0).epsilon(1e-13));
    CHECK(centering(1.0, 2.0, kExp1, 900.0) == Approx(600.0).epsilon(1e-13));
    // delta in (2/3, 3/4): two summands, the second enters negatively
    CHECK(centering(0.7, 1.0, kExp1, 1000.0) == Approx(106.47759957176808).epsilon(1e-13));
    // delta in (1,2)
    CHECK(centering(1.2, 1.0, kExp1, 1e4) == Approx(8349.0695911863401).epsilon(1e-13));
    // delta >= 2
    CHECK(centering(2.5, 1.0, kExp1, 777.0) == 777.0);
    CHECK(centering(2.0, 1.0, kExp1, 777.0) == 777.0);
}

TEST_CASE("sigma(n) values and consistency with s(t)", "[theory]") {
    CHECK(sigma_n(0.6, 1.0, kExp1, 1e4) == Approx(251.18864315095801).epsilon(1e-13));
    const double s1 = sigma_n(0.6, 1.0, kExp1, 1.0);
    CHECK(s1 == Approx(1.0).epsilon(1e-13));
    CHECK(s1 > 0.0);

    // sigma(t/E[L]) = s(t) holds term by term, for every mean
    for (const auto& dist : {kExp1, RunLengthDistribution::uniform(0.5, 2.5),
                             RunLengthDistribution::exponential(2.0)}) {
        for (double delta : {0.6, 0.7, 0.8}) {
            for (double t : {100.0, 1e4, 1e6}) {
                CHECK(sigma_n(delta, 1.0, dist, t / dist.mean()) ==
                      Approx(centering(delta, 1.0, dist, t)).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("moment requirements gate the small-delta formulas", "[theory]") {
    CHECK_THROWS_AS(centering(0.95, 1.0, kExp1, 100.0), std::domain_error);
    CHECK_THROWS_AS(sigma_n(0.95, 1.0, kExp1, 100.0), std::domain_error);
    CHECK_NOTHROW(centering(0.9, 1.0, kExp1, 100.0));
}

TEST_CASE("small-delta limit variance 2E[L^3]/(3E[L^2])", "[theory]") {
    CHECK(limit_variance_small(kExp1) == Approx(2.0).epsilon(1e-14));
    CHECK(limit_variance_small(RunLengthDistribution::deterministic(1.0)) ==
          Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(limit_variance_small(RunLengthDistribution::deterministic(3.0)) ==
          Approx(2.0).epsilon(1e-14));
}

TEST_CASE("critical ledger: exact values for exponential(1)", "[theory]") {
    const CritLedger lg = crit_ledger(1.0, kExp1);
    CHECK(lg.var1 == Approx(1.0 / 6.0).epsilon(1e-13));
    CHECK(lg.var2 == Approx(7.0 / 12.0).epsilon(1e-13));
    CHECK(lg.var3 == Approx(0.25).epsilon(1e-13));
    CHECK(lg.cov12 == 0.0);
    CHECK(lg.cov13 == 0.0);
    CHECK(lg.cov23 == Approx(-0.375).epsilon(1e-13));
    CHECK(lg.quadratic_form() == Approx(0.25).epsilon(1e-13));

    const CritLedger lg_half = crit_ledger(0.5, kExp1);
    CHECK(lg_half.var1 == Approx(2.0 / 9.0).epsilon(1e-13));
    CHECK(lg_half.var2 == Approx(1.0 / 3.0).epsilon(1e-13));
    CHECK(lg_half.quadratic_form() == Approx(8.0 / 27.0).epsilon(1e-13));

    const CritLedger lg2 = crit_ledger(2.0, kExp1);
    CHECK(lg2.var1 == Approx(4.0 / 45.0).epsilon(1e-13));
    CHECK(lg2.var2 == Approx(0.8).epsilon(1e-13));
    CHECK(lg2.quadratic_form() == Approx(4.0 / 27.0).epsilon(1e-13));
}

TEST_CASE("critical ledger transforms cross-check against quadrature", "[theory]") {
    // same formulas fed by numerically integrated transforms instead of the
    // closed forms; catches transcription errors in either route
    static const oracle::GaussLegendre gl(96);
    const double gamma = 0.8;
    const struct {
        RunLengthDistribution dist;
        double lo, hi;
        std::function<double(double)> pdf;
    } cases[] = {
        {RunLengthDistribution::exponential(2.0), 0.0, 40.0,
         [](double x) { return 2.0 * std::exp(-2.0 * x); }},
        {RunLengthDistribution::gamma(2.0, 1.0), 0.0, 80.0,
         [](double x) { return x * std::exp(-x); }},
        {RunLengthDistribution::uniform(0.5, 1.5), 0.5, 1.5, [](double) { return 1.0; }},
    };
    for (const auto& c : cases) {
        double lap = 0, lap2 = 0, t1 = 0, el = 0, el2 = 0;
        for (std::size_t i = 0; i < gl.nodes.size(); ++i) {
            const double x = 0.5 * (c.hi - c.lo) * (gl.nodes[i] + 1.0) + c.lo;
            const double w = 0.5 * (c.hi - c.lo) * gl.weights[i] * c.pdf(x);
            lap += w * std::exp(-gamma * x);
            lap2 += w * std::exp(-2.0 * gamma * x);
            t1 += w * x * std::exp(-gamma * x);
            el += w * x;
            el2 += w * x * x;
        }
        const CritLedger lg = crit_ledger(gamma, c.dist);
        const double m = el - (1.0 - lap) / gamma;
        const double g2 = gamma * gamma;
        CHECK(lg.var1 == Approx(1.0 / g2 - 2.0 * t1 / gamma - lap2 / g2).epsilon(1e-8));
        const double mean_lpe = el + lap / gamma;
        CHECK(lg.var2 ==
              Approx(el2 + 2.0 * t1 / gamma + lap2 / g2 - mean_lpe * mean_lpe).epsilon(1e-8));
        CHECK(lg.var3 == Approx((m / el) * (m / el) * (el2 - el * el)).epsilon(1e-8));
        CHECK(lg.cov23 ==
              Approx(-(m / el) * (el2 - el * el + (t1 - el * lap) / gamma)).epsilon(1e-8));
    }
}

TEST_CASE("ledger covariance matrix is positive semidefinite", "[theory]") {
    for (double gamma : {0.3, 0.5, 1.0, 2.0, 5.0}) {
        for (const auto& dist : {kExp1, RunLengthDistribution::uniform(0.2, 3.0),
                                 RunLengthDistribution::gamma(2.0, 2.0),
                                 RunLengthDistribution::geometric(0.5)}) {
            const auto m = crit_ledger(gamma, dist).covariance_matrix();
            CHECK(m[0][0] >= -1e-10);
            CHECK(m[1][1] >= -1e-10);
            CHECK(m[2][2] >= -1e-10);
            // principal 2x2 minors and the determinant
            CHECK(m[0][0] * m[1][1] - m[0][1] * m[0][1] >= -1e-10);
            CHECK(m[0][0] * m[2][2] - m[0][2] * m[0][2] >= -1e-10);
            CHECK(m[1][1] * m[2][2] - m[1][2] * m[1][2] >= -1e-10);
            const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[1][2]) -
                               m[0][1] * (m[0][1] * m[2][2] - m[1][2] * m[0][2]) +
                               m[0][2] * (m[0][1] * m[1][2] - m[1][1] * m[0][2]);
            CHECK(det >= -1e-10);
        }
    }
}

TEST_CASE("Phi(n) fluctuations match the ledger at delta = 1", "[theory]") {
    // variance of (Phi(n) - n m)/sqrt(n) -> Var(O1) + Var(O2) + 2 Cov(O1,O2)
    const MemoryKernel kernel(1.0, 1.0);
    const CritLedger lg = crit_ledger(1.0, kExp1);
    const double target = lg.var1 + lg.var2 + 2.0 * lg.cov12;  // = 3/4
    const double m = 1.0 - (1.0 - kExp1.exp_laplace(1.0)) / 1.0;
    const std::size_t n = 10000;
    SampleSummary sum;
    for (std::uint64_t r = 0; r < 5000; ++r) {
        Rng rng(31, r);
        const RunSequence rs = generate_runs_n(kExp1, kernel, n, rng);
        sum.push((sample_phi(rs, kernel, n, rng) - n * m) / std::sqrt(static_cast<double>(n)));
    }
    CHECK(sum.variance() == Approx(target).epsilon(0.10));
    CHECK(std::fabs(sum.mean) < 5.0 * sum.std_error());
}

TEST_CASE("S(t) fluctuations match gamma E[L^3]/(3 E[L]) in the small regime", "[theory]") {
    // t large enough that the subleading variance terms (relative order
    // t^{-0.4}) sit inside the 10% window
    const double t = 50000.0, delta = 0.6;
    const MemoryKernel kernel(1.0, delta);
    const double s_t = centering(delta, 1.0, kExp1, t);
    const double scale = std::pow(t, delta / 2.0);
    SampleSummary sum;
    for (std::uint64_t r = 0; r < 3000; ++r) {
        Rng rng(32, r);
        const RunSequence rs = generate_runs(kExp1, kernel, t, rng);
        sum.push((sample_effective_time(rs, kernel, t, rng).total - s_t) / scale);
    }
    CHECK(sum.variance() == Approx(2.0).epsilon(0.10));
}

TEST_CASE("prediction assembles the composed limit law", "[theory]") {
    const auto bd = ProcessDescriptor::brownian_drift(1.0, 1);
    const auto small = predict(0.6, 1.0, kExp1, bd, 2000.0);
    CHECK(small.var_omega == Approx(2.0).epsilon(1e-13));
    CHECK(small.limit_variance == Approx(3.0).epsilon(1e-13));
    CHECK(small.s == Approx(std::pow(2000.0, 0.6)).epsilon(1e-13));
    CHECK(small.scale == Approx(std::sqrt(small.s)).epsilon(1e-13));

    const auto crit = predict(1.0, 1.0, kExp1, bd, 5000.0);
    CHECK(crit.var_omega == Approx(0.5).epsilon(1e-13));
    CHECK(crit.limit_variance == Approx(1.5).epsilon(1e-13));
    CHECK(crit.s == Approx(2500.0).epsilon(1e-13));

    const auto large = predict(2.5, 1.0, kExp1, bd, 1e4);
    CHECK(large.var_omega == 0.0);
    CHECK(large.limit_variance == Approx(1.0));
    CHECK(large.s == 1e4);

    const auto lattice = predict(0.6, 1.0, RunLengthDistribution::geometric(0.5),
                                 ProcessDescriptor::lattice_walk(1), 2000.0);
    CHECK(lattice.limit_variance == Approx(1.0));  // f = 0: the limit is nu itself

    const auto drift3 = predict(0.6, 1.0, kExp1, ProcessDescriptor::brownian_drift(3.0, 1), 2000.0);
    CHECK(drift3.limit_variance == Approx(9.0 * 2.0 + 1.0).epsilon(1e-13));
}

TEST_CASE("large-delta residual: empty sum at n=1, small medians", "[theory]") {
    Rng rng(33);
    const MemoryKernel k3(1.0, 3.0);
    const RunSequence rs = generate_runs_n(kExp1, k3, 1, rng);
    // Phi(1) = 0, no correction sum above delta 2: residual is -T_1 = -L_1
    CHECK(phi_residual(3.0, 1.0, rs, 1, 0.0) == Approx(-rs.lengths[0]));
    CHECK_THROWS_AS(phi_residual(1.0, 1.0, rs, 1, 0.0), std::domain_error);

    const MemoryKernel k25(1.0, 2.5);
    std::vector<double> med;
    for (std::uint64_t s = 0; s < 11; ++s) {
        Rng r2(34, s);
        const RunSequence runs = generate_runs_n(kExp1, k25, 1000, r2);
        const double phi = sample_phi(runs, k25, 1000, r2);
        med.push_back(std::fabs(phi_residual(2.5, 1.0, runs, 1000, phi)));
    }
    std::nth_element(med.begin(), med.begin() + 5, med.end());
    CHECK(med[5] < 10.0);
}
