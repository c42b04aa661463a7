#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "monkey/kernel.hpp"
#include "monkey/rng.hpp"
#include "monkey/runlen.hpp"

namespace monkey {

/// The random environment: run lengths L_i, relocation times T_i = sum L_j,
/// and log-weights Lambda(T_i). Arrays are 0-based; run indices in the public
/// API are 1-based to match the construction (run i spans [T_{i-1}, T_i)).
struct RunSequence {
    std::vector<double> lengths;
    std::vector<double> times;
    std::vector<double> log_weights;

    std::size_t size() const { return lengths.size(); }
    double relocation_time(std::size_t i) const { return i == 0 ? 0.0 : times[i - 1]; }
};

/// A sample of S(t) = A(t) + Phi with its decomposition.
struct EffectiveTime {
    std::size_t run_index = 1;  // i(t)
    double within_run = 0.0;    // A(t) = t - T_{i(t)-1}
    double phi = 0.0;           // sum of ancestor offsets
    double total = 0.0;         // S(t)
};

/// Exactly n i.i.d. runs.
inline RunSequence generate_runs_n(const RunLengthDistribution& dist, const MemoryKernel& kernel,
                                   std::size_t n, Rng& rng) {
    RunSequence rs;
    rs.lengths.reserve(n);
    rs.times.reserve(n);
    rs.log_weights.reserve(n);
    double t = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double len = dist.sample(rng.uniform_open01());
        t += len;
        rs.lengths.push_back(len);
        rs.times.push_back(t);
        rs.log_weights.push_back(kernel.exponent(t));
    }
    return rs;
}

/// Runs until the horizon is strictly covered (T_n > horizon), one run past it.
inline RunSequence generate_runs(const RunLengthDistribution& dist, const MemoryKernel& kernel,
                                 double horizon, Rng& rng) {
    if (!(horizon > 0.0)) throw std::domain_error("generate_runs: horizon must be > 0");
    RunSequence rs;
    const std::size_t guess = static_cast<std::size_t>(horizon / dist.mean() * 1.05) + 16;
    rs.lengths.reserve(guess);
    rs.times.reserve(guess);
    rs.log_weights.reserve(guess);
    double t = 0.0;
    while (t <= horizon) {
        const double len = dist.sample(rng.uniform_open01());
        t += len;
        rs.lengths.push_back(len);
        rs.times.push_back(t);
        rs.log_weights.push_back(kernel.exponent(t));
    }
    return rs;
}

/// W_i / Wbar_i, the ancestor-line Bernoulli parameter of run i (1-based),
/// from the exact integrals (Wbar_i = e^{Lambda(T_i)} - 1). Equals 1 for i = 1.
inline double ancestor_probability(const RunSequence& runs, std::size_t i) {
    if (i < 1 || i > runs.size()) throw std::out_of_range("ancestor_probability: run index out of range");
    if (i == 1) return 1.0;
    const double lam = runs.log_weights[i - 1];
    const double lam_prev = runs.log_weights[i - 2];
    // exp( log W_i - log Wbar_i ) with both logs sharing the Lambda(T_i) offset
    return std::exp(std::log1p(-std::exp(lam_prev - lam)) - std::log1p(-std::exp(-lam)));
}

namespace detail {
// Bernoulli draws with parameter this close to 0 or 1 are taken
// deterministically; the bias is far below statistical noise at desk scale.
inline constexpr double kSkipBelow = 1e-15;
inline constexpr double kTakeAbove = 1.0 - 1e-15;
}  // namespace detail

/// One draw of Phi(n) = sum_{i=1}^{n-1} F_i 1_{i is ancestor of n}: independent
/// Bernoulli(W_i/Wbar_i) indicators, and for each success an independent
/// within-run offset F_i. Indicators are redrawn on every call (the
/// representation is a fixed-t distributional identity, so independent redraws
/// across replicates are the correct usage).
inline double sample_phi(const RunSequence& runs, const MemoryKernel& kernel, std::size_t n, Rng& rng) {
    if (n < 1 || n > runs.size()) throw std::out_of_range("sample_phi: run index out of range");
    double phi = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double p = ancestor_probability(runs, i);
        bool take;
        if (p < detail::kSkipBelow) {
            continue;
        } else if (p > detail::kTakeAbove) {
            take = true;
        } else {
            take = rng.bernoulli(p);
        }
        if (take) {
            phi += kernel.sample_within_run(runs.relocation_time(i - 1), runs.lengths[i - 1],
                                            rng.uniform_open01());
        }
    }
    return phi;
}

/// Index of the run containing t: T_{i-1} <= t < T_i (half-open; t = T_i
/// resolves to i+1). 1-based.
inline std::size_t run_index_at(const RunSequence& runs, double t) {
    auto it = std::upper_bound(runs.times.begin(), runs.times.end(), t);
    return static_cast<std::size_t>(it - runs.times.begin()) + 1;
}

/// One draw of S(t) = A(t) + sum_{i < i(t)} F_i 1_{i ancestor of i(t)}.
inline EffectiveTime sample_effective_time(const RunSequence& runs, const MemoryKernel& kernel,
                                           double t, Rng& rng) {
    if (runs.size() == 0 || !(t < runs.times.back())) {
        throw std::domain_error("sample_effective_time: t beyond generated horizon");
    }
    if (t < 0.0) throw std::domain_error("sample_effective_time: t must be >= 0");
    EffectiveTime et;
    et.run_index = run_index_at(runs, t);
    et.within_run = t - runs.relocation_time(et.run_index - 1);
    et.phi = sample_phi(runs, kernel, et.run_index, rng);
    et.total = et.within_run + et.phi;
    return et;
}

/// Oracle construction of the ancestor set of run n: sample every run's parent
/// explicitly (parent of run j lands in run i with probability W_i/Wbar_{j-1})
/// and trace the path from n back to the root. Sorted ascending; contains 1
/// whenever n > 1.
inline std::vector<std::size_t> sample_genealogy_brute_force(const RunSequence& runs, std::size_t n,
                                                             Rng& rng) {
    if (n < 1 || n > runs.size()) throw std::out_of_range("sample_genealogy_brute_force: run index out of range");
    // log of Wbar_i for i = 1..n-1
    std::vector<double> log_cum(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double lam = runs.log_weights[i];
        log_cum[i] = lam + std::log1p(-std::exp(-lam));
    }
    std::vector<std::size_t> parent(n + 1, 0);
    for (std::size_t j = 2; j <= n; ++j) {
        const double target = std::log(rng.uniform_open01()) + log_cum[j - 2];
        const auto it = std::lower_bound(log_cum.begin(), log_cum.begin() + (j - 1), target);
        parent[j] = static_cast<std::size_t>(it - log_cum.begin()) + 1;
    }
    std::vector<std::size_t> ancestors;
    for (std::size_t cur = n; cur > 1;) {
        cur = parent[cur];
        ancestors.push_back(cur);
    }
    std::reverse(ancestors.begin(), ancestors.end());
    return ancestors;
}

}  // namespace monkey
