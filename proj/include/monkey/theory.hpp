#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "monkey/genealogy.hpp"
#include "monkey/process.hpp"
#include "monkey/runlen.hpp"

namespace monkey {

enum class DeltaRegime { Small, Critical, MidLarge, Large };

inline DeltaRegime regime_of(double delta) {
    if (!(delta > 0.0)) throw std::domain_error("regime_of: delta must be positive");
    if (std::fabs(delta - 1.0) < 1e-12) return DeltaRegime::Critical;
    if (delta < 1.0) return DeltaRegime::Small;
    if (delta < 2.0) return DeltaRegime::MidLarge;
    return DeltaRegime::Large;
}

/// Number of summands floor(delta/(2-2delta)) + 1 of the small-delta centering
/// sum. The floor carries a 1e-12 guard so regime-boundary values entered as
/// doubles (2/3, 3/4, ...) land in the bucket with the extra summand.
inline int summand_count(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("summand_count: delta must be in (0,1)");
    return static_cast<int>(std::floor(delta / (2.0 - 2.0 * delta) + 1e-12)) + 1;
}

namespace detail {

/// Shared term evaluation for s(t) and sigma(n) when delta < 1: both are
///   gamma*delta * sum_k (-gamma*delta)^k E[L^{k+2}] / ((k+2)! (delta-k(1-delta))) * w_k
/// and differ only in the power weights w_k.
inline void check_small_delta_moments(double delta, const RunLengthDistribution& dist) {
    const int p = required_moment_order(delta);
    if (p > RunLengthDistribution::kMaxMomentOrder) {
        throw std::domain_error(
            "small-delta centering: required moment order E[L^" + std::to_string(p) +
            "] exceeds the supported maximum of 12 (delta too close to 1)");
    }
    dist.moment(p);  // throws if unavailable
}

inline double small_delta_sum(double delta, double gamma, const RunLengthDistribution& dist,
                              double base, double power_step_arg) {
    // base * sum_k coeff_k * power_step_arg^{k * (delta - 1)}
    const int terms = summand_count(delta);
    double factorial = 2.0;  // (k+2)!
    double sign_pow = 1.0;   // (-gamma*delta)^k
    double sum = 0.0;
    for (int k = 0; k < terms; ++k) {
        if (k > 0) {
            factorial *= (k + 2);
            sign_pow *= -gamma * delta;
        }
        const double denom = delta - (1.0 - delta) * k;
        const double coeff = sign_pow * dist.moment(k + 2) / (factorial * denom);
        sum += coeff * std::pow(power_step_arg, k * (delta - 1.0));
    }
    return base * sum;
}

}  // namespace detail

/// The centering curve s(t), by delta regime:
///   delta in (0,1): gamma*delta*t^delta/E[L] * (alternating sum, summand_count terms)
///   delta = 1:      (E[L] - (1 - E[e^{-gamma L}])/gamma) * t
///   delta in (1,2): t - t^{2-delta}/(gamma*delta*(2-delta))
///   delta >= 2:     t
inline double centering(double delta, double gamma, const RunLengthDistribution& dist, double t) {
    if (!(t > 0.0)) throw std::domain_error("centering: t must be > 0");
    if (!(gamma > 0.0)) throw std::domain_error("centering: gamma must be > 0");
    switch (regime_of(delta)) {
        case DeltaRegime::Small: {
            detail::check_small_delta_moments(delta, dist);
            const double base = gamma * delta * std::pow(t, delta) / dist.mean();
            return detail::small_delta_sum(delta, gamma, dist, base, t);
        }
        case DeltaRegime::Critical:
            return (dist.mean() - (1.0 - dist.exp_laplace(gamma)) / gamma) * t;
        case DeltaRegime::MidLarge:
            return t - std::pow(t, 2.0 - delta) / (gamma * delta * (2.0 - delta));
        case DeltaRegime::Large:
            return t;
    }
    throw std::logic_error("unreachable");
}

/// sigma(n) of the small-delta regime:
///   gamma*delta*n^delta * sum_k (-gamma*delta)^k E[L^{k+2}]
///       / ((k+2)! (delta - k(1-delta)) E[L]^{(1-delta)(k+1)}) * n^{-k(1-delta)}.
/// n may be any positive real (the formula is analytic in n); it satisfies
/// sigma(t / E[L]) = s(t) term by term.
inline double sigma_n(double delta, double gamma, const RunLengthDistribution& dist, double n) {
    if (!(n > 0.0)) throw std::domain_error("sigma_n: n must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("sigma_n: delta must be in (0,1)");
    detail::check_small_delta_moments(delta, dist);
    const double el = dist.mean();
    // fold the E[L]^{(1-delta)(k+1)} denominators into the shared sum by
    // rescaling the power argument: n^{-k(1-delta)} / EL^{(1-delta)(k+1)}
    //   = EL^{-(1-delta)} * (n*EL)^{-k(1-delta)}
    const double base = gamma * delta * std::pow(n, delta) * std::pow(el, -(1.0 - delta));
    return detail::small_delta_sum(delta, gamma, dist, base, n * el);
}

/// Limit variance 2 E[L^3] / (3 E[L^2]) of the small-delta regime.
inline double limit_variance_small(const RunLengthDistribution& dist) {
    return 2.0 * dist.moment(3) / (3.0 * dist.moment(2));
}

/// Variances and covariances of the three Gaussian components of the delta = 1
/// limit, with m = E[L - (1 - e^{-gamma L})/gamma]:
///   Var(O1) = 1/gamma^2 + E[L^2 - (L + e^{-gamma L}/gamma)^2]
///             (the n-normalised conditional variance of Phi(n) given L)
///   Var(O2) = Var(L - (1 - e^{-gamma L})/gamma)
///   Var(O3) = (m/E[L])^2 Var(L)    (renewal fluctuation of the run count)
///   Cov(O1, .) = 0: O1 is a conditional-CLT limit, independent of every
///                L-measurable quantity by the law of total variance
///   Cov(O2, O3) = -(m/E[L]) Cov(L, L + e^{-gamma L}/gamma), negative: runs
///                covering [0,t] anticorrelate count and length fluctuations.
/// The quadratic form equals the n-normalised limit variance of S(t) about
/// t*m/E[L]; every entry is Monte-Carlo verified (see tests/acceptance).
struct CritLedger {
    double var1 = 0.0, var2 = 0.0, var3 = 0.0;
    double cov12 = 0.0, cov13 = 0.0, cov23 = 0.0;

    double quadratic_form() const { return var1 + var2 + var3 + 2.0 * (cov12 + cov13 + cov23); }

    std::array<std::array<double, 3>, 3> covariance_matrix() const {
        return {{{var1, cov12, cov13}, {cov12, var2, cov23}, {cov13, cov23, var3}}};
    }
};

inline CritLedger crit_ledger(double gamma, const RunLengthDistribution& dist) {
    if (!(gamma > 0.0)) throw std::domain_error("crit_ledger: gamma must be > 0");
    dist.moment(4);  // E[L^4] < infinity required; throws if unavailable
    const double el = dist.mean();
    const double el2 = dist.moment(2);
    const double var_l = el2 - el * el;
    const double lap = dist.exp_laplace(gamma);
    const double lap2 = dist.exp_laplace(2.0 * gamma);
    const double t1 = dist.laplace_t1(gamma);
    const double m = el - (1.0 - lap) / gamma;

    CritLedger lg;
    lg.var1 = 1.0 / (gamma * gamma) - 2.0 * t1 / gamma - lap2 / (gamma * gamma);
    const double mean_lpe = el + lap / gamma;                                    // E[L + e^{-gL}/g]
    const double mean_sq_lpe = el2 + 2.0 * t1 / gamma + lap2 / (gamma * gamma);  // E[(L + e^{-gL}/g)^2]
    lg.var2 = mean_sq_lpe - mean_lpe * mean_lpe;
    lg.var3 = (m / el) * (m / el) * var_l;
    lg.cov12 = 0.0;
    lg.cov13 = 0.0;
    lg.cov23 = -(m / el) * (var_l + (t1 - el * lap) / gamma);
    return lg;
}

/// Centering, scale and limit law for (X(t) - a(s(t))) / b(s(t)).
struct LimitPrediction {
    enum class Kind { SmallDelta, CritDelta, LargeDelta };

    double s = 0.0;            // s(t)
    double scale = 0.0;        // b(s(t))
    Kind kind = Kind::LargeDelta;
    DeltaRegime regime = DeltaRegime::Large;
    double var_omega = 0.0;    // variance of the f-argument Omega; 0 when the limit is nu itself
    double limit_mean = 0.0;   // per-coordinate limit law for the built-in processes
    double limit_variance = 1.0;
};

/// For the built-in processes the composed limit f(Omega) + Lambda g(Omega) is
/// Gaussian per coordinate: f(x) = c x and g = 1 give N(0, c^2 var_omega + 1).
/// var_omega is the variance of the b(s(t))-normalised effective-time limit:
///   delta < 1:  2 E[L^3]/(3 E[L^2])
///   delta = 1:  quadratic form of the ledger * t/(E[L] s(t))
///   delta > 1:  0 (the limit is nu itself)
inline LimitPrediction predict(double delta, double gamma, const RunLengthDistribution& dist,
                               const ProcessDescriptor& proc, double t) {
    LimitPrediction pred;
    pred.regime = regime_of(delta);
    pred.s = centering(delta, gamma, dist, t);
    pred.scale = proc.scale(pred.s);
    switch (pred.regime) {
        case DeltaRegime::Small:
            pred.kind = LimitPrediction::Kind::SmallDelta;
            pred.var_omega = limit_variance_small(dist);
            break;
        case DeltaRegime::Critical: {
            pred.kind = LimitPrediction::Kind::CritDelta;
            const double v = crit_ledger(gamma, dist).quadratic_form();
            pred.var_omega = v * t / (dist.mean() * pred.s);
            break;
        }
        case DeltaRegime::MidLarge:
        case DeltaRegime::Large:
            dist.moment(4);
            pred.kind = LimitPrediction::Kind::LargeDelta;
            pred.var_omega = 0.0;
            break;
    }
    const double c = proc.effective_drift();
    pred.limit_mean = 0.0;
    pred.limit_variance = c * c * pred.var_omega + 1.0;
    return pred;
}

/// Residual of the large-delta expansion:
///   Phi(n) - T_n + sum_{i=1}^n 1/(gamma delta T_i^{delta-1})   for delta in (1, 2],
///   Phi(n) - T_n                                               for delta > 2.
inline double phi_residual(double delta, double gamma, const RunSequence& runs, std::size_t n,
                           double phi_value) {
    if (!(delta > 1.0)) throw std::domain_error("phi_residual: delta must be > 1");
    if (n < 1 || n > runs.size()) throw std::out_of_range("phi_residual: n out of range");
    double correction = 0.0;
    if (delta <= 2.0) {
        for (std::size_t i = 0; i < n; ++i) {
            correction += 1.0 / (gamma * delta * std::pow(runs.times[i], delta - 1.0));
        }
    }
    return phi_value - runs.times[n - 1] + correction;
}

}  // namespace monkey
