#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "monkey/numerics.hpp"

namespace monkey {

/// Memory kernel mu(x) = gamma*delta*x^(delta-1)*exp(gamma*x^delta).
///
/// The cumulative mass int_0^t mu = exp(gamma*t^delta) - 1 overflows double
/// precision already for modest t, so every quantity here lives in log space:
/// weights are carried as exponents Lambda(t) = gamma*t^delta and are never
/// exponentiated directly (only differences of exponents are, which are <= 0
/// in all code paths). kMaxExpArg marks the double-precision exp range that
/// naive arithmetic would need.
struct MemoryKernel {
    double gamma;
    double delta;

    static constexpr double kMaxExpArg = 700.0;

    MemoryKernel(double gamma_, double delta_) : gamma(gamma_), delta(delta_) {
        if (!(gamma > 0.0)) throw std::invalid_argument("MemoryKernel: gamma must be positive");
        if (!(delta > 0.0)) throw std::invalid_argument("MemoryKernel: delta must be positive");
    }

    /// Lambda(t) = gamma * t^delta, the exponent of the antiderivative.
    double exponent(double t) const {
        if (t < 0.0) throw std::domain_error("MemoryKernel::exponent: t must be >= 0");
        if (t == 0.0) return 0.0;
        return gamma * std::pow(t, delta);
    }

    /// Inverse of exponent: the t with Lambda(t) = lam.
    double inv_exponent(double lam) const {
        if (lam < 0.0) throw std::domain_error("MemoryKernel::inv_exponent: lam must be >= 0");
        if (lam == 0.0) return 0.0;
        const double y = lam / gamma;
        if (delta == 1.0) return y;
        // exp(log/delta) for huge arguments, plain power otherwise
        if (y > 1e300) return std::exp(std::log(y) / delta);
        return std::pow(y, 1.0 / delta);
    }

    /// log of int_0^t mu = log(exp(Lambda(t)) - 1); -inf at t = 0.
    double log_cumulative(double t) const {
        const double lam = exponent(t);
        if (lam == 0.0) return -kInf;
        return lam + std::log1p(-std::exp(-lam));
    }

    /// log of int_lo^hi mu = log(exp(Lambda(hi)) - exp(Lambda(lo))), 0 <= lo < hi.
    double log_interval_weight(double lo, double hi) const {
        if (!(lo >= 0.0 && lo < hi)) {
            throw std::domain_error("MemoryKernel::log_interval_weight: need 0 <= lo < hi");
        }
        const double lam_lo = exponent(lo);
        const double lam_hi = exponent(hi);
        if (lam_lo == 0.0) return log_cumulative(hi);
        return lam_hi + std::log1p(-std::exp(lam_lo - lam_hi));
    }

    /// Inverse CDF of the relocation target R on (0, horizon), whose density is
    /// mu / int_0^horizon mu. Evaluated as
    ///   x = Lambda^{-1}( B + log(u + (1-u)e^{-B}) ),  B = Lambda(horizon),
    /// which stays finite for arbitrarily large B.
    double sample_relocation_time(double horizon, double u) const {
        if (!(horizon > 0.0)) throw std::domain_error("sample_relocation_time: horizon must be > 0");
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("sample_relocation_time: u must be in (0,1)");
        const double b = exponent(horizon);
        double x = inv_exponent(b + std::log(u + (1.0 - u) * std::exp(-b)));
        if (x >= horizon) x = std::nextafter(horizon, 0.0);
        if (x <= 0.0) x = std::numeric_limits<double>::min();
        return x;
    }

    /// Inverse CDF of the within-run offset F on (0, run_len) for a run starting
    /// at run_start:  P(F <= x) = (e^{Lambda(s+x)} - e^{Lambda(s)}) / (e^{Lambda(s+L)} - e^{Lambda(s)}).
    double sample_within_run(double run_start, double run_len, double u) const {
        if (!(run_len > 0.0)) throw std::domain_error("sample_within_run: run_len must be > 0");
        if (!(run_start >= 0.0)) throw std::domain_error("sample_within_run: run_start must be >= 0");
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("sample_within_run: u must be in (0,1)");
        const double a = exponent(run_start);
        const double b = exponent(run_start + run_len);
        double x = inv_exponent(b + std::log(u + (1.0 - u) * std::exp(a - b))) - run_start;
        if (x >= run_len) x = std::nextafter(run_len, 0.0);
        if (x <= 0.0) x = std::numeric_limits<double>::min();
        return x;
    }

    /// CDF matching sample_within_run, in stable expm1 form (test oracle surface).
    double within_run_cdf(double run_start, double run_len, double x) const {
        if (x <= 0.0) return 0.0;
        if (x >= run_len) return 1.0;
        const double a = exponent(run_start);
        return std::expm1(exponent(run_start + x) - a) / std::expm1(exponent(run_start + run_len) - a);
    }
};

}  // namespace monkey
