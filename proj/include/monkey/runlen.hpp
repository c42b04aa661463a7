#pragma once

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <string>

#include "monkey/numerics.hpp"

namespace monkey {

/// Run-length distribution phi. All kinds put their mass on (0, infinity);
/// geometric lives on {1, 2, ...} so relocation times are strictly increasing.
/// Moments and exponential moments are exact (closed form, or a geometrically
/// convergent series summed to machine precision for the geometric kind).
class RunLengthDistribution {
  public:
    enum class Kind { Exponential, Geometric, Deterministic, Gamma, Uniform };

    static constexpr int kMaxMomentOrder = 12;

    static RunLengthDistribution exponential(double rate) {
        require(rate > 0.0, "exponential: rate must be positive");
        return {Kind::Exponential, rate, 0.0};
    }
    static RunLengthDistribution geometric(double q) {
        require(q > 0.0 && q < 1.0, "geometric: q must be in (0,1)");
        return {Kind::Geometric, q, 0.0};
    }
    static RunLengthDistribution deterministic(double c) {
        require(c > 0.0, "deterministic: c must be positive");
        return {Kind::Deterministic, c, 0.0};
    }
    static RunLengthDistribution gamma(double shape, double rate) {
        require(shape > 0.0 && rate > 0.0, "gamma: shape and rate must be positive");
        return {Kind::Gamma, shape, rate};
    }
    static RunLengthDistribution uniform(double a, double b) {
        require(a >= 0.0 && b > a, "uniform: need 0 <= a < b");
        return {Kind::Uniform, a, b};
    }

    Kind kind() const { return kind_; }
    double param1() const { return p1_; }
    double param2() const { return p2_; }

    /// Inverse-CDF draw from a single uniform(0,1) variate.
    double sample(double u) const {
        if (!(u > 0.0 && u < 1.0)) throw std::domain_error("RunLengthDistribution::sample: u must be in (0,1)");
        switch (kind_) {
            case Kind::Exponential: return -std::log1p(-u) / p1_;
            case Kind::Geometric: {
                double n = std::ceil(std::log1p(-u) / std::log1p(-p1_));
                return n < 1.0 ? 1.0 : n;
            }
            case Kind::Deterministic: return p1_;
            case Kind::Gamma: return gamma_p_inv(p1_, u) / p2_;
            case Kind::Uniform: return p1_ + u * (p2_ - p1_);
        }
        throw std::logic_error("unreachable");
    }

    /// Exact E[L^k], 1 <= k <= 12.
    double moment(int k) const {
        if (k < 1 || k > kMaxMomentOrder) {
            throw std::domain_error("RunLengthDistribution::moment: order must be in [1,12]");
        }
        switch (kind_) {
            case Kind::Exponential: {
                double m = 1.0;
                for (int j = 1; j <= k; ++j) m *= j / p1_;
                return m;
            }
            case Kind::Geometric:
                return series_sum([k](double j) { return std::pow(j, k); });
            case Kind::Deterministic: return std::pow(p1_, k);
            case Kind::Gamma: {
                double m = 1.0;
                for (int j = 0; j < k; ++j) m *= (p1_ + j) / p2_;
                return m;
            }
            case Kind::Uniform:
                return (std::pow(p2_, k + 1) - std::pow(p1_, k + 1)) / ((k + 1) * (p2_ - p1_));
        }
        throw std::logic_error("unreachable");
    }

    /// E[e^{-gL}], exact.
    double exp_laplace(double g) const {
        require_g(g);
        switch (kind_) {
            case Kind::Exponential: return p1_ / (p1_ + g);
            case Kind::Geometric: {
                const double e = std::exp(-g);
                return p1_ * e / (1.0 - (1.0 - p1_) * e);
            }
            case Kind::Deterministic: return std::exp(-g * p1_);
            case Kind::Gamma: return std::pow(p2_ / (p2_ + g), p1_);
            case Kind::Uniform: return (std::exp(-g * p1_) - std::exp(-g * p2_)) / (g * (p2_ - p1_));
        }
        throw std::logic_error("unreachable");
    }

    /// E[L e^{-gL}], exact.
    double laplace_t1(double g) const {
        require_g(g);
        switch (kind_) {
            case Kind::Exponential: return p1_ / ((p1_ + g) * (p1_ + g));
            case Kind::Geometric:
                return series_sum([g](double j) { return j * std::exp(-g * j); });
            case Kind::Deterministic: return p1_ * std::exp(-g * p1_);
            case Kind::Gamma: return p1_ * std::pow(p2_, p1_) / std::pow(p2_ + g, p1_ + 1.0);
            case Kind::Uniform: {
                auto prim = [g](double x) { return -(x / g + 1.0 / (g * g)) * std::exp(-g * x); };
                return (prim(p2_) - prim(p1_)) / (p2_ - p1_);
            }
        }
        throw std::logic_error("unreachable");
    }

    /// E[L^2 e^{-gL}], exact.
    double laplace_t2(double g) const {
        require_g(g);
        switch (kind_) {
            case Kind::Exponential: return 2.0 * p1_ / std::pow(p1_ + g, 3);
            case Kind::Geometric:
                return series_sum([g](double j) { return j * j * std::exp(-g * j); });
            case Kind::Deterministic: return p1_ * p1_ * std::exp(-g * p1_);
            case Kind::Gamma:
                return p1_ * (p1_ + 1.0) * std::pow(p2_, p1_) / std::pow(p2_ + g, p1_ + 2.0);
            case Kind::Uniform: {
                auto prim = [g](double x) {
                    return -(x * x / g + 2.0 * x / (g * g) + 2.0 / (g * g * g)) * std::exp(-g * x);
                };
                return (prim(p2_) - prim(p1_)) / (p2_ - p1_);
            }
        }
        throw std::logic_error("unreachable");
    }

    double mean() const { return moment(1); }
    double variance() const { return moment(2) - mean() * mean(); }

    /// True when all mass sits on positive integers (lattice-compatible).
    bool integer_valued() const {
        switch (kind_) {
            case Kind::Geometric: return true;
            case Kind::Deterministic: return p1_ == std::floor(p1_) && p1_ >= 1.0;
            default: return false;
        }
    }

    std::string describe() const {
        std::ostringstream os;
        switch (kind_) {
            case Kind::Exponential: os << "exponential(rate=" << p1_ << ")"; break;
            case Kind::Geometric: os << "geometric(q=" << p1_ << ")"; break;
            case Kind::Deterministic: os << "deterministic(c=" << p1_ << ")"; break;
            case Kind::Gamma: os << "gamma(shape=" << p1_ << ", rate=" << p2_ << ")"; break;
            case Kind::Uniform: os << "uniform(a=" << p1_ << ", b=" << p2_ << ")"; break;
        }
        return os.str();
    }

  private:
    RunLengthDistribution(Kind k, double p1, double p2) : kind_(k), p1_(p1), p2_(p2) {}

    static void require(bool ok, const char* msg) {
        if (!ok) throw std::invalid_argument(msg);
    }
    static void require_g(double g) {
        if (!(g > 0.0)) throw std::domain_error("RunLengthDistribution: transform argument must be > 0");
    }

    /// sum_{j>=1} f(j) q (1-q)^{j-1}, summed until the tail is negligible.
    template <class F>
    double series_sum(F&& f) const {
        const double q = p1_;
        double weight = q;
        double sum = 0.0;
        for (long j = 1; j < 1000000; ++j) {
            const double term = f(static_cast<double>(j)) * weight;
            sum += term;
            weight *= (1.0 - q);
            if (j > 8 && std::fabs(term) < sum * 1e-18 && weight < 1e-18) break;
        }
        return sum;
    }

    Kind kind_;
    double p1_, p2_;
};

/// Moment order p = max{8, floor(1/(1-delta)) + 1} demanded of E[L^p] when
/// delta < 1. The floor gets a small nudge so orders that are exact integers
/// in real arithmetic are not lost to binary representation.
inline int required_moment_order(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw std::domain_error("required_moment_order: delta must be in (0,1)");
    }
    const int p = static_cast<int>(std::floor(1.0 / (1.0 - delta) + 1e-9)) + 1;
    return p > 8 ? p : 8;
}

}  // namespace monkey
