#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

#include "monkey/numerics.hpp"

namespace monkey {

/// Streaming first-three-moments accumulator with order-insensitive merge,
/// suitable for parallel reduction over replicate chunks.
struct SampleSummary {
    std::size_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;  // sum of squared deviations
    double m3 = 0.0;  // sum of cubed deviations
    double min = kInf;
    double max = -kInf;

    void push(double x) {
        const double n1 = static_cast<double>(count);
        count += 1;
        const double n = static_cast<double>(count);
        const double delta = x - mean;
        const double delta_n = delta / n;
        const double term1 = delta * delta_n * n1;
        mean += delta_n;
        m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
        if (x < min) min = x;
        if (x > max) max = x;
    }

    void merge(const SampleSummary& o) {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count);
        const double nb = static_cast<double>(o.count);
        const double n = na + nb;
        const double delta = o.mean - mean;
        const double delta2 = delta * delta;
        const double m2n = m2 + o.m2 + delta2 * na * nb / n;
        m3 = m3 + o.m3 + delta * delta2 * na * nb * (na - nb) / (n * n) +
             3.0 * delta * (na * o.m2 - nb * m2) / n;
        m2 = m2n;
        mean = (na * mean + nb * o.mean) / n;
        count += o.count;
        if (o.min < min) min = o.min;
        if (o.max > max) max = o.max;
    }

    double variance() const {
        if (count < 2) return std::numeric_limits<double>::quiet_NaN();
        return m2 / static_cast<double>(count - 1);
    }
    double skewness() const {
        const double n = static_cast<double>(count);
        return std::sqrt(n) * m3 / std::pow(m2, 1.5);
    }
    double std_error() const { return std::sqrt(variance() / static_cast<double>(count)); }
};

struct KsReport {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n1 = 0;
    std::size_t n2 = 0;  // 0 for one-sample
};

/// Asymptotic Kolmogorov tail Q(lambda) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += sign * term;
        sign = -sign;
        if (term < 1e-18) break;
    }
    const double p = 2.0 * sum;
    return std::clamp(p, 0.0, 1.0);
}

inline KsReport ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf) {
    if (samples.size() < 10) throw std::invalid_argument("ks_one_sample: need at least 10 samples");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        const double hi = (static_cast<double>(i) + 1.0) / n - f;
        const double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    KsReport r;
    r.statistic = d;
    r.n1 = samples.size();
    r.p_value = kolmogorov_q(std::sqrt(n) * d);
    return r;
}

inline KsReport ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.size() < 10 || b.size() < 10) throw std::invalid_argument("ks_two_sample: need at least 10 samples per side");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    KsReport r;
    r.statistic = d;
    r.n1 = a.size();
    r.n2 = b.size();
    const double n_eff = na * nb / (na + nb);
    r.p_value = kolmogorov_q(std::sqrt(n_eff) * d);
    return r;
}

inline double gaussian_cdf(double x, double mean, double variance) {
    if (!(variance > 0.0)) throw std::invalid_argument("gaussian_cdf: variance must be positive");
    return 0.5 * std::erfc(-(x - mean) / std::sqrt(2.0 * variance));
}

/// CDF of chi-squared with k degrees of freedom.
inline double chi_squared_cdf(double x, int k) {
    if (x <= 0.0) return 0.0;
    return gamma_p(0.5 * k, 0.5 * x);
}

}  // namespace monkey
