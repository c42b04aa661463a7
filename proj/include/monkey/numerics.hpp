#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

namespace monkey {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b) without overflow.
inline double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double hi = a > b ? a : b;
    const double lo = a > b ? b : a;
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(e^a - e^b) for a > b.
inline double log_diff_exp(double a, double b) {
    if (b == -kInf) return a;
    return a + std::log1p(-std::exp(b - a));
}

/// Regularized lower incomplete gamma P(a, x).
inline double gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("gamma_p: a must be positive");
    if (x <= 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series representation
        double ap = a;
        double sum = 1.0 / a;
        double term = sum;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-16) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction (modified Lentz) for Q, then P = 1 - Q
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-16) break;
    }
    const double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

/// Inverse of the standard normal CDF (Acklam's rational approximation
/// plus one Halley refinement; absolute error well below 1e-12).
inline double inverse_normal_cdf(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("inverse_normal_cdf: p must be in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    double x;
    if (p < p_low) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - p_low) {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        const double q = std::sqrt(-2.0 * std::log1p(-p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // Halley refinement against erfc
    const double err = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    const double u = err * std::sqrt(2.0 * M_PI) * std::exp(0.5 * x * x);
    x -= u / (1.0 + 0.5 * x * u);
    return x;
}

/// Inverse of P(a, .): smallest x with gamma_p(a, x) = p.
inline double gamma_p_inv(double a, double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("gamma_p_inv: p must be in (0,1)");
    const double lg = std::lgamma(a);
    double x;
    if (a > 1.0) {
        const double g = inverse_normal_cdf(p);
        const double t = 1.0 - 1.0 / (9.0 * a) + g / (3.0 * std::sqrt(a));
        x = a * t * t * t;
        if (x <= 0.0) x = 1e-8;
    } else {
        const double t = 1.0 - a * (0.253 + a * 0.12);
        x = (p < t) ? std::pow(p / t, 1.0 / a) : 1.0 - std::log1p(-(p - t) / (1.0 - t));
    }
    for (int it = 0; it < 24; ++it) {
        if (x <= 0.0) x = 1e-300;
        const double err = gamma_p(a, x) - p;
        const double logpdf = (a - 1.0) * std::log(x) - x - lg;
        const double step = err * std::exp(-logpdf);
        double xn = x - step;
        if (xn <= 0.0) xn = 0.5 * x;  // keep the iterate in the domain
        if (std::fabs(xn - x) < 1e-14 * (std::fabs(x) + 1e-300)) { x = xn; break; }
        x = xn;
    }
    return x;
}

}  // namespace monkey
