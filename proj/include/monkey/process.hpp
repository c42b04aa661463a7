#pragma once

#include <array>
#include <cmath>
#include <map>
#include <stdexcept>

#include "monkey/rng.hpp"

namespace monkey {

inline constexpr int kMaxDim = 3;

/// A point of R^d, d <= 3. Unused coordinates stay zero.
struct Point {
    std::array<double, kMaxDim> x{0.0, 0.0, 0.0};
    double& operator[](int i) { return x[static_cast<std::size_t>(i)]; }
    double operator[](int i) const { return x[static_cast<std::size_t>(i)]; }
};

/// Underlying Markov process together with its ergodicity data:
/// centering a, scale b, limit law nu (standard Gaussian for both built-ins),
/// and the response functions f, g of the centering under sqrt-t perturbations.
/// These are stored facts of each kind, not recomputed limits.
struct ProcessDescriptor {
    enum class Kind { BrownianDrift, LatticeWalk };

    Kind kind = Kind::BrownianDrift;
    double drift = 0.0;  // per coordinate (BrownianDrift only)
    int dim = 1;

    static ProcessDescriptor brownian_drift(double c, int d) {
        check_dim(d);
        ProcessDescriptor p;
        p.kind = Kind::BrownianDrift;
        p.drift = c;
        p.dim = d;
        return p;
    }

    static ProcessDescriptor lattice_walk(int d) {
        check_dim(d);
        ProcessDescriptor p;
        p.kind = Kind::LatticeWalk;
        p.dim = d;
        return p;
    }

    /// a(t): c*t per coordinate for Brownian drift, 0 for the lattice walk.
    Point center(double t) const {
        Point a;
        if (kind == Kind::BrownianDrift) {
            for (int i = 0; i < dim; ++i) a[i] = drift * t;
        }
        return a;
    }

    /// b(t): sqrt(t) for Brownian drift, sqrt(t/d) per coordinate for the lattice walk.
    double scale(double t) const {
        if (!(t > 0.0)) throw std::domain_error("ProcessDescriptor::scale: t must be > 0");
        return kind == Kind::BrownianDrift ? std::sqrt(t) : std::sqrt(t / dim);
    }

    /// f(x) = lim (a(t + x sqrt t) - a(t)) / b(t): c*x for Brownian drift, 0 for lattice.
    Point shift_response(double x) const {
        Point f;
        if (kind == Kind::BrownianDrift) {
            for (int i = 0; i < dim; ++i) f[i] = drift * x;
        }
        return f;
    }

    /// g(x) = lim b(t + x sqrt t)/b(t) = 1 for both built-in kinds.
    double scale_response(double) const { return 1.0; }

    /// Drift coefficient entering the composed limit law (0 for lattice).
    double effective_drift() const { return kind == Kind::BrownianDrift ? drift : 0.0; }

    /// Free-process displacement over a duration. Lattice: ceil(duration) unit steps.
    Point sample_endpoint_displacement(double duration, Rng& rng) const {
        if (!(duration > 0.0)) throw std::domain_error("sample_endpoint_displacement: duration must be > 0");
        Point p;
        if (kind == Kind::BrownianDrift) {
            const double sd = std::sqrt(duration);
            for (int i = 0; i < dim; ++i) p[i] = drift * duration + sd * rng.normal();
        } else {
            const long steps = static_cast<long>(std::ceil(duration));
            for (long s = 0; s < steps; ++s) add_unit_step(p, rng);
        }
        return p;
    }

    /// Z(s) for the process started at the origin; s = 0 returns the origin.
    /// Lattice paths are constant on [k, k+1), so Z(s) uses floor(s) steps.
    Point sample_from_origin(double s, Rng& rng) const {
        Point p;
        if (s < 0.0) throw std::domain_error("sample_from_origin: s must be >= 0");
        if (kind == Kind::BrownianDrift) {
            if (s == 0.0) return p;
            const double sd = std::sqrt(s);
            for (int i = 0; i < dim; ++i) p[i] = drift * s + sd * rng.normal();
        } else {
            const long steps = static_cast<long>(std::floor(s));
            for (long k = 0; k < steps; ++k) add_unit_step(p, rng);
        }
        return p;
    }

    void add_unit_step(Point& p, Rng& rng) const {
        const auto r = rng.below(static_cast<std::uint64_t>(2 * dim));
        const int axis = static_cast<int>(r >> 1);
        p[axis] += (r & 1) ? 1.0 : -1.0;
    }

  private:
    static void check_dim(int d) {
        if (d < 1 || d > kMaxDim) throw std::invalid_argument("ProcessDescriptor: dimension must be in [1,3]");
    }
};

/// (a(t), b(t), f(x), g(x)) bundle for composing limit predictions.
struct Ergodicity {
    Point center;
    double scale;
    Point shifted;
    double scaled;
};

inline Ergodicity eval_ergodicity(const ProcessDescriptor& proc, double t, double x) {
    if (!(t > 0.0)) throw std::domain_error("eval_ergodicity: t must be > 0");
    return {proc.center(t), proc.scale(t), proc.shift_response(x), proc.scale_response(x)};
}

/// One run's lazily revealed path. Knots are (time, position) pairs; the first
/// knot is the run's start. Queries beyond the last knot extend the free
/// process; queries between Brownian knots draw from the (drift-free) bridge.
/// Lattice runs advance step by step, so their knots always form a contiguous
/// block of integer times and no lattice bridge is ever needed.
/// Repeated queries at the same time return the identical position.
class RunPath {
  public:
    RunPath(double start_time, Point start_pos) : start_time_(start_time) {
        knots_.emplace(start_time, start_pos);
    }

    double start_time() const { return start_time_; }
    const std::map<double, Point>& knots() const { return knots_; }

    Point sample_at(const ProcessDescriptor& proc, double t, Rng& rng) {
        if (t < start_time_) throw std::domain_error("RunPath::sample_at: t before run start");
        if (proc.kind == ProcessDescriptor::Kind::LatticeWalk) return lattice_at(proc, t, rng);
        auto it = knots_.lower_bound(t);
        if (it != knots_.end() && it->first == t) return it->second;
        if (it == knots_.end()) {
            const auto& [s, xs] = *knots_.rbegin();
            const Point d = proc.sample_endpoint_displacement(t - s, rng);
            Point p = xs;
            for (int i = 0; i < proc.dim; ++i) p[i] += d[i];
            knots_.emplace(t, p);
            return p;
        }
        const auto& [u, xu] = *it;
        const auto& [s, xs] = *std::prev(it);
        // Brownian bridge between (s, xs) and (u, xu); conditioning on both
        // endpoints removes the drift.
        const double w = (t - s) / (u - s);
        const double sd = std::sqrt((t - s) * (u - t) / (u - s));
        Point p;
        for (int i = 0; i < proc.dim; ++i) p[i] = xs[i] + w * (xu[i] - xs[i]) + sd * rng.normal();
        knots_.emplace(t, p);
        return p;
    }

  private:
    Point lattice_at(const ProcessDescriptor& proc, double t, Rng& rng) {
        if (t != std::floor(t)) throw std::domain_error("RunPath::sample_at: lattice queries take integer times");
        auto it = knots_.find(t);
        if (it != knots_.end()) return it->second;
        auto last = knots_.rbegin();
        if (t < last->first) throw std::logic_error("RunPath: lattice knots must stay contiguous");
        Point p = last->second;
        for (double k = last->first + 1.0; k <= t; k += 1.0) {
            proc.add_unit_step(p, rng);
            knots_.emplace(k, p);
        }
        return p;
    }

    double start_time_;
    std::map<double, Point> knots_;
};

}  // namespace monkey
