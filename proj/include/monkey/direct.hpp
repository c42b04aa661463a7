#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

#include "monkey/genealogy.hpp"
#include "monkey/kernel.hpp"
#include "monkey/process.hpp"
#include "monkey/rng.hpp"
#include "monkey/runlen.hpp"

namespace monkey {

/// Model parameters shared by both samplers.
struct ModelParams {
    MemoryKernel kernel;
    RunLengthDistribution run_length;
    ProcessDescriptor process;

    ModelParams(MemoryKernel k, RunLengthDistribution d, ProcessDescriptor p)
        : kernel(k), run_length(d), process(p) {
        if (process.kind == ProcessDescriptor::Kind::LatticeWalk && !run_length.integer_valued()) {
            throw std::invalid_argument(
                "ModelParams: latticeWalk requires an integer-valued run-length distribution "
                "(geometric, or deterministic with integer c)");
        }
    }
};

/// From-scratch trajectory of the walk for one replicate: runs are revealed
/// lazily as RunPaths, and each relocation target is read off the containing
/// run through a bridge-consistent query, so already-revealed positions are
/// never biased. For the lattice walk, relocation times are rounded to the
/// integer above and positions are read on the integer grid.
class Trajectory {
  public:
    /// Builds run starts up to the run containing query_horizon.
    Trajectory(const ModelParams& params, double query_horizon, Rng& rng)
        : params_(params), runs_(generate_runs(params.run_length, params.kernel, query_horizon, rng)) {
        const bool lattice = params_.process.kind == ProcessDescriptor::Kind::LatticeWalk;
        paths_.reserve(runs_.size());
        paths_.emplace_back(0.0, Point{});
        const std::size_t i_t = run_index_at(runs_, query_horizon);
        relocation_targets_.reserve(i_t);
        for (std::size_t n = 1; n + 1 <= i_t; ++n) {
            const double t_n = runs_.times[n - 1];
            double r = params_.kernel.sample_relocation_time(t_n, rng.uniform_open01());
            if (lattice) r = std::ceil(r);
            relocation_targets_.push_back(r);
            paths_.emplace_back(t_n, position_at_target(r, t_n, rng));
        }
    }

    /// X(t); t must lie within the runs built at construction.
    Point position_at(double t, Rng& rng) {
        const std::size_t i = run_index_at(runs_, t);
        if (i > paths_.size()) throw std::domain_error("Trajectory::position_at: t beyond built horizon");
        const bool lattice = params_.process.kind == ProcessDescriptor::Kind::LatticeWalk;
        return paths_[i - 1].sample_at(params_.process, lattice ? std::floor(t) : t, rng);
    }

    const RunSequence& runs() const { return runs_; }
    const std::vector<double>& relocation_targets() const { return relocation_targets_; }

  private:
    /// Position at a relocation target r drawn on (0, t_n]. The run containing
    /// r is half-open on the right (a target exactly at T_j reads run j+1's
    /// start knot); a lattice target rounded up to t_n itself reads the current
    /// run's own endpoint, matching the branching picture where each run's
    /// segment is closed on the right.
    Point position_at_target(double r, double t_n, Rng& rng) {
        std::size_t j = r >= t_n ? paths_.size() : run_index_at(runs_, r);
        return paths_[j - 1].sample_at(params_.process, r, rng);
    }

    ModelParams params_;
    RunSequence runs_;
    std::vector<RunPath> paths_;
    std::vector<double> relocation_targets_;
};

/// X(t) by direct construction.
inline Point simulate(const ModelParams& params, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::domain_error("simulate: t must be > 0");
    Trajectory traj(params, t, rng);
    return traj.position_at(t, rng);
}

/// X(t) as Z(S(t)): one effective-time draw composed with one draw of the bare
/// process started at the origin, independent of S.
inline Point compose_via_effective_time(const ModelParams& params, double t, Rng& rng) {
    if (!(t > 0.0)) throw std::domain_error("compose_via_effective_time: t must be > 0");
    const RunSequence runs = generate_runs(params.run_length, params.kernel, t, rng);
    const EffectiveTime et = sample_effective_time(runs, params.kernel, t, rng);
    return params.process.sample_from_origin(et.total, rng);
}

}  // namespace monkey
