#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "monkey/direct.hpp"
#include "monkey/kernel.hpp"
#include "monkey/process.hpp"
#include "monkey/runlen.hpp"
#include "monkey/theory.hpp"

namespace monkey {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class SamplerChoice { Direct, Effective, Both };

/// One experiment: model parameters, query times, replication and output.
/// Parsed from a single JSON document; unknown keys are errors.
struct ExperimentConfig {
    double delta = 0.0;
    double gamma = 0.0;
    RunLengthDistribution run_length = RunLengthDistribution::exponential(1.0);
    ProcessDescriptor process = ProcessDescriptor::brownian_drift(1.0, 1);
    std::vector<double> times;
    std::uint64_t replicates = 1;
    std::uint64_t seed = 0;
    SamplerChoice sampler = SamplerChoice::Effective;
    std::string output_prefix;

    MemoryKernel kernel() const { return {gamma, delta}; }
    ModelParams model() const { return {kernel(), run_length, process}; }

    static ExperimentConfig from_json(const nlohmann::json& j);
    static ExperimentConfig from_file(const std::string& path);
    void validate() const;
};

namespace detail {

inline void reject_unknown_keys(const nlohmann::json& j, const std::set<std::string>& known,
                                const std::string& where) {
    for (auto it = j.begin(); it != j.end(); ++it) {
        if (!known.count(it.key())) {
            throw ConfigError("config: unknown key \"" + it.key() + "\" in " + where);
        }
    }
}

inline double need_number(const nlohmann::json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError("config: missing key \"" + key + "\" in " + where);
    if (!j.at(key).is_number()) throw ConfigError("config: key \"" + key + "\" in " + where + " must be a number");
    return j.at(key).get<double>();
}

inline RunLengthDistribution parse_run_length(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: runLength must be an object with a \"kind\"");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "exponential") {
        reject_unknown_keys(j, {"kind", "rate"}, "runLength");
        return RunLengthDistribution::exponential(need_number(j, "rate", "runLength"));
    }
    if (kind == "geometric") {
        reject_unknown_keys(j, {"kind", "q"}, "runLength");
        return RunLengthDistribution::geometric(need_number(j, "q", "runLength"));
    }
    if (kind == "deterministic") {
        reject_unknown_keys(j, {"kind", "c"}, "runLength");
        return RunLengthDistribution::deterministic(need_number(j, "c", "runLength"));
    }
    if (kind == "gamma") {
        reject_unknown_keys(j, {"kind", "shape", "rate"}, "runLength");
        return RunLengthDistribution::gamma(need_number(j, "shape", "runLength"),
                                            need_number(j, "rate", "runLength"));
    }
    if (kind == "uniform") {
        reject_unknown_keys(j, {"kind", "a", "b"}, "runLength");
        return RunLengthDistribution::uniform(need_number(j, "a", "runLength"),
                                              need_number(j, "b", "runLength"));
    }
    throw ConfigError("config: unknown runLength kind \"" + kind + "\"");
}

inline ProcessDescriptor parse_process(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("kind")) {
        throw ConfigError("config: process must be an object with a \"kind\"");
    }
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "brownianDrift") {
        reject_unknown_keys(j, {"kind", "drift", "dimension"}, "process");
        const double drift = j.contains("drift") ? need_number(j, "drift", "process") : 0.0;
        const int dim = j.contains("dimension") ? j.at("dimension").get<int>() : 1;
        return ProcessDescriptor::brownian_drift(drift, dim);
    }
    if (kind == "latticeWalk") {
        reject_unknown_keys(j, {"kind", "dimension"}, "process");
        const int dim = j.contains("dimension") ? j.at("dimension").get<int>() : 1;
        return ProcessDescriptor::lattice_walk(dim);
    }
    throw ConfigError("config: unknown process kind \"" + kind + "\"");
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
    detail::reject_unknown_keys(j,
                                {"delta", "gamma", "runLength", "process", "times", "replicates",
                                 "seed", "sampler", "output"},
                                "top level");
    ExperimentConfig c;
    c.delta = detail::need_number(j, "delta", "top level");
    c.gamma = detail::need_number(j, "gamma", "top level");
    if (!j.contains("runLength")) throw ConfigError("config: missing \"runLength\"");
    c.run_length = detail::parse_run_length(j.at("runLength"));
    if (!j.contains("process")) throw ConfigError("config: missing \"process\"");
    c.process = detail::parse_process(j.at("process"));
    if (!j.contains("times") || !j.at("times").is_array() || j.at("times").empty()) {
        throw ConfigError("config: \"times\" must be a non-empty array");
    }
    for (const auto& t : j.at("times")) c.times.push_back(t.get<double>());
    if (j.contains("replicates")) c.replicates = j.at("replicates").get<std::uint64_t>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("sampler")) {
        const std::string s = j.at("sampler").get<std::string>();
        if (s == "direct") c.sampler = SamplerChoice::Direct;
        else if (s == "effective") c.sampler = SamplerChoice::Effective;
        else if (s == "both") c.sampler = SamplerChoice::Both;
        else throw ConfigError("config: sampler must be one of direct|effective|both, got \"" + s + "\"");
    }
    if (j.contains("output")) c.output_prefix = j.at("output").get<std::string>();
    c.validate();
    return c;
}

inline ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config: " + path + ": " + e.what());
    }
    return from_json(j);
}

inline void ExperimentConfig::validate() const {
    if (!(delta > 0.0)) throw ConfigError("config: delta must be positive");
    if (!(gamma > 0.0)) throw ConfigError("config: gamma must be positive");
    if (replicates < 1) throw ConfigError("config: replicates must be >= 1");
    for (double t : times) {
        if (!(t > 0.0)) throw ConfigError("config: all query times must be positive");
    }
    // moment requirements by regime
    try {
        if (regime_of(delta) == DeltaRegime::Small) {
            const int p = required_moment_order(delta);
            if (p > RunLengthDistribution::kMaxMomentOrder) {
                throw ConfigError("config: delta=" + std::to_string(delta) + " requires E[L^" +
                                  std::to_string(p) +
                                  "], above the supported moment order 12; choose delta <= 0.91");
            }
            run_length.moment(p);
        } else {
            run_length.moment(4);
        }
    } catch (const std::domain_error& e) {
        throw ConfigError(std::string("config: moment validation failed: ") + e.what());
    }
    if (process.kind == ProcessDescriptor::Kind::LatticeWalk && !run_length.integer_valued()) {
        throw ConfigError(
            "config: latticeWalk requires an integer-valued run-length distribution "
            "(geometric, or deterministic with integer c), got " + run_length.describe());
    }
}

}  // namespace monkey
