#pragma once

#include <cstdio>
#include <fstream>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "monkey/config.hpp"
#include "monkey/direct.hpp"
#include "monkey/stats.hpp"
#include "monkey/theory.hpp"

namespace monkey {

/// Runs f(r) for r = 0..n-1 over contiguous chunks. Each replicate owns its
/// RNG stream, so the partition never changes results, only wall time.
template <class F>
void parallel_replicates(std::uint64_t n, int threads, F&& f) {
    if (threads < 1) threads = 1;
    const auto hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw > 0) threads = std::min(threads, hw * 4);
    if (threads == 1 || n < 2) {
        for (std::uint64_t r = 0; r < n; ++r) f(r);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    const std::uint64_t chunk = (n + static_cast<std::uint64_t>(threads) - 1) / threads;
    for (int w = 0; w < threads; ++w) {
        const std::uint64_t lo = chunk * static_cast<std::uint64_t>(w);
        const std::uint64_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &f] {
            for (std::uint64_t r = lo; r < hi; ++r) f(r);
        });
    }
    for (auto& th : pool) th.join();
}

struct SamplerOutput {
    std::string name;               // "direct" or "effective"
    std::vector<double> raw;        // coordinate 0 of X(t), by replicate
    std::vector<double> normalized; // (raw - s(t)) / b(s(t))
    SampleSummary summary;          // of normalized values
    KsReport ks_vs_limit;
};

struct TimeReport {
    double t = 0.0;
    LimitPrediction prediction;
    std::vector<SamplerOutput> samplers;
    KsReport two_sample;  // filled when both samplers ran
    bool has_two_sample = false;
};

struct ExperimentResult {
    std::vector<TimeReport> reports;
    std::string csv_path;
    std::string report_path;
};

namespace detail {

inline std::vector<double> draw_samples(const ExperimentConfig& cfg, double t, bool direct_kind,
                                        int threads) {
    std::vector<double> out(cfg.replicates);
    const ModelParams params = cfg.model();
    // stream ids keep the two samplers decoupled
    const std::uint64_t stream_base = direct_kind ? (1ull << 32) : 0;
    parallel_replicates(cfg.replicates, threads, [&](std::uint64_t r) {
        Rng rng(cfg.seed, stream_base + r);
        const Point x = direct_kind ? simulate(params, t, rng)
                                    : compose_via_effective_time(params, t, rng);
        out[r] = x[0];
    });
    return out;
}

inline SamplerOutput make_output(const std::string& name, std::vector<double> raw,
                                 const LimitPrediction& pred) {
    SamplerOutput o;
    o.name = name;
    o.raw = std::move(raw);
    o.normalized.reserve(o.raw.size());
    for (double x : o.raw) o.normalized.push_back((x - pred.s) / pred.scale);
    for (double z : o.normalized) o.summary.push(z);
    o.ks_vs_limit = ks_one_sample(o.normalized, [&pred](double z) {
        return gaussian_cdf(z, pred.limit_mean, pred.limit_variance);
    });
    return o;
}

inline std::string format_full(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace detail

inline nlohmann::json summary_to_json(const SampleSummary& s) {
    return {{"count", s.count},   {"mean", s.mean},       {"variance", s.variance()},
            {"skewness", s.skewness()}, {"min", s.min},   {"max", s.max},
            {"stdError", s.std_error()}};
}

inline nlohmann::json ks_to_json(const KsReport& k) {
    nlohmann::json j{{"statistic", k.statistic}, {"pValue", k.p_value}, {"n1", k.n1}};
    if (k.n2 > 0) j["n2"] = k.n2;
    return j;
}

inline nlohmann::json prediction_to_json(const LimitPrediction& p) {
    const char* kind = p.kind == LimitPrediction::Kind::SmallDelta   ? "smallDelta"
                       : p.kind == LimitPrediction::Kind::CritDelta ? "critDelta"
                                                                    : "largeDelta";
    return {{"s", p.s},
            {"scale", p.scale},
            {"kind", kind},
            {"varOmega", p.var_omega},
            {"limitMean", p.limit_mean},
            {"limitVariance", p.limit_variance}};
}

/// Runs the experiment: for each query time, `replicates` samples per chosen
/// sampler, normalized against the theory prediction. Replicate r always uses
/// RNG stream r (direct sampler: 2^32 + r), so outputs are identical for every
/// thread count. Files are written by a single writer after all computation.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, int threads,
                                       bool write_files = true) {
    ExperimentResult result;
    for (double t : cfg.times) {
        TimeReport rep;
        rep.t = t;
        rep.prediction = predict(cfg.delta, cfg.gamma, cfg.run_length, cfg.process, t);
        if (cfg.sampler == SamplerChoice::Effective || cfg.sampler == SamplerChoice::Both) {
            rep.samplers.push_back(detail::make_output(
                "effective", detail::draw_samples(cfg, t, false, threads), rep.prediction));
        }
        if (cfg.sampler == SamplerChoice::Direct || cfg.sampler == SamplerChoice::Both) {
            rep.samplers.push_back(detail::make_output(
                "direct", detail::draw_samples(cfg, t, true, threads), rep.prediction));
        }
        if (rep.samplers.size() == 2) {
            rep.two_sample = ks_two_sample(rep.samplers[0].raw, rep.samplers[1].raw);
            rep.has_two_sample = true;
        }
        result.reports.push_back(std::move(rep));
    }

    if (write_files && !cfg.output_prefix.empty()) {
        result.csv_path = cfg.output_prefix + "_samples.csv";
        std::ofstream csv(result.csv_path);
        if (!csv) throw ConfigError("cannot write " + result.csv_path);
        csv << "t,replicate,raw,normalized,sampler\n";
        for (const auto& rep : result.reports) {
            for (const auto& s : rep.samplers) {
                for (std::size_t r = 0; r < s.raw.size(); ++r) {
                    csv << detail::format_full(rep.t) << ',' << r << ','
                        << detail::format_full(s.raw[r]) << ','
                        << detail::format_full(s.normalized[r]) << ',' << s.name << '\n';
                }
            }
        }
        result.report_path = cfg.output_prefix + "_report.json";
        nlohmann::json out = nlohmann::json::array();
        for (const auto& rep : result.reports) {
            nlohmann::json jt{{"t", rep.t}, {"prediction", prediction_to_json(rep.prediction)}};
            for (const auto& s : rep.samplers) {
                jt[s.name] = {{"summary", summary_to_json(s.summary)},
                              {"ksVsLimit", ks_to_json(s.ks_vs_limit)}};
            }
            if (rep.has_two_sample) jt["twoSampleKs"] = ks_to_json(rep.two_sample);
            out.push_back(std::move(jt));
        }
        std::ofstream js(result.report_path);
        if (!js) throw ConfigError("cannot write " + result.report_path);
        js << out.dump(2) << '\n';
    }
    return result;
}

/// JSON answer of the `theory` subcommand: s(t) (and sigma(n), ledger,
/// prediction where the regime defines them).
inline nlohmann::json theory_query(const ExperimentConfig& cfg, double t, double n_opt) {
    nlohmann::json j;
    j["delta"] = cfg.delta;
    j["gamma"] = cfg.gamma;
    j["runLength"] = cfg.run_length.describe();
    if (t > 0.0) {
        j["t"] = t;
        j["s"] = centering(cfg.delta, cfg.gamma, cfg.run_length, t);
        j["prediction"] = prediction_to_json(predict(cfg.delta, cfg.gamma, cfg.run_length, cfg.process, t));
    }
    if (n_opt > 0.0 && regime_of(cfg.delta) == DeltaRegime::Small) {
        j["n"] = n_opt;
        j["sigma"] = sigma_n(cfg.delta, cfg.gamma, cfg.run_length, n_opt);
    }
    if (regime_of(cfg.delta) == DeltaRegime::Critical) {
        const CritLedger lg = crit_ledger(cfg.gamma, cfg.run_length);
        j["critLedger"] = {{"varOmega1", lg.var1},   {"varOmega2", lg.var2},
                           {"varOmega3", lg.var3},   {"cov12", lg.cov12},
                           {"cov13", lg.cov13},      {"cov23", lg.cov23},
                           {"quadraticForm", lg.quadratic_form()}};
    }
    return j;
}

}  // namespace monkey
