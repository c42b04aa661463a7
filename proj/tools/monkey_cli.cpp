#include <cstdint>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "monkey/monkey.hpp"

namespace {

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

monkey::ExperimentConfig load_config(const std::string& path, std::uint64_t* seed_override,
                                     std::string* out_override) {
    monkey::ExperimentConfig cfg = monkey::ExperimentConfig::from_file(path);
    if (seed_override) cfg.seed = *seed_override;
    if (out_override) cfg.output_prefix = *out_override;
    return cfg;
}

int cmd_simulate(const std::string& config_path, std::uint64_t* seed, std::string* out,
                 int threads, bool assert_flag) {
    const auto cfg = load_config(config_path, seed, out);
    const auto result = monkey::run_experiment(cfg, threads, !cfg.output_prefix.empty());
    bool all_ok = true;
    for (const auto& rep : result.reports) {
        std::cout << "t=" << rep.t << "  s(t)=" << rep.prediction.s
                  << "  limit N(0," << rep.prediction.limit_variance << ")\n";
        for (const auto& s : rep.samplers) {
            const bool ks_ok = s.ks_vs_limit.p_value > 0.01;
            const bool var_ok = std::fabs(s.summary.variance() - rep.prediction.limit_variance) <=
                                0.1 * rep.prediction.limit_variance;
            all_ok = all_ok && ks_ok && var_ok;
            std::cout << "  " << s.name << ": mean=" << s.summary.mean
                      << " var=" << s.summary.variance() << " ksP=" << s.ks_vs_limit.p_value
                      << (assert_flag ? (ks_ok && var_ok ? "  [ok]" : "  [ASSERT FAIL]") : "")
                      << "\n";
        }
        if (rep.has_two_sample) {
            const bool ok = rep.two_sample.p_value > 0.01;
            all_ok = all_ok && ok;
            std::cout << "  two-sample KS direct vs effective: D=" << rep.two_sample.statistic
                      << " p=" << rep.two_sample.p_value
                      << (assert_flag ? (ok ? "  [ok]" : "  [ASSERT FAIL]") : "") << "\n";
        }
    }
    if (!result.csv_path.empty()) {
        std::cout << "wrote " << result.csv_path << " and " << result.report_path << "\n";
    }
    return assert_flag && !all_ok ? 1 : 0;
}

int cmd_theory(const std::string& config_path, double t, double n) {
    const auto cfg = monkey::ExperimentConfig::from_file(config_path);
    const double t_query = t > 0.0 ? t : (cfg.times.empty() ? 0.0 : cfg.times.front());
    std::cout << monkey::theory_query(cfg, t_query, n).dump(2) << "\n";
    return 0;
}

int cmd_verify(const std::vector<int>& only, int threads) {
    std::vector<int> ids = only;
    if (ids.empty()) {
        for (int i = 1; i <= 11; ++i) ids.push_back(i);
    }
    const auto results = monkey::run_acceptance(ids, threads, std::cout);
    int failures = 0;
    for (const auto& r : results) failures += r.pass ? 0 : 1;
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed")
              << "\n";
    return failures == 0 ? 0 : 1;
}

int cmd_genealogy_oracle(std::size_t n, std::size_t samples, std::uint64_t seed) {
    using namespace monkey;
    const MemoryKernel kernel(1.0, 1.0);
    Rng rng(seed);
    const RunSequence runs = generate_runs_n(RunLengthDistribution::deterministic(1.0), kernel, n, rng);
    const std::size_t bits = n - 2;
    const std::size_t cells = std::size_t{1} << bits;
    std::vector<double> expected(cells, static_cast<double>(samples));
    for (std::size_t c = 0; c < cells; ++c) {
        for (std::size_t b = 0; b < bits; ++b) {
            const double p = ancestor_probability(runs, b + 2);
            expected[c] *= (c >> b & 1) ? p : (1.0 - p);
        }
    }
    std::vector<std::size_t> observed(cells, 0);
    for (std::size_t s = 0; s < samples; ++s) {
        std::size_t cell = 0;
        for (std::size_t idx : sample_genealogy_brute_force(runs, n, rng)) {
            if (idx >= 2) cell |= std::size_t{1} << (idx - 2);
        }
        observed[cell] += 1;
    }
    double chi2 = 0.0;
    for (std::size_t c = 0; c < cells; ++c) {
        const double d = static_cast<double>(observed[c]) - expected[c];
        chi2 += d * d / expected[c];
    }
    const double p = 1.0 - chi_squared_cdf(chi2, static_cast<int>(cells) - 1);
    nlohmann::json j{{"n", n},       {"samples", samples}, {"cells", cells},
                     {"chi2", chi2}, {"pValue", p},        {"pass", p > 0.001}};
    std::cout << j.dump(2) << "\n";
    return p > 0.001 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"monkey walk: Monte Carlo simulation and limit-theorem verification"};
    app.require_subcommand(1);
    int threads = default_threads();
    app.add_option("--threads", threads, "worker threads (results are thread-count invariant)");

    std::string config_path;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::string out_prefix;
    bool out_set = false;
    bool assert_flag = false;

    auto* sim = app.add_subcommand("simulate", "run an experiment config and emit CSV + JSON report");
    sim->add_option("--config", config_path, "experiment config (JSON)")->required();
    sim->add_option("--seed", seed, "override the config seed")->each([&](const std::string&) { seed_set = true; });
    sim->add_option("--out", out_prefix, "override the config output prefix")->each([&](const std::string&) { out_set = true; });
    sim->add_flag("--assert", assert_flag, "exit nonzero unless KS and variance checks pass");

    auto* theory = app.add_subcommand("theory", "print s(t), sigma(n), ledger and limit prediction as JSON");
    theory->add_option("--config", config_path, "experiment config (JSON)")->required();
    double t_query = 0.0, n_query = 0.0;
    theory->add_option("--t", t_query, "query time (defaults to the config's first time)");
    theory->add_option("--n", n_query, "run count for sigma(n) (small-delta regime)");

    auto* verify = app.add_subcommand("verify", "run the acceptance suite; nonzero exit on failure");
    std::vector<int> only;
    verify->add_option("--only", only, "criterion ids (1..11); default all");

    auto* oracle = app.add_subcommand("genealogy-oracle", "brute-force tree vs Bernoulli-product chi^2");
    std::size_t oracle_n = 6, oracle_samples = 100000;
    std::uint64_t oracle_seed = 7;
    oracle->add_option("--n", oracle_n, "number of runs (3..12)")->check(CLI::Range(3, 12));
    oracle->add_option("--samples", oracle_samples, "brute-force samples");
    oracle->add_option("--seed", oracle_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed()) {
            return cmd_simulate(config_path, seed_set ? &seed : nullptr, out_set ? &out_prefix : nullptr,
                                threads, assert_flag);
        }
        if (theory->parsed()) return cmd_theory(config_path, t_query, n_query);
        if (verify->parsed()) return cmd_verify(only, threads);
        if (oracle->parsed()) return cmd_genealogy_oracle(oracle_n, oracle_samples, oracle_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
