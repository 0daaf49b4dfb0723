// Batch experiment runner for the poly-streaming matching engine.
//
// Exit codes: 0 success, 2 configuration error, 3 watchdog expiry,
// 4 I/O error.

#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polymatch/polymatch.hpp"

namespace {
constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitWatchdog = 3;
constexpr int kExitIo = 4;
} // namespace

int main(int argc, char** argv) {
    CLI::App app{"poly-streaming maximum weight matching benchmark runner"};

    std::string config_path, algo, strategy, audit, format, out_path, generator, files;
    unsigned k = 0, r = 0, repeats = 0, rounds = 0;
    double epsilon = -1.0, watchdog = -1.0, p = -1.0;
    long long seed = -1;
    unsigned long long n = 0, x = 0;
    std::string partition_mode;

    app.add_option("--config", config_path, "config file (key=value lines)");
    app.add_option("--algo", algo,
                   "psmwm | psmwm-ds | psmwm-ld | psmwm-pr | seq | feigenbaum | greedy | exact");
    app.add_option("--k", k, "worker / stream count");
    app.add_option("--r", r, "dual-variable group count (psmwm-ld)");
    app.add_option("--epsilon", epsilon, "approximation parameter");
    app.add_option("--strategy", strategy, "nd | ds");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--repeats", repeats, "repetitions per configuration");
    app.add_option("--audit", audit, "dual rules: all or comma list "
                                     "(uni-relaxed,uni-tight,arg-max,arg-min,arg-rand)");
    app.add_option("--format", format, "jsonl | csv");
    app.add_option("--out", out_path, "output path (default stdout)");
    app.add_option("--watchdog", watchdog, "watchdog timeout in seconds");
    app.add_option("--generator", generator, "er | ba | ua | files");
    app.add_option("--n", n, "vertex count for generators");
    app.add_option("--p", p, "edge probability (er)");
    app.add_option("--x", x, "attachment count (ba/ua)");
    app.add_option("--files", files, "comma-separated stream files");
    app.add_option("--rounds", rounds, "amplification round cap (psmwm-pr)");
    app.add_option("--partition", partition_mode, "rr | contig | shuffle");

    CLI11_PARSE(app, argc, argv);

    polymatch::ExperimentConfig cfg;
    try {
        if (!config_path.empty()) polymatch::load_config_file(cfg, config_path);
        // flags override the config file
        if (!algo.empty()) polymatch::apply_config_entry(cfg, "algo", algo);
        if (k > 0) cfg.k = k;
        if (r > 0) cfg.r = r;
        if (epsilon >= 0.0) polymatch::apply_config_entry(cfg, "epsilon", std::to_string(epsilon));
        if (!strategy.empty()) polymatch::apply_config_entry(cfg, "strategy", strategy);
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (repeats > 0) cfg.repeats = repeats;
        if (!audit.empty()) polymatch::apply_config_entry(cfg, "audit", audit);
        if (!format.empty()) polymatch::apply_config_entry(cfg, "format", format);
        if (!out_path.empty()) cfg.out_path = out_path;
        if (watchdog >= 0.0) cfg.watchdog_seconds = watchdog;
        if (!generator.empty()) polymatch::apply_config_entry(cfg, "generator", generator);
        if (n > 0) cfg.instance.n = n;
        if (p >= 0.0) cfg.instance.p = p;
        if (x > 0) cfg.instance.x = x;
        if (!files.empty()) polymatch::apply_config_entry(cfg, "files", files);
        if (rounds > 0) cfg.pr_rounds_override = rounds;
        if (!partition_mode.empty())
            polymatch::apply_config_entry(cfg, "partition", partition_mode);
        cfg.validate();
    } catch (const std::runtime_error& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return kExitIo; // unreadable config file
    } catch (const std::exception& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    }

    std::vector<polymatch::RunRecord> records;
    try {
        records = polymatch::run_experiment(cfg);
    } catch (const std::invalid_argument& ex) {
        std::cerr << "config error: " << ex.what() << "\n";
        return kExitConfig;
    } catch (const std::runtime_error& ex) {
        std::cerr << "I/O error: " << ex.what() << "\n";
        return kExitIo;
    }

    try {
        if (cfg.out_path.empty())
            polymatch::emit_report(records, cfg.format, std::cout);
        else
            polymatch::emit_report(records, cfg.format, cfg.out_path);
    } catch (const std::exception& ex) {
        std::cerr << "I/O error: " << ex.what() << "\n";
        return kExitIo;
    }

    for (const auto& rec : records)
        if (rec.status != "ok") {
            std::cerr << "watchdog expired during at least one run\n";
            return kExitWatchdog;
        }
    return kExitOk;
}
