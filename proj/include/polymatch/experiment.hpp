#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymatch/amplify.hpp"
#include "polymatch/baselines.hpp"
#include "polymatch/duals_audit.hpp"
#include "polymatch/engine.hpp"
#include "polymatch/metrics.hpp"
#include "polymatch/numa_groups.hpp"

namespace polymatch {

enum class ReportFormat { JsonLines, Csv };

struct InstanceSpec {
    std::string generator = "er"; // er | ba | ua | files
    std::uint64_t n = 100;
    double p = 0.1;       // er
    std::uint64_t x = 4;  // ba / ua attachment count
    std::vector<std::string> files;
};

struct ExperimentConfig {
    InstanceSpec instance;
    std::string algorithm = "psmwm";
    unsigned k = 1;
    unsigned r = 1;
    double epsilon = 1e-6;
    Strategy strategy = Strategy::NonDeferrable;
    PartitionMode partition_mode = PartitionMode::RoundRobin;
    std::uint64_t seed = 0;
    std::vector<DualRule> audits;
    unsigned repeats = 1;
    unsigned pr_rounds_override = 0;
    bool normalization_enabled = false;
    double watchdog_seconds = 60.0;
    std::string out_path;
    ReportFormat format = ReportFormat::JsonLines;
    OracleBudget oracle_budget;

    void validate() const {
        static const char* known[] = {"psmwm", "psmwm-ds", "psmwm-ld", "psmwm-pr",
                                      "seq",   "feigenbaum", "greedy", "exact"};
        if (std::find(std::begin(known), std::end(known), algorithm) == std::end(known))
            throw std::invalid_argument("unknown algorithm: " + algorithm);
        if (k < 1) throw std::invalid_argument("k must be at least 1");
        if (r > 1 && algorithm != "psmwm-ld")
            throw std::invalid_argument("r > 1 requires algorithm psmwm-ld");
        if (r < 1 || k % r != 0)
            throw std::invalid_argument("r must divide k and satisfy 1 <= r <= k");
        if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
        if (repeats < 1) throw std::invalid_argument("repeats must be at least 1");
        if (instance.generator != "er" && instance.generator != "ba" &&
            instance.generator != "ua" && instance.generator != "files")
            throw std::invalid_argument("unknown generator: " + instance.generator);
        if (instance.generator == "files" && instance.files.empty())
            throw std::invalid_argument("generator 'files' needs at least one file");
    }

    EngineConfig engine_config() const {
        EngineConfig ec;
        ec.epsilon = epsilon;
        ec.k = k;
        ec.r = algorithm == "psmwm-ld" ? r : 1;
        ec.strategy = strategy;
        ec.normalization_enabled = normalization_enabled;
        ec.seed = seed;
        ec.watchdog_seconds = watchdog_seconds;
        return ec;
    }
};

namespace detail {

inline GraphSnapshot materialize_instance(const InstanceSpec& spec, std::uint64_t seed) {
    GraphSnapshot g;
    if (spec.generator == "er") {
        g.n = spec.n;
        g.edges = gen_er(spec.n, spec.p, seed);
    } else if (spec.generator == "ba") {
        g.n = spec.n;
        g.edges = gen_ba(spec.n, spec.x, default_seed_graph(seed), seed);
    } else if (spec.generator == "ua") {
        g.n = spec.n;
        g.edges = gen_ua(spec.n, spec.x, default_seed_graph(seed), seed);
    } else {
        for (const auto& f : spec.files) {
            GraphSnapshot part = read_stream(f);
            g.n = std::max(g.n, part.n);
            g.edges.insert(g.edges.end(), part.edges.begin(), part.edges.end());
        }
    }
    return g;
}

inline const char* status_name(RunStatus s) {
    return s == RunStatus::Ok ? "ok" : "watchdog-expired";
}

} // namespace detail

inline std::vector<RunRecord> run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    const GraphSnapshot g = detail::materialize_instance(cfg.instance, cfg.seed);
    const auto parts = partition(g.edges, cfg.k, cfg.partition_mode, cfg.seed);

    std::optional<double> w_star;
    if (g.n <= cfg.oracle_budget.max_n && g.edges.size() <= cfg.oracle_budget.max_edges)
        w_star = exact_mwm(g, cfg.oracle_budget).second;

    // audits run once; they depend only on the input order, not on repeats
    std::map<std::string, double> y_by_rule;
    std::optional<double> rule_y_min;
    if (!cfg.audits.empty()) {
        std::vector<WeightedEdge> concat;
        concat.reserve(g.edges.size());
        for (const auto& part : parts) concat.insert(concat.end(), part.begin(), part.end());
        for (const auto& rule : cfg.audits) {
            VectorStream vs(concat);
            const DualSolution sol = apply_rule(rule, vs, g.n);
            const double y = sol.objective();
            y_by_rule[dual_rule_name(rule.kind)] = y;
            rule_y_min = rule_y_min ? std::min(*rule_y_min, y) : y;
        }
    }

    std::vector<RunRecord> records;
    for (unsigned rep = 0; rep < cfg.repeats; ++rep) {
        RunRecord rec;
        rec.algorithm = cfg.algorithm;
        rec.n = g.n;
        rec.m = g.edges.size();
        rec.k = cfg.k;
        rec.r = cfg.algorithm == "psmwm-ld" ? cfg.r : 1;
        rec.epsilon = cfg.epsilon;
        rec.strategy = cfg.strategy == Strategy::Deferrable ? "ds" : "nd";
        rec.seed = cfg.seed;
        rec.repeat = rep;
        rec.w_star = w_star;
        rec.y_by_rule = y_by_rule;

        const bool engine_family =
            cfg.algorithm == "psmwm" || cfg.algorithm == "psmwm-ds" ||
            cfg.algorithm == "psmwm-ld" || cfg.algorithm == "psmwm-pr";
        if (engine_family) {
            std::vector<VectorStream> streams;
            streams.reserve(parts.size());
            for (const auto& part : parts) streams.emplace_back(part);
            EngineConfig ec = cfg.engine_config();
            MatchingResult res;
            if (cfg.algorithm == "psmwm") {
                ec.strategy = cfg.strategy;
                res = run_ps_mwm(streams, g.n, ec);
            } else if (cfg.algorithm == "psmwm-ds") {
                ec.strategy = Strategy::Deferrable;
                rec.strategy = "ds";
                res = run_ps_mwm_ld(streams, g.n, ec); // r == 1 here
            } else if (cfg.algorithm == "psmwm-ld") {
                ec.strategy = Strategy::NonDeferrable;
                rec.strategy = "nd";
                res = run_ps_mwm_ld(streams, g.n, ec);
            } else {
                res = run_ps_mwm_pr(streams, g.n, ec, cfg.pr_rounds_override);
            }
            rec.weight = res.matching.weight();
            rec.matching_size = res.matching.size();
            rec.alpha_sum = res.alpha_sum;
            rec.effective_iters = res.effective_iterations();
            rec.global_reads = res.global_reads;
            rec.global_writes = res.global_writes;
            rec.stacked = res.stacked_edge_count;
            rec.deferred = res.deferred_edge_count;
            rec.memory_bytes = memory_estimate(res, rec.r);
            rec.preprocessing_s = res.timings.preprocessing_s;
            rec.streaming_s = res.timings.streaming_s;
            rec.postprocessing_s = res.timings.postprocessing_s;
            rec.status = detail::status_name(res.status);
            const double alpha_bound = (1.0 + cfg.epsilon) * res.alpha_sum;
            rec.y_min = rule_y_min ? std::min(*rule_y_min, alpha_bound) : alpha_bound;
        } else {
            Matching m;
            if (cfg.algorithm == "seq") {
                VectorStream vs(g.edges);
                m = sequential_local_ratio(vs, g.n, cfg.epsilon);
                rec.effective_iters = g.edges.size();
            } else if (cfg.algorithm == "feigenbaum") {
                VectorStream vs(g.edges);
                m = feigenbaum_stream(vs);
            } else if (cfg.algorithm == "greedy") {
                m = offline_greedy(g);
            } else { // exact
                auto [mm, best] = exact_mwm(g, cfg.oracle_budget);
                m = std::move(mm);
                rec.w_star = best;
            }
            rec.weight = m.weight();
            rec.matching_size = m.size();
            rec.y_min = rule_y_min;
        }
        if (rec.y_min) rec.min_opt = min_opt_percent(rec.weight, *rec.y_min);
        records.push_back(std::move(rec));
    }
    return records;
}

inline void emit_report(const std::vector<RunRecord>& records, ReportFormat format,
                        std::ostream& os) {
    if (format == ReportFormat::Csv) {
        const auto& hdr = csv_header();
        for (std::size_t i = 0; i < hdr.size(); ++i)
            os << (i ? "," : "") << hdr[i];
        os << '\n';
        for (const auto& rec : records) os << csv_row(rec) << '\n';
    } else {
        for (const auto& rec : records) {
            nlohmann::json j = rec;
            os << j.dump() << '\n';
        }
    }
}

inline void emit_report(const std::vector<RunRecord>& records, ReportFormat format,
                        const std::string& path) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw std::runtime_error("emit_report: cannot open " + path);
    emit_report(records, format, f);
    if (!f) throw std::runtime_error("emit_report: write failed for " + path);
}

// --- config file parsing (key = value lines, '#' comments) ----------------

namespace detail {

inline std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

} // namespace detail

inline void apply_config_entry(ExperimentConfig& cfg, const std::string& key,
                               const std::string& value) {
    if (key == "algo") cfg.algorithm = value;
    else if (key == "k") cfg.k = static_cast<unsigned>(std::stoul(value));
    else if (key == "r") cfg.r = static_cast<unsigned>(std::stoul(value));
    else if (key == "epsilon") cfg.epsilon = std::stod(value);
    else if (key == "strategy") {
        if (value == "nd") cfg.strategy = Strategy::NonDeferrable;
        else if (value == "ds") cfg.strategy = Strategy::Deferrable;
        else throw std::invalid_argument("strategy must be nd or ds");
    } else if (key == "seed") cfg.seed = std::stoull(value);
    else if (key == "repeats") cfg.repeats = static_cast<unsigned>(std::stoul(value));
    else if (key == "rounds") cfg.pr_rounds_override = static_cast<unsigned>(std::stoul(value));
    else if (key == "watchdog") cfg.watchdog_seconds = std::stod(value);
    else if (key == "normalization") cfg.normalization_enabled = value == "1" || value == "true";
    else if (key == "audit") {
        cfg.audits.clear();
        if (value == "all") {
            cfg.audits = all_dual_rules(cfg.seed);
        } else {
            for (const auto& name : detail::split_csv(value))
                cfg.audits.push_back({dual_rule_from_name(name), cfg.seed});
        }
    } else if (key == "format") {
        if (value == "jsonl") cfg.format = ReportFormat::JsonLines;
        else if (value == "csv") cfg.format = ReportFormat::Csv;
        else throw std::invalid_argument("format must be jsonl or csv");
    } else if (key == "out") cfg.out_path = value;
    else if (key == "generator") cfg.instance.generator = value;
    else if (key == "n") cfg.instance.n = std::stoull(value);
    else if (key == "p") cfg.instance.p = std::stod(value);
    else if (key == "x") cfg.instance.x = std::stoull(value);
    else if (key == "files") cfg.instance.files = detail::split_csv(value);
    else if (key == "partition") {
        if (value == "rr") cfg.partition_mode = PartitionMode::RoundRobin;
        else if (value == "contig") cfg.partition_mode = PartitionMode::Contiguous;
        else if (value == "shuffle") cfg.partition_mode = PartitionMode::Shuffled;
        else throw std::invalid_argument("partition must be rr, contig, or shuffle");
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

inline void load_config_file(ExperimentConfig& cfg, const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open config file " + path);
    std::string line;
    while (std::getline(f, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("bad config line (expected key=value): " + line);
        apply_config_entry(cfg, detail::trim(line.substr(0, eq)),
                           detail::trim(line.substr(eq + 1)));
    }
}

} // namespace polymatch
