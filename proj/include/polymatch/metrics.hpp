#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "polymatch/core.hpp"
#include "polymatch/engine.hpp"

namespace polymatch {

inline std::uint64_t effective_iterations(std::span<const std::uint64_t> supersteps) {
    std::uint64_t best = 0;
    for (auto s : supersteps) best = std::max(best, s);
    return best;
}

// Ratio of single-stream effective iterations to the k-stream count.
inline double speedup_by_effective_iterations(std::uint64_t base_k1, std::uint64_t run_k) {
    if (run_k == 0) throw std::invalid_argument("speedup: zero effective iterations");
    return static_cast<double>(base_k1) / static_cast<double>(run_k);
}

// Deterministic accounting of auxiliary memory: dual-vector copies (one
// global plus r group-local when grouped), per-vertex lock/mark/z state, the
// stacked and deferred entries, and the output matching. No RSS sampling.
inline std::uint64_t memory_estimate(const MatchingResult& result, unsigned r) {
    const std::uint64_t n = result.final_alpha.size();
    const std::uint64_t dual_copies = r > 1 ? r + 1 : 1;
    const std::uint64_t lock_copies = r > 1 ? r + 1 : 1; // local lock arrays mirror duals
    std::uint64_t bytes = 0;
    bytes += dual_copies * n * sizeof(double);
    bytes += lock_copies * n * sizeof(SpinLock);
    bytes += n * sizeof(std::uint8_t);  // marks
    bytes += n * sizeof(std::uint64_t); // z counters
    bytes += result.stacked_edge_count * sizeof(StackEntry);
    bytes += result.deferred_edge_count * sizeof(WeightedEdge);
    bytes += result.matching.edges.size() * sizeof(WeightedEdge);
    return bytes;
}

// One run, one record. Everything the harness reports; optional fields stay
// null when the corresponding step (oracle, audit) did not run.
struct RunRecord {
    // config echo
    std::string algorithm;
    std::uint64_t n = 0;
    std::uint64_t m = 0;
    unsigned k = 1;
    unsigned r = 1;
    double epsilon = 1e-6;
    std::string strategy = "nd";
    std::uint64_t seed = 0;
    unsigned repeat = 0;
    // results
    double weight = 0.0;
    std::uint64_t matching_size = 0;
    double alpha_sum = 0.0;
    std::optional<double> w_star;
    std::map<std::string, double> y_by_rule;
    std::optional<double> y_min;
    std::optional<double> min_opt;
    std::uint64_t effective_iters = 0;
    std::uint64_t global_reads = 0;
    std::uint64_t global_writes = 0;
    std::uint64_t stacked = 0;
    std::uint64_t deferred = 0;
    std::uint64_t memory_bytes = 0;
    double preprocessing_s = 0.0;
    double streaming_s = 0.0;
    double postprocessing_s = 0.0;
    std::string status = "ok";

    bool operator==(const RunRecord&) const = default;
};

inline void to_json(nlohmann::json& j, const RunRecord& rec) {
    j = nlohmann::json{
        {"algorithm", rec.algorithm},
        {"n", rec.n},
        {"m", rec.m},
        {"k", rec.k},
        {"r", rec.r},
        {"epsilon", rec.epsilon},
        {"strategy", rec.strategy},
        {"seed", rec.seed},
        {"repeat", rec.repeat},
        {"weight", rec.weight},
        {"matching_size", rec.matching_size},
        {"alpha_sum", rec.alpha_sum},
        {"w_star", rec.w_star ? nlohmann::json(*rec.w_star) : nlohmann::json(nullptr)},
        {"y_by_rule", rec.y_by_rule},
        {"y_min", rec.y_min ? nlohmann::json(*rec.y_min) : nlohmann::json(nullptr)},
        {"min_opt", rec.min_opt ? nlohmann::json(*rec.min_opt) : nlohmann::json(nullptr)},
        {"effective_iterations", rec.effective_iters},
        {"global_reads", rec.global_reads},
        {"global_writes", rec.global_writes},
        {"stacked", rec.stacked},
        {"deferred", rec.deferred},
        {"memory_bytes", rec.memory_bytes},
        {"preprocessing_s", rec.preprocessing_s},
        {"streaming_s", rec.streaming_s},
        {"postprocessing_s", rec.postprocessing_s},
        {"status", rec.status},
    };
}

inline void from_json(const nlohmann::json& j, RunRecord& rec) {
    j.at("algorithm").get_to(rec.algorithm);
    j.at("n").get_to(rec.n);
    j.at("m").get_to(rec.m);
    j.at("k").get_to(rec.k);
    j.at("r").get_to(rec.r);
    j.at("epsilon").get_to(rec.epsilon);
    j.at("strategy").get_to(rec.strategy);
    j.at("seed").get_to(rec.seed);
    j.at("repeat").get_to(rec.repeat);
    j.at("weight").get_to(rec.weight);
    j.at("matching_size").get_to(rec.matching_size);
    j.at("alpha_sum").get_to(rec.alpha_sum);
    rec.w_star = j.at("w_star").is_null() ? std::nullopt
                                          : std::optional<double>(j.at("w_star").get<double>());
    j.at("y_by_rule").get_to(rec.y_by_rule);
    rec.y_min = j.at("y_min").is_null() ? std::nullopt
                                        : std::optional<double>(j.at("y_min").get<double>());
    rec.min_opt = j.at("min_opt").is_null()
                      ? std::nullopt
                      : std::optional<double>(j.at("min_opt").get<double>());
    j.at("effective_iterations").get_to(rec.effective_iters);
    j.at("global_reads").get_to(rec.global_reads);
    j.at("global_writes").get_to(rec.global_writes);
    j.at("stacked").get_to(rec.stacked);
    j.at("deferred").get_to(rec.deferred);
    j.at("memory_bytes").get_to(rec.memory_bytes);
    j.at("preprocessing_s").get_to(rec.preprocessing_s);
    j.at("streaming_s").get_to(rec.streaming_s);
    j.at("postprocessing_s").get_to(rec.postprocessing_s);
    j.at("status").get_to(rec.status);
}

// Determinism comparisons skip wall-clock fields.
inline bool equal_ignoring_timing(RunRecord a, RunRecord b) {
    a.preprocessing_s = b.preprocessing_s = 0.0;
    a.streaming_s = b.streaming_s = 0.0;
    a.postprocessing_s = b.postprocessing_s = 0.0;
    return a == b;
}

inline const std::vector<std::string>& csv_header() {
    static const std::vector<std::string> hdr = {
        "algorithm",     "n",           "m",
        "k",             "r",           "epsilon",
        "strategy",      "seed",        "repeat",
        "weight",        "matching_size", "alpha_sum",
        "w_star",        "y_uni_relaxed", "y_uni_tight",
        "y_arg_max",     "y_arg_min",   "y_arg_rand",
        "y_min",         "min_opt",     "effective_iterations",
        "global_reads",  "global_writes", "stacked",
        "deferred",      "memory_bytes", "preprocessing_s",
        "streaming_s",   "postprocessing_s", "status"};
    return hdr;
}

inline std::string csv_row(const RunRecord& rec) {
    std::ostringstream os;
    os.precision(17);
    auto opt = [&](const std::optional<double>& v) -> std::string {
        if (!v) return "";
        std::ostringstream t;
        t.precision(17);
        t << *v;
        return t.str();
    };
    auto rule = [&](const char* name) -> std::string {
        const auto it = rec.y_by_rule.find(name);
        if (it == rec.y_by_rule.end()) return "";
        std::ostringstream t;
        t.precision(17);
        t << it->second;
        return t.str();
    };
    os << rec.algorithm << ',' << rec.n << ',' << rec.m << ',' << rec.k << ',' << rec.r << ','
       << rec.epsilon << ',' << rec.strategy << ',' << rec.seed << ',' << rec.repeat << ','
       << rec.weight << ',' << rec.matching_size << ',' << rec.alpha_sum << ','
       << opt(rec.w_star) << ',' << rule("uni-relaxed") << ',' << rule("uni-tight") << ','
       << rule("arg-max") << ',' << rule("arg-min") << ',' << rule("arg-rand") << ','
       << opt(rec.y_min) << ',' << opt(rec.min_opt) << ',' << rec.effective_iters << ','
       << rec.global_reads << ',' << rec.global_writes << ',' << rec.stacked << ','
       << rec.deferred << ',' << rec.memory_bytes << ',' << rec.preprocessing_s << ','
       << rec.streaming_s << ',' << rec.postprocessing_s << ',' << rec.status;
    return os.str();
}

} // namespace polymatch
