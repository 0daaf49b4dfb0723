#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "polymatch/core.hpp"
#include "polymatch/rng.hpp"
#include "polymatch/streams.hpp"

namespace polymatch {

enum class DualRuleKind { UniRelaxed, UniTight, ArgMax, ArgMin, ArgRand };

struct DualRule {
    DualRuleKind kind = DualRuleKind::UniTight;
    std::uint64_t seed = 0; // used by ArgRand only, recorded for replay
};

inline std::string dual_rule_name(DualRuleKind k) {
    switch (k) {
        case DualRuleKind::UniRelaxed: return "uni-relaxed";
        case DualRuleKind::UniTight: return "uni-tight";
        case DualRuleKind::ArgMax: return "arg-max";
        case DualRuleKind::ArgMin: return "arg-min";
        case DualRuleKind::ArgRand: return "arg-rand";
    }
    return "unknown";
}

inline DualRuleKind dual_rule_from_name(const std::string& s) {
    if (s == "uni-relaxed") return DualRuleKind::UniRelaxed;
    if (s == "uni-tight") return DualRuleKind::UniTight;
    if (s == "arg-max") return DualRuleKind::ArgMax;
    if (s == "arg-min") return DualRuleKind::ArgMin;
    if (s == "arg-rand") return DualRuleKind::ArgRand;
    throw std::invalid_argument("unknown dual rule: " + s);
}

inline std::vector<DualRule> all_dual_rules(std::uint64_t argrand_seed = 0) {
    return {{DualRuleKind::UniRelaxed, 0},
            {DualRuleKind::UniTight, 0},
            {DualRuleKind::ArgMax, 0},
            {DualRuleKind::ArgMin, 0},
            {DualRuleKind::ArgRand, argrand_seed}};
}

struct DualSolution {
    std::vector<double> y;
    DualRule rule;

    double objective() const {
        double s = 0.0;
        for (double v : y) s += v;
        return s;
    }
};

// One sequential pass: whenever an edge is unsatisfied (w > y_u + y_v), the
// slack delta = w - y_u - y_v is distributed per the chosen rule. Updates
// only grow y, so satisfied constraints stay satisfied.
template <EdgeSource Stream>
DualSolution apply_rule(DualRule rule, Stream& stream, std::uint64_t n) {
    DualSolution sol;
    sol.rule = rule;
    sol.y.assign(n, 0.0);
    SplitMix64 rng(derive_seed(rule.seed, 0x41520000ull));
    WeightedEdge e;
    while (stream.next(e)) {
        if (e.u == e.v) continue;
        const double delta = e.w - (sol.y[e.u] + sol.y[e.v]);
        if (delta <= 0.0) continue;
        switch (rule.kind) {
            case DualRuleKind::UniRelaxed:
                sol.y[e.u] += delta;
                sol.y[e.v] += delta;
                break;
            case DualRuleKind::UniTight:
                sol.y[e.u] += delta / 2.0;
                sol.y[e.v] += delta / 2.0;
                break;
            case DualRuleKind::ArgMax: {
                // ties go to the smaller vertex id
                const bool pick_u = sol.y[e.u] > sol.y[e.v] ||
                                    (sol.y[e.u] == sol.y[e.v] && e.u < e.v);
                sol.y[pick_u ? e.u : e.v] += delta;
                break;
            }
            case DualRuleKind::ArgMin: {
                const bool pick_u = sol.y[e.u] < sol.y[e.v] ||
                                    (sol.y[e.u] == sol.y[e.v] && e.u < e.v);
                sol.y[pick_u ? e.u : e.v] += delta;
                break;
            }
            case DualRuleKind::ArgRand:
                sol.y[(rng.next() & 1) ? e.u : e.v] += delta;
                break;
        }
    }
    return sol;
}

inline double min_bound(std::span<const DualSolution> solutions) {
    if (solutions.empty()) throw std::invalid_argument("min_bound: no solutions");
    double best = solutions[0].objective();
    for (std::size_t i = 1; i < solutions.size(); ++i)
        best = std::min(best, solutions[i].objective());
    return best;
}

// Lower bound on w(M)/OPT as a percentage, certified by the dual bound.
inline double min_opt_percent(double w_matching, double y_min) {
    if (y_min == 0.0) return 100.0; // only the edgeless graph
    return 100.0 * w_matching / y_min;
}

// Full re-scan: every edge must satisfy y_u + y_v >= w up to relative slop.
inline bool check_feasibility(std::span<const WeightedEdge> edges,
                              std::span<const double> y, double rel_tol = 1e-9) {
    for (const auto& e : edges) {
        if (e.u == e.v) continue;
        const double lhs = y[e.u] + y[e.v];
        if (lhs < e.w - rel_tol * std::max(1.0, std::abs(e.w))) return false;
    }
    return true;
}

} // namespace polymatch
