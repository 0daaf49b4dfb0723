#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace polymatch {

using VertexId = std::uint64_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

struct WeightedEdge {
    VertexId u = 0;
    VertexId v = 0;
    double w = 0.0;

    bool operator==(const WeightedEdge&) const = default;
};

struct Matching {
    std::vector<WeightedEdge> edges;

    double weight() const {
        double s = 0.0;
        for (const auto& e : edges) s += e.w;
        return s;
    }
    std::size_t size() const { return edges.size(); }
    bool empty() const { return edges.empty(); }
};

// Full in-memory edge list. Oracle and baseline substrate only; the streaming
// paths never materialize one.
struct GraphSnapshot {
    std::uint64_t n = 0;
    std::vector<WeightedEdge> edges;
};

enum class Strategy { NonDeferrable, Deferrable };

struct EngineConfig {
    double epsilon = 1e-6;
    unsigned k = 1;
    unsigned r = 1;
    Strategy strategy = Strategy::NonDeferrable;
    bool normalization_enabled = false;
    std::uint64_t seed = 0;
    double watchdog_seconds = 60.0;

    void validate() const {
        if (epsilon <= 0.0) throw std::invalid_argument("epsilon must be positive");
        if (k < 1) throw std::invalid_argument("k must be at least 1");
        if (r < 1 || r > k || k % r != 0)
            throw std::invalid_argument("r must divide k and satisfy 1 <= r <= k");
    }
};

// True iff the edges are pairwise vertex-disjoint (and individually sane).
inline bool validate_matching(std::span<const WeightedEdge> edges, std::uint64_t n) {
    std::unordered_set<VertexId> used;
    used.reserve(edges.size() * 2);
    for (const auto& e : edges) {
        if (e.u >= n || e.v >= n || e.u == e.v) return false;
        if (!used.insert(e.u).second) return false;
        if (!used.insert(e.v).second) return false;
    }
    return true;
}

inline bool validate_matching(const Matching& m, std::uint64_t n) {
    return validate_matching(std::span<const WeightedEdge>(m.edges), n);
}

inline double matching_weight(const Matching& m) { return m.weight(); }

// Keep filter for arbitrary weights: drop e when its weight is vanishing
// relative to the largest weight seen so far in the caller's own stream.
// Keeps the spread of surviving weights polynomially bounded.
inline bool normalization_keep(double w, double w_max_so_far, std::uint64_t n, double epsilon) {
    const double nn = static_cast<double>(n);
    const double threshold = epsilon * w_max_so_far / (2.0 * (1.0 + epsilon) * nn * nn);
    return w >= threshold;
}

} // namespace polymatch
