#pragma once

#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "polymatch/core.hpp"
#include "polymatch/streams.hpp"

namespace polymatch {

// Plain single-threaded local-ratio pass: stack phase, then LIFO unwind.
// Deliberately independent of the concurrent engine (plain doubles, no
// atomics) so it can serve as the k=1 ground truth.
template <EdgeSource Stream>
Matching sequential_local_ratio(Stream& stream, std::uint64_t n, double epsilon) {
    std::vector<double> alpha(n, 0.0);
    struct Entry {
        WeightedEdge edge;
        double gain;
    };
    std::vector<Entry> stack;
    WeightedEdge e;
    while (stream.next(e)) {
        if (e.u == e.v) continue;
        const double base = alpha[e.u] + alpha[e.v];
        if (e.w <= (1.0 + epsilon) * base) continue;
        const double gain = e.w - base;
        alpha[e.u] += gain;
        alpha[e.v] += gain;
        stack.push_back({e, gain});
    }
    Matching m;
    std::vector<char> matched(n, 0);
    for (auto it = stack.rbegin(); it != stack.rend(); ++it) {
        alpha[it->edge.u] -= it->gain;
        alpha[it->edge.v] -= it->gain;
        if (!matched[it->edge.u] && !matched[it->edge.v]) {
            matched[it->edge.u] = matched[it->edge.v] = 1;
            m.edges.push_back(it->edge);
        }
    }
    return m;
}

// Streaming 6-approximation: an arriving edge replaces its incident matched
// edges only when it outweighs twice their total.
template <EdgeSource Stream>
Matching feigenbaum_stream(Stream& stream) {
    std::unordered_map<VertexId, WeightedEdge> partner; // endpoint -> matched edge
    WeightedEdge e;
    while (stream.next(e)) {
        if (e.u == e.v) continue;
        double incident = 0.0;
        const auto iu = partner.find(e.u);
        const auto iv = partner.find(e.v);
        if (iu != partner.end()) incident += iu->second.w;
        if (iv != partner.end() && !(iu != partner.end() && iv->second == iu->second))
            incident += iv->second.w;
        if (e.w <= 2.0 * incident) continue;
        auto evict = [&partner](std::unordered_map<VertexId, WeightedEdge>::iterator it) {
            if (it == partner.end()) return;
            const WeightedEdge old = it->second;
            partner.erase(old.u);
            partner.erase(old.v);
        };
        evict(partner.find(e.u));
        evict(partner.find(e.v));
        partner[e.u] = e;
        partner[e.v] = e;
    }
    Matching m;
    for (const auto& [vtx, edge] : partner)
        if (vtx == std::min(edge.u, edge.v)) m.edges.push_back(edge);
    return m;
}

// Offline heaviest-first greedy, a 2-approximation. Ties broken by
// ascending endpoint ids for determinism.
inline Matching offline_greedy(const GraphSnapshot& g) {
    std::vector<WeightedEdge> edges = g.edges;
    std::sort(edges.begin(), edges.end(), [](const WeightedEdge& a, const WeightedEdge& b) {
        if (a.w != b.w) return a.w > b.w;
        if (a.u != b.u) return a.u < b.u;
        return a.v < b.v;
    });
    Matching m;
    std::vector<char> matched(g.n, 0);
    for (const auto& e : edges) {
        if (e.u == e.v || matched[e.u] || matched[e.v]) continue;
        matched[e.u] = matched[e.v] = 1;
        m.edges.push_back(e);
    }
    return m;
}

struct OracleBudget {
    std::uint64_t max_n = 12;
    std::size_t max_edges = 40;
};

namespace detail {

inline void exact_mwm_rec(const std::vector<WeightedEdge>& edges, std::size_t i,
                          std::vector<char>& used, std::vector<std::size_t>& chosen,
                          double weight, double& best, std::vector<std::size_t>& best_set) {
    if (i == edges.size()) {
        if (weight > best) {
            best = weight;
            best_set = chosen;
        }
        return;
    }
    const WeightedEdge& e = edges[i];
    if (!used[e.u] && !used[e.v]) {
        used[e.u] = used[e.v] = 1;
        chosen.push_back(i);
        exact_mwm_rec(edges, i + 1, used, chosen, weight + e.w, best, best_set);
        chosen.pop_back();
        used[e.u] = used[e.v] = 0;
    }
    exact_mwm_rec(edges, i + 1, used, chosen, weight, best, best_set);
}

} // namespace detail

// Exhaustive include/exclude search over matchings; test oracle only.
inline std::pair<Matching, double> exact_mwm(const GraphSnapshot& g,
                                             const OracleBudget& budget = {}) {
    if (g.n > budget.max_n || g.edges.size() > budget.max_edges)
        throw std::invalid_argument("exact_mwm: instance exceeds oracle budget");
    std::vector<WeightedEdge> edges;
    for (const auto& e : g.edges)
        if (e.u != e.v) edges.push_back(e);
    std::vector<char> used(g.n, 0);
    std::vector<std::size_t> chosen, best_set;
    double best = 0.0;
    detail::exact_mwm_rec(edges, 0, used, chosen, 0.0, best, best_set);
    Matching m;
    for (std::size_t i : best_set) m.edges.push_back(edges[i]);
    return {m, best};
}

} // namespace polymatch
