#pragma once

#include <vector>

#include "polymatch/baselines.hpp"
#include "polymatch/core.hpp"
#include "polymatch/rng.hpp"
#include "polymatch/streams.hpp"

namespace testutil {

using namespace polymatch;

// Small random instance used wherever the exhaustive oracle must stay cheap:
// n in [2, 10], density in [0.3, 0.7], weights uniform in [1, 100].
inline GraphSnapshot random_small_instance(std::uint64_t seed) {
    SplitMix64 rng(derive_seed(seed, 0x7e57ull));
    GraphSnapshot g;
    g.n = 2 + rng.next_below(9);
    const double p = rng.uniform(0.3, 0.7);
    for (VertexId u = 0; u + 1 < g.n; ++u)
        for (VertexId v = u + 1; v < g.n; ++v)
            if (rng.next_double() < p) g.edges.push_back({u, v, rng.uniform(1.0, 100.0)});
    return g;
}

inline OracleBudget test_budget() { return {12, 64}; }

inline std::vector<VectorStream> make_streams(const std::vector<WeightedEdge>& edges,
                                              unsigned k,
                                              PartitionMode mode = PartitionMode::RoundRobin,
                                              std::uint64_t seed = 0) {
    std::vector<VectorStream> out;
    for (auto& part : partition(edges, k, mode, seed)) out.emplace_back(std::move(part));
    return out;
}

inline bool same_edge_set(std::vector<WeightedEdge> a, std::vector<WeightedEdge> b) {
    auto key = [](const WeightedEdge& x, const WeightedEdge& y) {
        if (x.u != y.u) return x.u < y.u;
        if (x.v != y.v) return x.v < y.v;
        return x.w < y.w;
    };
    std::sort(a.begin(), a.end(), key);
    std::sort(b.begin(), b.end(), key);
    return a == b;
}

} // namespace testutil
