#pragma once

#include <algorithm>
#include <atomic>
#include <concepts>
#include <condition_variable>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "polymatch/core.hpp"
#include "polymatch/rng.hpp"

namespace polymatch {

// Anything a worker can consume one edge at a time, exactly once per pass.
template <typename S>
concept EdgeSource = requires(S s, WeightedEdge e) {
    { s.next(e) } -> std::convertible_to<bool>;
};

class VectorStream {
public:
    VectorStream() = default;
    explicit VectorStream(std::vector<WeightedEdge> edges) : edges_(std::move(edges)) {}

    bool next(WeightedEdge& out) {
        if (pos_ >= edges_.size()) return false;
        out = edges_[pos_++];
        return true;
    }

    std::size_t size() const { return edges_.size(); }
    bool exhausted() const { return pos_ >= edges_.size(); }
    void rewind() { pos_ = 0; }
    const std::vector<WeightedEdge>& data() const { return edges_; }

private:
    std::vector<WeightedEdge> edges_;
    std::size_t pos_ = 0;
};

// Bounded single-producer single-consumer hand-off buffer. Emulates edges
// becoming available the moment the consumer is ready for them, which is the
// contention-heavy delivery mode the concurrency stress tests want.
class BoundedBufferStream {
public:
    explicit BoundedBufferStream(std::size_t capacity = 1024) : capacity_(capacity) {}

    void push(const WeightedEdge& e) {
        std::unique_lock lk(mu_);
        not_full_.wait(lk, [&] { return queue_.size() < capacity_; });
        queue_.push_back(e);
        lk.unlock();
        not_empty_.notify_one();
    }

    void close() {
        {
            std::lock_guard lk(mu_);
            closed_ = true;
        }
        not_empty_.notify_all();
    }

    bool next(WeightedEdge& out) {
        std::unique_lock lk(mu_);
        not_empty_.wait(lk, [&] { return !queue_.empty() || closed_; });
        if (queue_.empty()) return false;
        out = queue_.front();
        queue_.erase(queue_.begin());
        lk.unlock();
        not_full_.notify_one();
        return true;
    }

private:
    std::size_t capacity_;
    std::vector<WeightedEdge> queue_;
    std::mutex mu_;
    std::condition_variable not_full_, not_empty_;
    bool closed_ = false;
};

namespace detail {
inline double random_weight(SplitMix64& rng, std::uint64_t n) {
    const double nn = static_cast<double>(n);
    return rng.uniform(1.0, nn * nn);
}
} // namespace detail

// G(n, p) with weights uniform in [1, n^2].
inline std::vector<WeightedEdge> gen_er(std::uint64_t n, double p, std::uint64_t seed) {
    if (n < 2) throw std::invalid_argument("gen_er: n must be at least 2");
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("gen_er: p must lie in [0, 1]");
    SplitMix64 rng(derive_seed(seed, 0x45520000ull));
    std::vector<WeightedEdge> edges;
    for (VertexId u = 0; u + 1 < n; ++u) {
        for (VertexId v = u + 1; v < n; ++v) {
            const bool take = p >= 1.0 || rng.next_double() < p;
            if (take) edges.push_back({u, v, detail::random_weight(rng, n)});
        }
    }
    return edges;
}

// Preferential attachment on top of a seed graph: each new vertex attaches x
// neighbors sampled by current degree, with replacement (multi-edges kept).
inline std::vector<WeightedEdge> gen_ba(std::uint64_t n, std::uint64_t x,
                                        const GraphSnapshot& seed_graph, std::uint64_t seed) {
    if (seed_graph.n == 0 || seed_graph.edges.empty())
        throw std::invalid_argument("gen_ba: seed graph must be nonempty");
    if (x < 1) throw std::invalid_argument("gen_ba: x must be at least 1");
    if (n < seed_graph.n) throw std::invalid_argument("gen_ba: n smaller than seed graph");
    SplitMix64 rng(derive_seed(seed, 0x42410000ull));
    std::vector<WeightedEdge> edges = seed_graph.edges;
    // endpoint multiset: sampling an entry uniformly = degree-proportional vertex pick
    std::vector<VertexId> endpoints;
    endpoints.reserve(2 * (edges.size() + (n - seed_graph.n) * x));
    for (const auto& e : edges) {
        endpoints.push_back(e.u);
        endpoints.push_back(e.v);
    }
    for (VertexId u = seed_graph.n; u < n; ++u) {
        const std::size_t pool = endpoints.size();
        for (std::uint64_t i = 0; i < x; ++i) {
            const VertexId v = endpoints[rng.next_below(pool)];
            edges.push_back({u, v, detail::random_weight(rng, n)});
        }
        for (std::uint64_t i = 0; i < x; ++i) {
            const auto& e = edges[edges.size() - x + i];
            endpoints.push_back(e.u);
            endpoints.push_back(e.v);
        }
    }
    return edges;
}

// Uniform attachment: like gen_ba but the neighbor is uniform among existing
// vertices.
inline std::vector<WeightedEdge> gen_ua(std::uint64_t n, std::uint64_t x,
                                        const GraphSnapshot& seed_graph, std::uint64_t seed) {
    if (seed_graph.n == 0 || seed_graph.edges.empty())
        throw std::invalid_argument("gen_ua: seed graph must be nonempty");
    if (x < 1) throw std::invalid_argument("gen_ua: x must be at least 1");
    if (n < seed_graph.n) throw std::invalid_argument("gen_ua: n smaller than seed graph");
    SplitMix64 rng(derive_seed(seed, 0x55410000ull));
    std::vector<WeightedEdge> edges = seed_graph.edges;
    for (VertexId u = seed_graph.n; u < n; ++u) {
        for (std::uint64_t i = 0; i < x; ++i) {
            const VertexId v = rng.next_below(u);
            edges.push_back({u, v, detail::random_weight(rng, n)});
        }
    }
    return edges;
}

// Default seed graph for tests and small benchmark configs.
inline GraphSnapshot default_seed_graph(std::uint64_t seed) {
    GraphSnapshot g;
    g.n = 256;
    g.edges = gen_er(g.n, 0.05, seed);
    return g;
}

enum class PartitionMode { RoundRobin, Contiguous, Shuffled };

inline std::vector<std::vector<WeightedEdge>> partition(std::vector<WeightedEdge> edges,
                                                        unsigned k, PartitionMode mode,
                                                        std::uint64_t seed = 0) {
    if (k < 1) throw std::invalid_argument("partition: k must be at least 1");
    std::vector<std::vector<WeightedEdge>> out(k);
    if (mode == PartitionMode::Shuffled) {
        SplitMix64 rng(derive_seed(seed, 0x53480000ull));
        for (std::size_t i = edges.size(); i > 1; --i)
            std::swap(edges[i - 1], edges[rng.next_below(i)]);
    }
    if (mode == PartitionMode::Contiguous) {
        const std::size_t m = edges.size();
        std::size_t begin = 0;
        for (unsigned i = 0; i < k; ++i) {
            const std::size_t len = m / k + (i < m % k ? 1 : 0);
            out[i].assign(edges.begin() + begin, edges.begin() + begin + len);
            begin += len;
        }
    } else {
        for (std::size_t i = 0; i < edges.size(); ++i) out[i % k].push_back(edges[i]);
    }
    return out;
}

// --- binary stream file format -------------------------------------------
// 24-byte header: magic "PSTRM1\0\0", n (u64 LE), record count (u64 LE),
// then records of (u: u64, v: u64, w: f64), all little-endian.

inline constexpr char kStreamMagic[8] = {'P', 'S', 'T', 'R', 'M', '1', '\0', '\0'};

inline void write_stream(const std::string& path, std::uint64_t n,
                         std::span<const WeightedEdge> edges) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("write_stream: cannot open " + path);
    const std::uint64_t count = edges.size();
    f.write(kStreamMagic, 8);
    f.write(reinterpret_cast<const char*>(&n), 8);
    f.write(reinterpret_cast<const char*>(&count), 8);
    for (const auto& e : edges) {
        f.write(reinterpret_cast<const char*>(&e.u), 8);
        f.write(reinterpret_cast<const char*>(&e.v), 8);
        f.write(reinterpret_cast<const char*>(&e.w), 8);
    }
    if (!f) throw std::runtime_error("write_stream: write failed for " + path);
}

inline GraphSnapshot read_stream(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("read_stream: cannot open " + path);
    char magic[8];
    GraphSnapshot g;
    std::uint64_t count = 0;
    f.read(magic, 8);
    f.read(reinterpret_cast<char*>(&g.n), 8);
    f.read(reinterpret_cast<char*>(&count), 8);
    if (!f || std::memcmp(magic, kStreamMagic, 8) != 0)
        throw std::runtime_error("read_stream: malformed header in " + path);
    g.edges.resize(count);
    for (auto& e : g.edges) {
        f.read(reinterpret_cast<char*>(&e.u), 8);
        f.read(reinterpret_cast<char*>(&e.v), 8);
        f.read(reinterpret_cast<char*>(&e.w), 8);
    }
    if (!f) throw std::runtime_error("read_stream: truncated record in " + path);
    return g;
}

} // namespace polymatch
