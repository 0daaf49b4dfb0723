#pragma once

#include <atomic>
#include <barrier>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <thread>
#include <vector>

#include "polymatch/core.hpp"
#include "polymatch/streams.hpp"

namespace polymatch {

class SpinLock {
public:
    bool try_lock() { return !locked_.exchange(true, std::memory_order_acquire); }
    void unlock() { locked_.store(false, std::memory_order_release); }

private:
    std::atomic<bool> locked_{false};
};

// Global shared state of one run: duals, per-vertex locks, matched marks and
// the integer z-counters used for tightness detection in post-processing.
// alpha[u] and z[u] are written only under lock[u] during streaming and are
// monotone non-decreasing there; marks are written lock-free but only for
// vertex-disjoint tight edges.
struct DualTable {
    std::uint64_t n;
    std::vector<std::atomic<double>> alpha;
    std::vector<SpinLock> lock;
    std::vector<std::atomic<std::uint8_t>> mark;
    std::vector<std::atomic<std::uint64_t>> z;
    std::vector<std::atomic<std::uint32_t>> stacked_count; // instrumentation

    explicit DualTable(std::uint64_t n_)
        : n(n_), alpha(n_), lock(n_), mark(n_), z(n_), stacked_count(n_) {}

    double alpha_sum() const {
        double s = 0.0;
        for (const auto& a : alpha) s += a.load(std::memory_order_relaxed);
        return s;
    }
};

struct StackEntry {
    WeightedEdge edge;
    double gain = 0.0;
    std::uint64_t z_stamp = 0;
};

using WorkerStack = std::vector<StackEntry>;
using DeferredSet = std::vector<WeightedEdge>;

enum class EdgeOutcome { Stacked, Skipped, Deferred };
enum class RunStatus { Ok, WatchdogExpired };

// Per-worker bookkeeping threaded through the edge-processing primitives.
struct WorkerCtx {
    unsigned worker = 0;
    unsigned group = 0;
    std::uint64_t supersteps = 0;
    std::uint64_t global_reads = 0;
    std::uint64_t global_writes = 0;
    std::uint64_t stacked = 0;
    double popped_gain = 0.0;
    std::chrono::steady_clock::time_point deadline{};
    std::atomic<bool>* abort = nullptr;

    bool aborted() const {
        return abort != nullptr && abort->load(std::memory_order_relaxed);
    }
    // Returns true once the wall-clock watchdog has fired.
    bool check_deadline() {
        if (abort == nullptr) return false;
        if (abort->load(std::memory_order_relaxed)) return true;
        if (std::chrono::steady_clock::now() > deadline) {
            abort->store(true, std::memory_order_relaxed);
            return true;
        }
        return false;
    }
};

namespace detail {

inline void backoff_pause(unsigned& backoff_us) {
    std::this_thread::sleep_for(std::chrono::microseconds(backoff_us));
    if (backoff_us < 256) backoff_us *= 2;
}

// Shared tail of the edge-processing strategies: both endpoint locks are
// held; re-verify eligibility, then apply the dual update and push. The
// resulting dual values are reported through out_au/out_av so grouped
// callers can refresh their caches without extra global traffic.
inline EdgeOutcome stack_under_locks(const WeightedEdge& e, WorkerStack& stack,
                                     DualTable& duals, double epsilon, WorkerCtx& ctx,
                                     double* out_au = nullptr, double* out_av = nullptr) {
    const double au = duals.alpha[e.u].load(std::memory_order_relaxed);
    const double av = duals.alpha[e.v].load(std::memory_order_relaxed);
    ctx.global_reads += 2;
    if (e.w <= (1.0 + epsilon) * (au + av)) {
        if (out_au) *out_au = au;
        if (out_av) *out_av = av;
        return EdgeOutcome::Skipped;
    }
    const double gain = e.w - (au + av);
    duals.alpha[e.u].store(au + gain, std::memory_order_release);
    duals.alpha[e.v].store(av + gain, std::memory_order_release);
    if (out_au) *out_au = au + gain;
    if (out_av) *out_av = av + gain;
    const std::uint64_t zu = duals.z[e.u].fetch_add(1, std::memory_order_acq_rel) + 1;
    const std::uint64_t zv = duals.z[e.v].fetch_add(1, std::memory_order_acq_rel) + 1;
    ctx.global_writes += 4;
    stack.push_back({e, gain, zu + zv});
    duals.stacked_count[e.u].fetch_add(1, std::memory_order_relaxed);
    duals.stacked_count[e.v].fetch_add(1, std::memory_order_relaxed);
    ctx.stacked += 1;
    return EdgeOutcome::Stacked;
}

} // namespace detail

// Non-deferrable strategy: keep trying for both endpoint locks (ascending
// vertex order) as long as the edge stays eligible. Lock-free reads may be
// stale; staleness is safe because duals only grow during streaming.
inline EdgeOutcome process_edge(const WeightedEdge& e, WorkerStack& stack, DualTable& duals,
                                double epsilon, WorkerCtx& ctx) {
    ctx.supersteps += 1;
    double au = duals.alpha[e.u].load(std::memory_order_acquire);
    double av = duals.alpha[e.v].load(std::memory_order_acquire);
    ctx.global_reads += 2;
    if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;

    const VertexId lo = e.u < e.v ? e.u : e.v;
    const VertexId hi = e.u < e.v ? e.v : e.u;
    unsigned backoff_us = 1;
    for (;;) {
        if (duals.lock[lo].try_lock()) {
            if (duals.lock[hi].try_lock()) break;
            duals.lock[lo].unlock();
        }
        ctx.supersteps += 1; // extra contention iteration
        if (ctx.check_deadline()) return EdgeOutcome::Skipped;
        detail::backoff_pause(backoff_us);
        au = duals.alpha[e.u].load(std::memory_order_acquire);
        av = duals.alpha[e.v].load(std::memory_order_acquire);
        ctx.global_reads += 2;
        if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;
    }
    const EdgeOutcome out = detail::stack_under_locks(e, stack, duals, epsilon, ctx);
    duals.lock[hi].unlock();
    duals.lock[lo].unlock();
    return out;
}

// Deferrable strategy: constant work per call. One try-lock round; if it
// fails while the edge is still eligible, park the edge for post-processing.
inline EdgeOutcome process_edge_ds(const WeightedEdge& e, WorkerStack& stack,
                                   DeferredSet& deferred, DualTable& duals, double epsilon,
                                   WorkerCtx& ctx) {
    ctx.supersteps += 1;
    double au = duals.alpha[e.u].load(std::memory_order_acquire);
    double av = duals.alpha[e.v].load(std::memory_order_acquire);
    ctx.global_reads += 2;
    if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;

    const VertexId lo = e.u < e.v ? e.u : e.v;
    const VertexId hi = e.u < e.v ? e.v : e.u;
    bool locked = false;
    if (duals.lock[lo].try_lock()) {
        if (duals.lock[hi].try_lock()) {
            locked = true;
        } else {
            duals.lock[lo].unlock();
        }
    }
    if (!locked) {
        ctx.supersteps += 1;
        au = duals.alpha[e.u].load(std::memory_order_acquire);
        av = duals.alpha[e.v].load(std::memory_order_acquire);
        ctx.global_reads += 2;
        if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;
        deferred.push_back(e);
        return EdgeOutcome::Deferred;
    }
    const EdgeOutcome out = detail::stack_under_locks(e, stack, duals, epsilon, ctx);
    duals.lock[hi].unlock();
    duals.lock[lo].unlock();
    return out;
}

// Post-processing: pop in LIFO order, wait for the popped edge to become
// tight (z-stamp equality), match if both endpoints are unmarked, then
// reverse the edge's dual and counter increments. Tight edges are
// vertex-disjoint, so marks and reversals need no locks.
inline Matching process_stack(WorkerStack& stack, DualTable& duals, WorkerCtx& ctx) {
    Matching m;
    while (!stack.empty()) {
        const StackEntry ent = stack.back();
        stack.pop_back();
        const VertexId u = ent.edge.u, v = ent.edge.v;
        std::uint64_t polls = 0;
        while (duals.z[u].load(std::memory_order_acquire) +
                   duals.z[v].load(std::memory_order_acquire) !=
               ent.z_stamp) {
            if ((++polls & 63) == 0) {
                std::this_thread::yield();
                if (ctx.check_deadline()) return m;
            }
        }
        if (duals.mark[u].load() == 0 && duals.mark[v].load() == 0) {
            m.edges.push_back(ent.edge);
            duals.mark[u].store(1);
            duals.mark[v].store(1);
        }
        ctx.popped_gain += ent.gain;
        duals.alpha[u].fetch_sub(ent.gain, std::memory_order_acq_rel);
        duals.alpha[v].fetch_sub(ent.gain, std::memory_order_acq_rel);
        duals.z[u].fetch_sub(1, std::memory_order_acq_rel);
        duals.z[v].fetch_sub(1, std::memory_order_acq_rel);
    }
    return m;
}

struct PhaseTimings {
    double preprocessing_s = 0.0;
    double streaming_s = 0.0;
    double postprocessing_s = 0.0;
    double total_s() const { return preprocessing_s + streaming_s + postprocessing_s; }
};

struct MatchingResult {
    Matching matching;
    std::vector<double> final_alpha; // post-streaming (pre-reversal) snapshot
    double alpha_sum = 0.0;          // sum of final_alpha
    double post_alpha_sum = 0.0;     // after all reversals
    double popped_gain_sum = 0.0;
    bool z_all_zero = false;
    std::vector<std::uint64_t> supersteps;     // per worker
    std::vector<std::uint64_t> stream_lengths; // edges consumed per worker
    PhaseTimings timings;
    std::uint64_t global_reads = 0;
    std::uint64_t global_writes = 0;
    std::uint64_t stacked_edge_count = 0;
    std::uint64_t deferred_edge_count = 0;
    std::vector<std::uint32_t> stacked_per_vertex;
    double min_kept_weight = std::numeric_limits<double>::infinity();
    double max_kept_weight = 0.0;
    bool delegate_exclusive = true;
    std::vector<std::uint64_t> pr_round_augmentations; // amplification runs only
    RunStatus status = RunStatus::Ok;

    std::uint64_t effective_iterations() const {
        std::uint64_t best = 0;
        for (auto s : supersteps) best = std::max(best, s);
        return best;
    }
};

namespace detail {

struct WorkerLocal {
    WorkerStack stack;
    DeferredSet deferred;
    WorkerCtx ctx;
    Matching local_matching;
    std::uint64_t consumed = 0;
    std::uint64_t deferred_total = 0;
    double kept_min = std::numeric_limits<double>::infinity();
    double kept_max = 0.0;
    double wmax_seen = 0.0;
};

// Shared scaffolding for the non-grouped and grouped engines. `gd` selects
// the grouped per-edge path when non-null.
template <EdgeSource Stream, typename PerEdge>
MatchingResult run_engine(std::vector<Stream>& streams, std::uint64_t n,
                          const EngineConfig& cfg, PerEdge per_edge) {
    cfg.validate();
    if (streams.size() != cfg.k)
        throw std::invalid_argument("run: stream count must equal config.k");

    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    const unsigned k = cfg.k;

    DualTable duals(n);
    std::atomic<bool> abort{false};
    const auto deadline =
        t_start + std::chrono::duration_cast<clock::duration>(
                      std::chrono::duration<double>(cfg.watchdog_seconds));

    std::vector<WorkerLocal> wl(k);
    MatchingResult res;
    clock::time_point t_stream_begin{}, t_post_begin{};
    std::barrier bar(static_cast<std::ptrdiff_t>(k));

    const auto t_pre_end = clock::now();

    auto worker = [&](unsigned l) {
        WorkerLocal& L = wl[l];
        L.ctx.worker = l;
        L.ctx.group = l / (k / cfg.r);
        L.ctx.deadline = deadline;
        L.ctx.abort = &abort;

        WeightedEdge e;
        while (streams[l].next(e)) {
            if (L.ctx.aborted()) break;
            L.consumed += 1;
            if (e.u == e.v) continue; // self-loops dropped at ingestion
            if (cfg.normalization_enabled) {
                if (e.w > L.wmax_seen) L.wmax_seen = e.w;
                if (!normalization_keep(e.w, L.wmax_seen, n, cfg.epsilon)) continue;
            }
            if (e.w < L.kept_min) L.kept_min = e.w;
            if (e.w > L.kept_max) L.kept_max = e.w;
            per_edge(e, L, duals);
        }
        if (cfg.strategy == Strategy::Deferrable) {
            L.deferred_total = L.deferred.size();
            for (const auto& d : L.deferred) {
                if (L.ctx.aborted()) break;
                process_edge(d, L.stack, duals, cfg.epsilon, L.ctx);
            }
            L.deferred.clear();
        }
        bar.arrive_and_wait();
        if (l == 0) {
            res.final_alpha.resize(n);
            for (std::uint64_t u = 0; u < n; ++u)
                res.final_alpha[u] = duals.alpha[u].load(std::memory_order_relaxed);
            t_post_begin = clock::now();
        }
        bar.arrive_and_wait();
        L.local_matching = process_stack(L.stack, duals, L.ctx);
    };

    t_stream_begin = clock::now();
    std::vector<std::thread> threads;
    threads.reserve(k);
    for (unsigned l = 0; l < k; ++l) threads.emplace_back(worker, l);
    for (auto& t : threads) t.join();
    const auto t_end = clock::now();

    for (auto& L : wl) {
        res.matching.edges.insert(res.matching.edges.end(), L.local_matching.edges.begin(),
                                  L.local_matching.edges.end());
        res.supersteps.push_back(L.ctx.supersteps);
        res.stream_lengths.push_back(L.consumed);
        res.global_reads += L.ctx.global_reads;
        res.global_writes += L.ctx.global_writes;
        res.stacked_edge_count += L.ctx.stacked;
        res.deferred_edge_count += L.deferred_total;
        res.popped_gain_sum += L.ctx.popped_gain;
        res.min_kept_weight = std::min(res.min_kept_weight, L.kept_min);
        res.max_kept_weight = std::max(res.max_kept_weight, L.kept_max);
    }
    res.alpha_sum = 0.0;
    for (double a : res.final_alpha) res.alpha_sum += a;
    res.post_alpha_sum = duals.alpha_sum();
    res.z_all_zero = true;
    for (const auto& zc : duals.z)
        if (zc.load(std::memory_order_relaxed) != 0) res.z_all_zero = false;
    res.stacked_per_vertex.resize(n);
    for (std::uint64_t u = 0; u < n; ++u)
        res.stacked_per_vertex[u] = duals.stacked_count[u].load(std::memory_order_relaxed);

    using secs = std::chrono::duration<double>;
    res.timings.preprocessing_s = secs(t_pre_end - t_start).count();
    res.timings.streaming_s = secs(t_post_begin - t_stream_begin).count();
    res.timings.postprocessing_s = secs(t_end - t_post_begin).count();
    res.status = abort.load() ? RunStatus::WatchdogExpired : RunStatus::Ok;
    return res;
}

} // namespace detail

// k workers, one stream each, shared dual table. cfg.r must be 1; the
// grouped variant lives in numa_groups.hpp.
template <EdgeSource Stream>
MatchingResult run_ps_mwm(std::vector<Stream>& streams, std::uint64_t n,
                          const EngineConfig& cfg) {
    if (cfg.r != 1) throw std::invalid_argument("run_ps_mwm: use run_ps_mwm_ld for r > 1");
    return detail::run_engine(streams, n, cfg,
                              [&cfg](const WeightedEdge& e, detail::WorkerLocal& L,
                                     DualTable& duals) {
                                  if (cfg.strategy == Strategy::Deferrable)
                                      process_edge_ds(e, L.stack, L.deferred, duals,
                                                      cfg.epsilon, L.ctx);
                                  else
                                      process_edge(e, L.stack, duals, cfg.epsilon, L.ctx);
                              });
}

} // namespace polymatch
