#pragma once

#include <atomic>
#include <barrier>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <thread>
#include <vector>

#include "polymatch/engine.hpp"

namespace polymatch {

// Mutual-partner matching representation. partner[u] = v and partner[v] = u
// together define a matched pair; one-sided states occur only transiently
// inside a round. pweight[u] is the weight of u's current matched edge.
struct PartnerTable {
    std::vector<std::atomic<VertexId>> partner;
    std::vector<std::atomic<double>> pweight;
    std::vector<SpinLock> lock;

    explicit PartnerTable(std::uint64_t n) : partner(n), pweight(n), lock(n) {
        for (auto& p : partner) p.store(kNoVertex, std::memory_order_relaxed);
    }

    Matching to_matching() const {
        Matching m;
        for (VertexId u = 0; u < partner.size(); ++u) {
            const VertexId v = partner[u].load(std::memory_order_relaxed);
            if (v != kNoVertex && u < v && partner[v].load(std::memory_order_relaxed) == u)
                m.edges.push_back({u, v, pweight[u].load(std::memory_order_relaxed)});
        }
        return m;
    }
};

// Installs (u, v): each endpoint's old partner is detached under the two
// endpoint locks, then the new pair is written. Callers feed vertex-disjoint
// augmenting edges, so each vertex gains its new partner from one writer.
inline void augment_matching(VertexId u, VertexId v, double w, PartnerTable& pt,
                             WorkerCtx& ctx) {
    const VertexId pair[2] = {u, v};
    for (int i = 0; i < 2; ++i) {
        const VertexId x = pair[i];
        const VertexId other = pair[1 - i];
        const VertexId y = pt.partner[x].load(std::memory_order_acquire);
        if (y == kNoVertex) {
            pt.pweight[x].store(w, std::memory_order_relaxed);
            pt.partner[x].store(other, std::memory_order_release);
            continue;
        }
        const VertexId lo = x < y ? x : y;
        const VertexId hi = x < y ? y : x;
        unsigned backoff_us = 1;
        while (!pt.lock[lo].try_lock()) {
            ctx.supersteps += 1;
            if (ctx.check_deadline()) return;
            detail::backoff_pause(backoff_us);
        }
        backoff_us = 1;
        while (!pt.lock[hi].try_lock()) {
            ctx.supersteps += 1;
            if (ctx.check_deadline()) {
                pt.lock[lo].unlock();
                return;
            }
            detail::backoff_pause(backoff_us);
        }
        if (pt.partner[y].load(std::memory_order_acquire) == x)
            pt.partner[y].store(kNoVertex, std::memory_order_release);
        pt.pweight[x].store(w, std::memory_order_relaxed);
        pt.partner[x].store(other, std::memory_order_release);
        pt.lock[hi].unlock();
        pt.lock[lo].unlock();
    }
}

struct GainEdge {
    WeightedEdge edge; // original edge (original weight)
    double gain;       // weight used for class assignment this call
};

// State shared by the workers of one reduce call: epoch-stamped marks (no
// per-call clearing needed), per-vertex claim locks, and the weight extrema
// reduced across workers.
struct ReduceShared {
    std::vector<std::atomic<std::uint64_t>> mark;
    std::vector<SpinLock> vlock;
    std::atomic<std::uint64_t> epoch{0};
    std::atomic<double> wmax{0.0};
    std::atomic<double> wmin{0.0};

    explicit ReduceShared(std::uint64_t n) : mark(n), vlock(n) {}
};

namespace detail {

inline void atomic_store_max(std::atomic<double>& a, double v) {
    double cur = a.load(std::memory_order_relaxed);
    while (v > cur && !a.compare_exchange_weak(cur, v)) {
    }
}

inline void atomic_store_min(std::atomic<double>& a, double v) {
    double cur = a.load(std::memory_order_relaxed);
    while (v < cur && !a.compare_exchange_weak(cur, v)) {
    }
}

// One worker's share of a synchronized maximal-matching reduction. Sweeps
// geometric weight classes from heavy to light; within a class, edges whose
// endpoints are both unmarked are committed greedily under vertex locks.
// Classes extend below threshold 1 so that fractional gains are still
// covered. Appends committed edges (own share only) to `out`.
template <typename Barrier>
void reduce_to_maximal_worker(const std::vector<GainEdge>& mine, double epsilon,
                              ReduceShared& sh, Barrier& bar, unsigned worker,
                              WorkerCtx& ctx, std::vector<GainEdge>& out) {
    bar.arrive_and_wait();
    if (worker == 0) {
        sh.wmax.store(0.0, std::memory_order_relaxed);
        sh.wmin.store(std::numeric_limits<double>::infinity(), std::memory_order_relaxed);
        sh.epoch.fetch_add(1, std::memory_order_acq_rel);
    }
    bar.arrive_and_wait();
    const std::uint64_t stamp = sh.epoch.load(std::memory_order_acquire);
    double lmax = 0.0, lmin = std::numeric_limits<double>::infinity();
    for (const auto& ge : mine) {
        if (ge.gain > lmax) lmax = ge.gain;
        if (ge.gain < lmin) lmin = ge.gain;
    }
    atomic_store_max(sh.wmax, lmax);
    atomic_store_min(sh.wmin, lmin);
    bar.arrive_and_wait();
    const double wmax = sh.wmax.load(std::memory_order_acquire);
    if (wmax <= 0.0) return; // no candidate anywhere; all workers agree
    const double wmin = sh.wmin.load(std::memory_order_acquire);
    const double logb = std::log1p(epsilon);
    long r_hi = static_cast<long>(std::floor(std::log(wmax) / logb));
    long r_lo = std::min(1L, static_cast<long>(std::floor(std::log(wmin) / logb)));
    while (std::pow(1.0 + epsilon, r_lo) > wmin) --r_lo; // guard against log rounding
    for (long r = r_hi; r >= r_lo; --r) {
        const double thr = std::pow(1.0 + epsilon, r);
        for (const auto& ge : mine) {
            if (ge.gain < thr) continue;
            const VertexId u = ge.edge.u, v = ge.edge.v;
            if (sh.mark[u].load(std::memory_order_acquire) == stamp ||
                sh.mark[v].load(std::memory_order_acquire) == stamp)
                continue;
            const VertexId lo = u < v ? u : v;
            const VertexId hi = u < v ? v : u;
            unsigned backoff_us = 1;
            bool have = false;
            for (;;) {
                if (sh.vlock[lo].try_lock()) {
                    if (sh.vlock[hi].try_lock()) {
                        have = true;
                        break;
                    }
                    sh.vlock[lo].unlock();
                }
                ctx.supersteps += 1;
                if (ctx.check_deadline()) break;
                detail::backoff_pause(backoff_us);
            }
            if (!have) continue;
            if (sh.mark[u].load(std::memory_order_relaxed) != stamp &&
                sh.mark[v].load(std::memory_order_relaxed) != stamp) {
                sh.mark[u].store(stamp, std::memory_order_release);
                sh.mark[v].store(stamp, std::memory_order_release);
                out.push_back(ge);
            }
            sh.vlock[hi].unlock();
            sh.vlock[lo].unlock();
        }
        bar.arrive_and_wait(); // keep the heavy-to-light class order global
    }
}

} // namespace detail

// Standalone form for tests and reuse: one thread per input set, returns the
// per-worker shares of one maximal-matching reduction over the union.
inline std::vector<Matching> reduce_to_maximal(
    const std::vector<std::vector<WeightedEdge>>& sets, std::uint64_t n, double epsilon) {
    const unsigned k = static_cast<unsigned>(sets.size());
    ReduceShared sh(n);
    std::barrier bar(static_cast<std::ptrdiff_t>(k));
    std::vector<std::vector<GainEdge>> outs(k);
    std::vector<std::thread> threads;
    std::atomic<bool> abort{false};
    threads.reserve(k);
    for (unsigned l = 0; l < k; ++l) {
        threads.emplace_back([&, l] {
            std::vector<GainEdge> mine;
            mine.reserve(sets[l].size());
            for (const auto& e : sets[l]) mine.push_back({e, e.w});
            WorkerCtx ctx;
            ctx.worker = l;
            ctx.abort = &abort;
            ctx.deadline = std::chrono::steady_clock::now() + std::chrono::minutes(10);
            detail::reduce_to_maximal_worker(mine, epsilon, sh, bar, l, ctx, outs[l]);
        });
    }
    for (auto& t : threads) t.join();
    std::vector<Matching> res(k);
    for (unsigned l = 0; l < k; ++l)
        for (const auto& ge : outs[l]) res[l].edges.push_back(ge.edge);
    return res;
}

inline unsigned amplification_rounds(double epsilon, unsigned rounds_override = 0) {
    unsigned t = static_cast<unsigned>(std::ceil(8.0 * std::log(2.0 / epsilon)));
    if (t < 1) t = 1;
    if (rounds_override > 0 && rounds_override < t) t = rounds_override;
    return t;
}

// Deferrable streaming followed by synchronized augmentation rounds. Each
// round recomputes residual gains against the current matching, reduces the
// positive-gain candidates to a vertex-disjoint set, and augments with it.
// The matching is read off the partner table at the end.
template <EdgeSource Stream>
MatchingResult run_ps_mwm_pr(std::vector<Stream>& streams, std::uint64_t n,
                             const EngineConfig& cfg, unsigned rounds_override = 0) {
    cfg.validate();
    if (cfg.r != 1)
        throw std::invalid_argument("run_ps_mwm_pr: dual-variable groups are not supported");
    if (streams.size() != cfg.k)
        throw std::invalid_argument("run_ps_mwm_pr: stream count must equal config.k");

    using clock = std::chrono::steady_clock;
    const auto t_start = clock::now();
    const unsigned k = cfg.k;
    const unsigned rounds = amplification_rounds(cfg.epsilon, rounds_override);

    DualTable duals(n);
    PartnerTable pt(n);
    ReduceShared rs(n);
    std::atomic<bool> abort{false};
    std::atomic<bool> round_abort{false};
    const auto deadline =
        t_start + std::chrono::duration_cast<clock::duration>(
                      std::chrono::duration<double>(cfg.watchdog_seconds));

    std::vector<detail::WorkerLocal> wl(k);
    std::vector<std::atomic<std::uint64_t>> round_augs(rounds);
    MatchingResult res;
    std::barrier bar(static_cast<std::ptrdiff_t>(k));
    clock::time_point t_post_begin{};
    const auto t_pre_end = clock::now();

    auto worker = [&](unsigned l) {
        detail::WorkerLocal& L = wl[l];
        L.ctx.worker = l;
        L.ctx.deadline = deadline;
        L.ctx.abort = &abort;

        WeightedEdge e;
        while (streams[l].next(e)) {
            if (L.ctx.aborted()) break;
            L.consumed += 1;
            if (e.u == e.v) continue;
            if (cfg.normalization_enabled) {
                if (e.w > L.wmax_seen) L.wmax_seen = e.w;
                if (!normalization_keep(e.w, L.wmax_seen, n, cfg.epsilon)) continue;
            }
            if (e.w < L.kept_min) L.kept_min = e.w;
            if (e.w > L.kept_max) L.kept_max = e.w;
            process_edge_ds(e, L.stack, L.deferred, duals, cfg.epsilon, L.ctx);
        }
        // candidate set: deferred edges plus everything this worker stacked
        std::vector<WeightedEdge> cand = std::move(L.deferred);
        L.deferred_total = cand.size();
        for (const auto& ent : L.stack) cand.push_back(ent.edge);
        L.stack.clear();

        bar.arrive_and_wait();
        if (l == 0) {
            res.final_alpha.resize(n);
            for (std::uint64_t u = 0; u < n; ++u)
                res.final_alpha[u] = duals.alpha[u].load(std::memory_order_relaxed);
            t_post_begin = clock::now();
        }
        bar.arrive_and_wait();

        for (unsigned t = 0; t < rounds; ++t) {
            if (l == 0) round_abort.store(L.ctx.check_deadline(), std::memory_order_relaxed);
            bar.arrive_and_wait();
            if (round_abort.load(std::memory_order_relaxed)) break;

            std::vector<GainEdge> gains;
            gains.reserve(cand.size());
            for (const auto& c : cand) {
                const VertexId pu = pt.partner[c.u].load(std::memory_order_acquire);
                const VertexId pv = pt.partner[c.v].load(std::memory_order_acquire);
                if (pu == c.v && pv == c.u) continue; // already a matched pair
                double gain = c.w;
                if (pu != kNoVertex) gain -= pt.pweight[c.u].load(std::memory_order_relaxed);
                if (pv != kNoVertex) gain -= pt.pweight[c.v].load(std::memory_order_relaxed);
                if (gain > 0.0) gains.push_back({c, gain});
            }
            std::vector<GainEdge> won;
            detail::reduce_to_maximal_worker(gains, cfg.epsilon, rs, bar, l, L.ctx, won);
            for (const auto& ge : won)
                augment_matching(ge.edge.u, ge.edge.v, ge.edge.w, pt, L.ctx);
            round_augs[t].fetch_add(won.size(), std::memory_order_relaxed);
            bar.arrive_and_wait(); // all augments visible before the next round
        }
    };

    std::vector<std::thread> threads;
    threads.reserve(k);
    for (unsigned l = 0; l < k; ++l) threads.emplace_back(worker, l);
    for (auto& t : threads) t.join();
    const auto t_end = clock::now();

    res.matching = pt.to_matching();
    for (auto& L : wl) {
        res.supersteps.push_back(L.ctx.supersteps);
        res.stream_lengths.push_back(L.consumed);
        res.global_reads += L.ctx.global_reads;
        res.global_writes += L.ctx.global_writes;
        res.stacked_edge_count += L.ctx.stacked;
        res.deferred_edge_count += L.deferred_total;
        res.min_kept_weight = std::min(res.min_kept_weight, L.kept_min);
        res.max_kept_weight = std::max(res.max_kept_weight, L.kept_max);
    }
    res.alpha_sum = 0.0;
    for (double a : res.final_alpha) res.alpha_sum += a;
    res.post_alpha_sum = res.alpha_sum; // duals are not unwound on this path
    res.z_all_zero = false;
    res.stacked_per_vertex.resize(n);
    for (std::uint64_t u = 0; u < n; ++u)
        res.stacked_per_vertex[u] = duals.stacked_count[u].load(std::memory_order_relaxed);
    res.pr_round_augmentations.reserve(rounds);
    for (auto& a : round_augs)
        res.pr_round_augmentations.push_back(a.load(std::memory_order_relaxed));

    using secs = std::chrono::duration<double>;
    res.timings.preprocessing_s = secs(t_pre_end - t_start).count();
    res.timings.streaming_s = secs(t_post_begin - t_start).count();
    res.timings.postprocessing_s = secs(t_end - t_post_begin).count();
    res.status = abort.load() ? RunStatus::WatchdogExpired : RunStatus::Ok;
    return res;
}

} // namespace polymatch
