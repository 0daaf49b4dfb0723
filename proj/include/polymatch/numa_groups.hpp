#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "polymatch/engine.hpp"

namespace polymatch {

// Per-group replicas of the dual vector. Workers in group j test edges
// against alpha_local of their own group; only delegates that still see an
// eligible edge touch the global table, serialized per group by glock.
// alpha_local[u] trails the global alpha[u] and is refreshed on delegation.
struct GroupDualTable {
    struct Group {
        std::vector<std::atomic<double>> alpha_local;
        std::vector<SpinLock> lock_local;
        SpinLock glock;
        std::atomic<std::uint32_t> glock_holders{0};

        explicit Group(std::uint64_t n) : alpha_local(n), lock_local(n) {}
    };

    unsigned r;
    std::vector<std::unique_ptr<Group>> groups;
    std::atomic<bool> exclusivity_violated{false};

    GroupDualTable(std::uint64_t n, unsigned r_) : r(r_) {
        groups.reserve(r_);
        for (unsigned j = 0; j < r_; ++j) groups.push_back(std::make_unique<Group>(n));
    }
};

// Grouped edge processing: the cheap skip test runs against the caller's
// group-local cache only. Global state is reached solely on the delegate
// path, under the group lock, so global traffic tracks stacking activity
// rather than stream length.
inline EdgeOutcome process_edge_ld(const WeightedEdge& e, WorkerStack& stack,
                                   DualTable& duals, GroupDualTable& gd, double epsilon,
                                   WorkerCtx& ctx) {
    GroupDualTable::Group& g = *gd.groups[ctx.group];
    ctx.supersteps += 1;
    double au = g.alpha_local[e.u].load(std::memory_order_acquire);
    double av = g.alpha_local[e.v].load(std::memory_order_acquire);
    if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;

    const VertexId lo = e.u < e.v ? e.u : e.v;
    const VertexId hi = e.u < e.v ? e.v : e.u;
    unsigned backoff_us = 1;
    for (;;) {
        if (g.lock_local[lo].try_lock()) {
            if (g.lock_local[hi].try_lock()) break;
            g.lock_local[lo].unlock();
        }
        ctx.supersteps += 1;
        if (ctx.check_deadline()) return EdgeOutcome::Skipped;
        detail::backoff_pause(backoff_us);
        au = g.alpha_local[e.u].load(std::memory_order_acquire);
        av = g.alpha_local[e.v].load(std::memory_order_acquire);
        if (e.w <= (1.0 + epsilon) * (au + av)) return EdgeOutcome::Skipped;
    }
    // re-test under local locks before paying for delegation
    au = g.alpha_local[e.u].load(std::memory_order_acquire);
    av = g.alpha_local[e.v].load(std::memory_order_acquire);
    EdgeOutcome out = EdgeOutcome::Skipped;
    if (e.w > (1.0 + epsilon) * (au + av)) {
        backoff_us = 1;
        while (!g.glock.try_lock()) {
            ctx.supersteps += 1;
            if (ctx.check_deadline()) {
                g.lock_local[hi].unlock();
                g.lock_local[lo].unlock();
                return EdgeOutcome::Skipped;
            }
            detail::backoff_pause(backoff_us);
        }
        if (g.glock_holders.fetch_add(1, std::memory_order_acq_rel) != 0)
            gd.exclusivity_violated.store(true, std::memory_order_relaxed);
        // global endpoint locks, then the shared stacking path; the values it
        // read or wrote refresh the local cache with no extra global traffic
        const VertexId glo = lo, ghi = hi;
        backoff_us = 1;
        for (;;) {
            if (duals.lock[glo].try_lock()) {
                if (duals.lock[ghi].try_lock()) break;
                duals.lock[glo].unlock();
            }
            ctx.supersteps += 1;
            if (ctx.check_deadline()) {
                g.glock_holders.fetch_sub(1, std::memory_order_acq_rel);
                g.glock.unlock();
                g.lock_local[hi].unlock();
                g.lock_local[lo].unlock();
                return EdgeOutcome::Skipped;
            }
            detail::backoff_pause(backoff_us);
        }
        double au_new = 0.0, av_new = 0.0;
        out = detail::stack_under_locks(e, stack, duals, epsilon, ctx, &au_new, &av_new);
        duals.lock[ghi].unlock();
        duals.lock[glo].unlock();
        g.alpha_local[e.u].store(au_new, std::memory_order_release);
        g.alpha_local[e.v].store(av_new, std::memory_order_release);
        g.glock_holders.fetch_sub(1, std::memory_order_acq_rel);
        g.glock.unlock();
    }
    g.lock_local[hi].unlock();
    g.lock_local[lo].unlock();
    return out;
}

// PS-MWM with r dual-variable groups. r=1 skips the local tables entirely
// and behaves exactly like run_ps_mwm.
template <EdgeSource Stream>
MatchingResult run_ps_mwm_ld(std::vector<Stream>& streams, std::uint64_t n,
                             const EngineConfig& cfg) {
    cfg.validate();
    if (cfg.strategy == Strategy::Deferrable && cfg.r > 1)
        throw std::invalid_argument(
            "run_ps_mwm_ld: deferrable strategy is only defined for the ungrouped engine");
    if (cfg.r == 1) {
        EngineConfig flat = cfg;
        flat.r = 1;
        return run_ps_mwm(streams, n, flat);
    }
    GroupDualTable gd(n, cfg.r);
    MatchingResult res = detail::run_engine(
        streams, n, cfg,
        [&cfg, &gd](const WeightedEdge& e, detail::WorkerLocal& L, DualTable& duals) {
            process_edge_ld(e, L.stack, duals, gd, cfg.epsilon, L.ctx);
        });
    res.delegate_exclusive = !gd.exclusivity_violated.load();
    return res;
}

} // namespace polymatch
