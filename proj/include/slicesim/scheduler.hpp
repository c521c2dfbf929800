#pragma once

// Applies decisions to resources.
//
// Inelastic requests hold exactly their demand for their whole life. Elastic
// requests owe total_work = demand * lifetime; they start at their demand,
// soak up leftover capacity when they belong to the highest elastic class
// present, and are trimmed back to the minimum on-time rate the next slot.

#include "slicesim/core_model.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <vector>

namespace slicesim {

struct ProfitLedger {
    double cumulative_profit = 0.0;
    double slot_revenue = 0.0;
    double slot_penalty = 0.0;
    double total_revenue = 0.0;
    double total_penalties = 0.0;
};

/// Pops a_k requests FIFO from each queue and starts serving them at `slot`.
inline void apply_admissions(SystemState& state, std::span<const ServiceClassSpec> classes,
                             std::span<const Count> decision, Slot slot) {
    const std::size_t K = state.num_classes();
    if (decision.size() != K || classes.size() != K)
        throw InvariantViolation("apply_admissions: decision length differs from K");

    ResourceVector needed(state.num_resources());
    for (std::size_t k = 0; k < K; ++k) {
        if (decision[k] < 0 || decision[k] > static_cast<Count>(state.queues[k].length()))
            throw InvariantViolation("apply_admissions: class " + std::to_string(k + 1) +
                                     " admits more requests than are queued");
        needed += classes[k].demand * static_cast<double>(decision[k]);
    }
    if (!needed.fits_within(state.available))
        throw InvariantViolation("apply_admissions: decision exceeds available capacity");

    for (std::size_t k = 0; k < K; ++k) {
        auto& queue = state.queues[k].entries;
        const ResourceVector& demand = classes[k].demand;
        for (Count i = 0; i < decision[k]; ++i) {
            Request r = std::move(queue.front());
            queue.pop_front();
            if (slot < r.perceived_slot || slot > r.last_admissible_slot())
                throw InvariantViolation("apply_admissions: request admitted outside its admission window");
            r.admitted_slot = slot;
            r.allocation = demand;
            if (r.elastic) {
                r.progress = ElasticProgress{demand * static_cast<double>(r.lifetime), ResourceVector(demand.size())};
            }
            state.available -= demand;
            state.ongoing.push_back(std::move(r));
        }
        if (decision[k] > 0) state.ledger.record_admissions(k, decision[k]);
    }
}

/// Drops the listed ongoing requests and releases their allocations.
inline std::vector<Request> apply_preemptions(SystemState& state, std::span<const RequestId> ids) {
    std::vector<Request> dropped;
    for (RequestId id : ids) {
        auto it = std::find_if(state.ongoing.begin(), state.ongoing.end(), [id](const Request& r) { return r.id == id; });
        if (it == state.ongoing.end())
            throw InvariantViolation("apply_preemptions: request " + std::to_string(id) + " is not ongoing");
        state.available += *it->allocation;
        dropped.push_back(std::move(*it));
        state.ongoing.erase(it);
    }
    return dropped;
}

/// Shares leftover capacity evenly among ongoing elastic requests of the
/// highest class that has any, never beyond a request's remaining work.
inline void redistribute_surplus(SystemState& state) {
    int top_class = 0;
    for (const auto& r : state.ongoing) {
        if (r.elastic) top_class = std::max(top_class, r.class_id);
    }
    if (top_class == 0) return;

    std::vector<Request*> members;
    for (auto& r : state.ongoing) {
        if (r.elastic && r.class_id == top_class) members.push_back(&r);
    }
    const std::size_t N = state.num_resources();
    ResourceVector share(N);
    for (std::size_t n = 0; n < N; ++n) share[n] = std::max(state.available[n], 0.0) / static_cast<double>(members.size());

    for (Request* r : members) {
        const ResourceVector remaining = r->progress->remaining();
        ResourceVector& alloc = *r->allocation;
        for (std::size_t n = 0; n < N; ++n) {
            const double grant = std::clamp(remaining[n] - alloc[n], 0.0, share[n]);
            alloc[n] += grant;
            state.available[n] -= grant;
        }
    }
}

/// Resets each elastic allocation to the minimum rate that still finishes on time.
inline void reallocate_minimum(SystemState& state, Slot slot) {
    for (auto& r : state.ongoing) {
        if (!r.elastic) continue;
        const Slot remaining_slots = *r.admitted_slot + r.lifetime - slot;
        if (remaining_slots <= 0)
            throw InvariantViolation("reallocate_minimum: request " + std::to_string(r.id) + " should have expired");
        r.allocation = r.progress->remaining() * (1.0 / static_cast<double>(remaining_slots));
    }
    state.recompute_available();
}

/// Removes requests whose lifetime ended, and elastic requests whose work is done.
inline std::vector<Request> process_expiries(SystemState& state, Slot slot) {
    std::vector<Request> expired;
    std::vector<Request> kept;
    kept.reserve(state.ongoing.size());
    for (auto& r : state.ongoing) {
        const bool deadline = *r.admitted_slot + r.lifetime <= slot;
        const bool finished = r.elastic && r.progress->complete();
        if (deadline || finished) {
            state.available += *r.allocation;
            expired.push_back(std::move(r));
        } else {
            kept.push_back(std::move(r));
        }
    }
    state.ongoing = std::move(kept);
    return expired;
}

/// Elastic requests bank this slot's allocation as delivered work.
inline void deliver_slot(SystemState& state) {
    for (auto& r : state.ongoing) {
        if (r.elastic) r.progress->delivered += *r.allocation;
    }
}

/// Charges every ongoing request its per-slot price and pays
/// penalty_ratio * price * served slots for every dropped request.
inline void accrue_profit(const SystemState& state, std::span<const ServiceClassSpec> classes,
                          std::span<const Request> dropped, double penalty_ratio, ProfitLedger& ledger, Slot slot) {
    double revenue = 0.0;
    for (const auto& r : state.ongoing) revenue += classes[r.class_id - 1].price_per_slot;
    double penalty = 0.0;
    for (const auto& r : dropped) {
        penalty += penalty_ratio * classes[r.class_id - 1].price_per_slot * static_cast<double>(slot - *r.admitted_slot);
    }
    ledger.slot_revenue = revenue;
    ledger.slot_penalty = penalty;
    ledger.total_revenue += revenue;
    ledger.total_penalties += penalty;
    ledger.cumulative_profit += revenue - penalty;
}

}  // namespace slicesim
