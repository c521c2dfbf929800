#pragma once

#include "slicesim/core_model.hpp"
#include "slicesim/workload.hpp"

#include <vector>

namespace testutil {

inline std::vector<slicesim::ServiceClassSpec> reference_classes() {
    return slicesim::resolve_classes(slicesim::WorkloadFactors{});
}

/// Appends `count` requests to the queue of class index k, admissible for a long time.
inline void enqueue(slicesim::SystemState& state, std::size_t k, int count, slicesim::Slot perceived = 1,
                    slicesim::Slot holdtime = 1000, bool elastic = false) {
    static slicesim::RequestId next = 1'000'000;
    for (int i = 0; i < count; ++i) {
        slicesim::Request r;
        r.id = next++;
        r.class_id = static_cast<int>(k + 1);
        r.perceived_slot = perceived;
        r.holdtime = holdtime;
        r.lifetime = 10;
        r.elastic = elastic;
        state.queues[k].entries.push_back(r);
    }
}

/// Adds an ongoing request holding `alloc`, and charges it to state.available.
inline slicesim::Request& add_ongoing(slicesim::SystemState& state, slicesim::RequestId id, int class_id,
                                      slicesim::ResourceVector alloc, slicesim::Slot admitted,
                                      slicesim::Slot lifetime, bool elastic = false) {
    slicesim::Request r;
    r.id = id;
    r.class_id = class_id;
    r.perceived_slot = admitted;
    r.holdtime = 1;
    r.lifetime = lifetime;
    r.elastic = elastic;
    r.admitted_slot = admitted;
    r.allocation = alloc;
    if (elastic) {
        r.progress = slicesim::ElasticProgress{alloc * static_cast<double>(lifetime),
                                               slicesim::ResourceVector(alloc.size())};
    }
    state.available -= alloc;
    state.ongoing.push_back(std::move(r));
    return state.ongoing.back();
}

}  // namespace testutil
