#pragma once

// Comparison policies. Both scan classes from the highest priority down and
// admit FIFO while resources last, skipping classes that no longer fit.
// MHPF never touches ongoing requests; AHPF may drop strictly lower-priority
// ongoing requests (lowest class first, most recent admission first) to make room.

#include "slicesim/core_model.hpp"
#include "slicesim/policy.hpp"
#include "slicesim/psaccf.hpp"

#include <algorithm>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace slicesim {

inline Decision mhpf_decide(const SystemState& state, std::span<const ServiceClassSpec> classes) {
    const std::size_t K = classes.size();
    Decision out{std::vector<Count>(K, 0), {}};
    ResourceVector free = state.available;
    for (std::size_t k = K; k-- > 0;) {
        const ResourceVector& r = classes[k].demand;
        const auto queued = static_cast<Count>(state.queues[k].length());
        while (out.admissions[k] < queued && r.fits_within(free)) {
            free -= r;
            ++out.admissions[k];
        }
    }
    return out;
}

inline Decision ahpf_decide(const SystemState& state, std::span<const ServiceClassSpec> classes) {
    const std::size_t K = classes.size();
    Decision out{std::vector<Count>(K, 0), {}};
    ResourceVector free = state.available;

    // Victim order: lowest class, then latest admission (fewest served slots,
    // hence the smallest penalty), then id.
    std::vector<const Request*> candidates;
    candidates.reserve(state.ongoing.size());
    for (const auto& r : state.ongoing) candidates.push_back(&r);
    std::sort(candidates.begin(), candidates.end(), [](const Request* a, const Request* b) {
        if (a->class_id != b->class_id) return a->class_id < b->class_id;
        if (*a->admitted_slot != *b->admitted_slot) return *a->admitted_slot > *b->admitted_slot;
        return a->id < b->id;
    });
    std::vector<bool> taken(candidates.size(), false);

    for (std::size_t k = K; k-- > 0;) {
        const ResourceVector& r = classes[k].demand;
        const int beneficiary_class = static_cast<int>(k + 1);
        const auto queued = static_cast<Count>(state.queues[k].length());
        while (out.admissions[k] < queued) {
            if (r.fits_within(free)) {
                free -= r;
                ++out.admissions[k];
                continue;
            }
            // Tentatively free lower-priority allocations until the request fits.
            ResourceVector trial = free;
            std::vector<std::size_t> victims;
            for (std::size_t v = 0; v < candidates.size() && !r.fits_within(trial); ++v) {
                if (taken[v]) continue;
                if (candidates[v]->class_id >= beneficiary_class) break;
                trial += *candidates[v]->allocation;
                victims.push_back(v);
            }
            if (!r.fits_within(trial)) break;  // same demand for the rest of this queue
            for (std::size_t v : victims) {
                taken[v] = true;
                out.preemptions.push_back(candidates[v]->id);
            }
            free = trial - r;
            ++out.admissions[k];
        }
    }
    return out;
}

class MhpfPolicy final : public AdmissionPolicy {
public:
    [[nodiscard]] std::string_view name() const noexcept override { return "mhpf"; }
    [[nodiscard]] Decision decide(const SystemState& state, std::span<const ServiceClassSpec> classes,
                                  std::span<const double>) const override {
        return mhpf_decide(state, classes);
    }
};

class AhpfPolicy final : public AdmissionPolicy {
public:
    [[nodiscard]] std::string_view name() const noexcept override { return "ahpf"; }
    [[nodiscard]] Decision decide(const SystemState& state, std::span<const ServiceClassSpec> classes,
                                  std::span<const double>) const override {
        return ahpf_decide(state, classes);
    }
};

inline constexpr std::string_view kPolicyNames[] = {"psaccf", "mhpf", "ahpf"};

inline bool is_policy_name(std::string_view name) {
    return std::find(std::begin(kPolicyNames), std::end(kPolicyNames), name) != std::end(kPolicyNames);
}

inline std::unique_ptr<AdmissionPolicy> make_policy(std::string_view name, const FairnessConfig& fairness) {
    if (name == "psaccf") return std::make_unique<PsaccfPolicy>(fairness);
    if (name == "mhpf") return std::make_unique<MhpfPolicy>();
    if (name == "ahpf") return std::make_unique<AhpfPolicy>();
    throw std::invalid_argument("unknown policy '" + std::string(name) + "' (expected psaccf, mhpf or ahpf)");
}

}  // namespace slicesim
