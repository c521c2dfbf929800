#pragma once

#include "slicesim/core_model.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace slicesim {

/// Admission counts per class plus ongoing requests to drop before admitting.
struct Decision {
    std::vector<Count> admissions;
    std::vector<RequestId> preemptions;

    friend bool operator==(const Decision&, const Decision&) = default;
};

/// Maps (ongoing set, queue lengths, initial CSAR) to an admission decision.
/// Resource feasibility of `admissions` is judged after `preemptions` apply.
class AdmissionPolicy {
public:
    virtual ~AdmissionPolicy() = default;

    [[nodiscard]] virtual std::string_view name() const noexcept = 0;

    [[nodiscard]] virtual Decision decide(const SystemState& state, std::span<const ServiceClassSpec> classes,
                                          std::span<const double> initial_csar) const = 0;
};

}  // namespace slicesim
