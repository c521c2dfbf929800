#pragma once

// Domain types and the closed-form metrics shared by policies and the
// simulation engine.
//
// Class ids are 1-based (1..K, larger id = higher priority). Every per-class
// vector in this library is indexed by class_id - 1.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <initializer_list>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicesim {

/// Absolute tolerance used for monotonicity, feasibility and conservation checks.
inline constexpr double kTolerance = 1e-9;

using Slot = std::int64_t;
using RequestId = std::uint64_t;
using Count = std::int64_t;

/// Raised when a run observes a state that the model forbids. These are bugs
/// or policy contract violations, never ordinary states.
class InvariantViolation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Fixed-length vector of non-negative resource quantities.
class ResourceVector {
public:
    ResourceVector() = default;
    explicit ResourceVector(std::size_t n, double fill = 0.0) : values_(n, fill) {}
    ResourceVector(std::initializer_list<double> values) : values_(values) {}
    explicit ResourceVector(std::vector<double> values) : values_(std::move(values)) {}

    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }
    double& operator[](std::size_t n) { return values_[n]; }
    double operator[](std::size_t n) const { return values_[n]; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
    [[nodiscard]] auto begin() const noexcept { return values_.begin(); }
    [[nodiscard]] auto end() const noexcept { return values_.end(); }

    ResourceVector& operator+=(const ResourceVector& rhs) {
        check_size(rhs);
        for (std::size_t n = 0; n < size(); ++n) values_[n] += rhs.values_[n];
        return *this;
    }
    ResourceVector& operator-=(const ResourceVector& rhs) {
        check_size(rhs);
        for (std::size_t n = 0; n < size(); ++n) values_[n] -= rhs.values_[n];
        return *this;
    }
    ResourceVector& operator*=(double s) {
        for (double& v : values_) v *= s;
        return *this;
    }
    friend ResourceVector operator+(ResourceVector lhs, const ResourceVector& rhs) { return lhs += rhs; }
    friend ResourceVector operator-(ResourceVector lhs, const ResourceVector& rhs) { return lhs -= rhs; }
    friend ResourceVector operator*(ResourceVector lhs, double s) { return lhs *= s; }
    friend ResourceVector operator*(double s, ResourceVector rhs) { return rhs *= s; }
    friend bool operator==(const ResourceVector&, const ResourceVector&) = default;

    /// True when every element of *this is <= the matching element of bound (+ tol).
    [[nodiscard]] bool fits_within(const ResourceVector& bound, double tol = kTolerance) const {
        check_size(bound);
        for (std::size_t n = 0; n < size(); ++n) {
            if (values_[n] > bound.values_[n] + tol) return false;
        }
        return true;
    }

    [[nodiscard]] bool any_positive() const {
        return std::any_of(values_.begin(), values_.end(), [](double v) { return v > 0.0; });
    }

    [[nodiscard]] double min_element() const {
        return values_.empty() ? 0.0 : *std::min_element(values_.begin(), values_.end());
    }

private:
    void check_size(const ResourceVector& other) const {
        if (other.size() != size()) throw std::invalid_argument("ResourceVector length mismatch");
    }

    std::vector<double> values_;
};

/// Static per-class parameters.
struct ServiceClassSpec {
    int class_id = 1;
    ResourceVector demand;
    bool elastic = false;
    double arrival_rate = 0.0;    // expected arrivals per slot
    double mean_lifetime = 1.0;   // slots
    double mean_holdtime = 1.0;   // slots
    double price_per_slot = 0.0;
    double balk_sensitivity = 0.0;

    friend bool operator==(const ServiceClassSpec&, const ServiceClassSpec&) = default;
};

/// Validates ids 1..K without gaps, common demand length and positive demand.
inline void validate_classes(std::span<const ServiceClassSpec> classes, std::size_t num_resources) {
    if (classes.empty()) throw std::invalid_argument("at least one service class is required");
    for (std::size_t i = 0; i < classes.size(); ++i) {
        const auto& spec = classes[i];
        const std::string tag = "class " + std::to_string(i + 1);
        if (spec.class_id != static_cast<int>(i + 1)) throw std::invalid_argument(tag + ": class ids must be 1..K in order");
        if (spec.demand.size() != num_resources) throw std::invalid_argument(tag + ": demand length differs from N");
        if (std::any_of(spec.demand.begin(), spec.demand.end(), [](double v) { return !(v >= 0.0); }))
            throw std::invalid_argument(tag + ": demand must be non-negative");
        if (!spec.demand.any_positive()) throw std::invalid_argument(tag + ": demand needs a positive element");
        if (!(spec.arrival_rate >= 0.0)) throw std::invalid_argument(tag + ": arrival rate must be >= 0");
        if (!(spec.mean_lifetime >= 1.0)) throw std::invalid_argument(tag + ": mean lifetime must be >= 1");
        if (!(spec.mean_holdtime >= 1.0)) throw std::invalid_argument(tag + ": mean hold time must be >= 1");
        if (!(spec.price_per_slot >= 0.0)) throw std::invalid_argument(tag + ": price must be >= 0");
        if (!(spec.balk_sensitivity >= 0.0 && spec.balk_sensitivity <= 1.0))
            throw std::invalid_argument(tag + ": balk sensitivity must be in [0,1]");
    }
}

/// Work bookkeeping for an ongoing elastic request (resource-slot units).
struct ElasticProgress {
    ResourceVector total_work;
    ResourceVector delivered;

    [[nodiscard]] ResourceVector remaining() const {
        ResourceVector rest = total_work - delivered;
        for (std::size_t n = 0; n < rest.size(); ++n) rest[n] = std::max(rest[n], 0.0);
        return rest;
    }
    [[nodiscard]] bool complete(double tol = kTolerance) const { return total_work.fits_within(delivered, tol); }
};

struct Request {
    RequestId id = 0;
    int class_id = 1;
    Slot perceived_slot = 1;
    Slot holdtime = 1;  // hidden from policies
    Slot lifetime = 1;  // revealed to the provider for elastic requests only
    bool elastic = false;
    std::optional<Slot> admitted_slot;
    std::optional<ResourceVector> allocation;  // set iff ongoing
    std::optional<ElasticProgress> progress;   // set iff elastic and ongoing

    /// Last slot at which the request may still be admitted.
    [[nodiscard]] Slot last_admissible_slot() const { return perceived_slot + holdtime - 1; }
    [[nodiscard]] std::optional<ResourceVector> remaining_work() const {
        if (!progress) return std::nullopt;
        return progress->remaining();
    }
};

/// FIFO queue of one slice. Entries are ordered by perceived slot.
struct SliceQueue {
    int class_id = 1;
    std::deque<Request> entries;

    [[nodiscard]] std::size_t length() const noexcept { return entries.size(); }
};

/// Cumulative admitted / confirmed counters per class.
class CsarLedger {
public:
    CsarLedger() = default;
    explicit CsarLedger(std::size_t num_classes) : admitted_(num_classes, 0), confirmed_(num_classes, 0) {}
    CsarLedger(std::vector<Count> admitted, std::vector<Count> confirmed)
        : admitted_(std::move(admitted)), confirmed_(std::move(confirmed)) {
        if (admitted_.size() != confirmed_.size()) throw std::invalid_argument("ledger length mismatch");
        for (std::size_t k = 0; k < admitted_.size(); ++k) {
            if (admitted_[k] < 0 || admitted_[k] > confirmed_[k])
                throw std::invalid_argument("ledger requires 0 <= admitted <= confirmed");
        }
    }

    [[nodiscard]] std::size_t num_classes() const noexcept { return admitted_.size(); }
    [[nodiscard]] std::span<const Count> cum_admitted() const noexcept { return admitted_; }
    [[nodiscard]] std::span<const Count> cum_confirmed() const noexcept { return confirmed_; }

    /// n admissions of class index k: both counters advance.
    void record_admissions(std::size_t k, Count n = 1) {
        admitted_.at(k) += n;
        confirmed_.at(k) += n;
    }
    /// n requests of class index k lost to renege or balk.
    void record_losses(std::size_t k, Count n) { confirmed_.at(k) += n; }

    /// CSAR of class index k; 1.0 when nothing has been confirmed yet.
    [[nodiscard]] double ratio(std::size_t k) const {
        const Count confirmed = confirmed_.at(k);
        return confirmed == 0 ? 1.0 : static_cast<double>(admitted_[k]) / static_cast<double>(confirmed);
    }

    friend bool operator==(const CsarLedger&, const CsarLedger&) = default;

private:
    std::vector<Count> admitted_;
    std::vector<Count> confirmed_;
};

struct FairnessConfig {
    std::vector<double> weights;  // K-1 positive entries
    double epsilon = 0.10;
    double varphi = 1.0;

    [[nodiscard]] static FairnessConfig uniform(std::size_t num_classes, double epsilon, double varphi) {
        return {std::vector<double>(num_classes > 0 ? num_classes - 1 : 0, 1.0), epsilon, varphi};
    }

    void validate(std::size_t num_classes) const {
        if (weights.size() + 1 != std::max<std::size_t>(num_classes, 1))
            throw std::invalid_argument("weights must have K-1 entries");
        if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w > 0.0); }))
            throw std::invalid_argument("weights must be positive");
        if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be > 0");
        if (!(varphi >= 0.0 && varphi <= 1.0)) throw std::invalid_argument("varphi must be in [0,1]");
    }
};

struct SystemState {
    Slot slot = 1;
    std::vector<Request> ongoing;  // kept in admission order
    std::vector<SliceQueue> queues;
    CsarLedger ledger;
    ResourceVector capacity;
    ResourceVector available;

    SystemState() = default;
    SystemState(std::size_t num_classes, ResourceVector cap)
        : ledger(num_classes), capacity(cap), available(std::move(cap)) {
        queues.reserve(num_classes);
        for (std::size_t k = 0; k < num_classes; ++k) queues.push_back(SliceQueue{static_cast<int>(k + 1), {}});
    }

    [[nodiscard]] std::size_t num_classes() const noexcept { return queues.size(); }
    [[nodiscard]] std::size_t num_resources() const noexcept { return capacity.size(); }

    [[nodiscard]] std::vector<Count> queue_lengths() const {
        std::vector<Count> lengths;
        lengths.reserve(queues.size());
        for (const auto& q : queues) lengths.push_back(static_cast<Count>(q.length()));
        return lengths;
    }

    [[nodiscard]] ResourceVector total_allocated() const {
        ResourceVector total(capacity.size());
        for (const auto& r : ongoing) total += *r.allocation;
        return total;
    }

    /// available := capacity - sum of ongoing allocations.
    void recompute_available() { available = capacity - total_allocated(); }
};

/// Throws InvariantViolation when conservation or non-negativity is broken.
inline void check_invariants(const SystemState& state, const char* where) {
    const ResourceVector allocated = state.total_allocated();
    for (std::size_t n = 0; n < state.num_resources(); ++n) {
        const double expected = state.capacity[n] - allocated[n];
        if (std::abs(expected - state.available[n]) > kTolerance)
            throw InvariantViolation(std::string(where) + ": capacity conservation broken on resource " + std::to_string(n + 1));
        if (state.available[n] < -kTolerance)
            throw InvariantViolation(std::string(where) + ": negative available capacity on resource " + std::to_string(n + 1));
    }
    for (const auto& r : state.ongoing) {
        if (!r.allocation || !r.admitted_slot)
            throw InvariantViolation(std::string(where) + ": ongoing request without allocation");
        if (r.elastic != r.progress.has_value())
            throw InvariantViolation(std::string(where) + ": elastic progress mismatch");
    }
    for (std::size_t k = 0; k < state.ledger.num_classes(); ++k) {
        if (state.ledger.cum_admitted()[k] > state.ledger.cum_confirmed()[k])
            throw InvariantViolation(std::string(where) + ": ledger admitted exceeds confirmed");
    }
}

// ---------------------------------------------------------------------------
// Metrics
// ---------------------------------------------------------------------------

inline std::vector<double> csar(const CsarLedger& ledger) {
    std::vector<double> alpha(ledger.num_classes());
    for (std::size_t k = 0; k < alpha.size(); ++k) alpha[k] = ledger.ratio(k);
    return alpha;
}

/// Ids of classes whose CSAR is below some lower-priority class's CSAR.
inline std::vector<int> violator_set(std::span<const double> alpha) {
    std::vector<int> violators;
    double running_max = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < alpha.size(); ++k) {
        if (alpha[k] < running_max - kTolerance) violators.push_back(static_cast<int>(k + 1));
        running_max = std::max(running_max, alpha[k]);
    }
    return violators;
}

/// 1 when alpha is non-decreasing in class id, 0 otherwise.
inline int priority_indicator(std::span<const double> alpha) { return violator_set(alpha).empty() ? 1 : 0; }

inline std::vector<double> gap_vector(std::span<const double> alpha) {
    std::vector<double> gaps;
    for (std::size_t k = 1; k < alpha.size(); ++k) gaps.push_back(alpha[k] - alpha[k - 1]);
    return gaps;
}

/// Jain's index of the weight-scaled CSAR gaps; 0 when priority is violated.
inline double fairness_index(std::span<const double> alpha, const FairnessConfig& cfg) {
    if (alpha.size() <= 1) return 1.0;
    if (cfg.weights.size() != alpha.size() - 1) throw std::invalid_argument("fairness weights must have K-1 entries");
    if (priority_indicator(alpha) == 0) return 0.0;
    const auto gaps = gap_vector(alpha);
    double sum = 0.0;
    double sum_sq = 0.0;
    for (std::size_t k = 0; k < gaps.size(); ++k) {
        // gaps may sit a hair below zero within tolerance
        const double x = std::max(gaps[k], 0.0) / cfg.weights[k];
        sum += x;
        sum_sq += x * x;
    }
    if (sum_sq == 0.0) return 1.0;
    return std::min(1.0, (sum * sum) / (static_cast<double>(gaps.size()) * sum_sq));
}

struct Utilization {
    std::vector<double> per_resource;
    double min = 0.0;
};

inline Utilization utilization(const SystemState& state) {
    const ResourceVector allocated = state.total_allocated();
    Utilization u;
    u.per_resource.resize(state.num_resources());
    for (std::size_t n = 0; n < state.num_resources(); ++n) {
        u.per_resource[n] = state.capacity[n] > 0.0 ? allocated[n] / state.capacity[n] : 0.0;
    }
    u.min = u.per_resource.empty() ? 0.0 : *std::min_element(u.per_resource.begin(), u.per_resource.end());
    return u;
}

/// CSAR at the start of a slot: previous counters with this slot's reneges
/// and balks already confirmed.
inline std::vector<double> initial_csar(const CsarLedger& previous, std::span<const Count> departures,
                                        std::span<const Count> balks) {
    const std::size_t K = previous.num_classes();
    if (departures.size() != K || balks.size() != K) throw std::invalid_argument("initial_csar: length mismatch");
    std::vector<double> alpha(K);
    for (std::size_t k = 0; k < K; ++k) {
        if (departures[k] < 0 || balks[k] < 0) throw std::invalid_argument("initial_csar: negative loss count");
        const Count denom = departures[k] + balks[k] + previous.cum_confirmed()[k];
        alpha[k] = denom == 0 ? 1.0 : static_cast<double>(previous.cum_admitted()[k]) / static_cast<double>(denom);
    }
    return alpha;
}

/// Time average of the priority indicator.
inline double priority_objective(std::span<const int> history) {
    if (history.empty()) throw std::invalid_argument("priority_objective: empty history");
    double total = 0.0;
    for (int v : history) total += v;
    return total / static_cast<double>(history.size());
}

}  // namespace slicesim
