#pragma once

// Stochastic request stream: Poisson arrivals, queue-length dependent balking,
// shifted-geometric durations and renege detection.

#include "slicesim/core_model.hpp"

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicesim {

using Rng = std::mt19937_64;

/// Base values and per-class factors from which class specs are resolved.
/// Defaults reproduce the reference four-class, two-resource scenario:
/// new/handoff variants of one elastic and one inelastic service.
struct WorkloadFactors {
    double base_arrival_rate = 5.0;
    double base_lifetime = 20.0;
    double base_holdtime = 10.0;
    double base_price = 1.0;
    double base_balk = 0.02;
    std::vector<double> arrival_factors{1.2, 1.5, 0.6, 0.75};
    std::vector<double> lifetime_factors{0.6, 1.0, 0.3, 0.5};
    std::vector<double> holdtime_factors{1.0, 0.8, 0.3, 0.24};
    std::vector<ResourceVector> demands{{0.035, 0.03}, {0.016, 0.02}, {0.035, 0.03}, {0.016, 0.02}};
    std::vector<bool> elastic{true, false, true, false};

    [[nodiscard]] std::size_t num_classes() const noexcept { return demands.size(); }

    friend bool operator==(const WorkloadFactors&, const WorkloadFactors&) = default;
};

/// price_k = (1 + ln k) * p0, balk_k = beta0 / (1 + k), rates and means = factor * base.
inline std::vector<ServiceClassSpec> resolve_classes(const WorkloadFactors& f) {
    const std::size_t K = f.num_classes();
    auto check = [K](std::size_t got, const char* what) {
        if (got != K)
            throw std::invalid_argument(std::string(what) + " has " + std::to_string(got) + " entries, expected K=" +
                                        std::to_string(K));
    };
    check(f.arrival_factors.size(), "arrival_factors");
    check(f.lifetime_factors.size(), "lifetime_factors");
    check(f.holdtime_factors.size(), "holdtime_factors");
    check(f.elastic.size(), "elastic");

    std::vector<ServiceClassSpec> classes(K);
    for (std::size_t i = 0; i < K; ++i) {
        const double k = static_cast<double>(i + 1);
        auto& c = classes[i];
        c.class_id = static_cast<int>(i + 1);
        c.demand = f.demands[i];
        c.elastic = f.elastic[i];
        c.arrival_rate = f.arrival_factors[i] * f.base_arrival_rate;
        c.mean_lifetime = f.lifetime_factors[i] * f.base_lifetime;
        c.mean_holdtime = f.holdtime_factors[i] * f.base_holdtime;
        c.price_per_slot = (1.0 + std::log(k)) * f.base_price;
        c.balk_sensitivity = f.base_balk / (1.0 + k);
    }
    return classes;
}

struct WorkloadConfig {
    double base_arrival_rate = 5.0;
    std::vector<ServiceClassSpec> classes;
    std::uint64_t seed = 1;
};

inline WorkloadConfig make_workload(const WorkloadFactors& factors, std::uint64_t seed) {
    return {factors.base_arrival_rate, resolve_classes(factors), seed};
}

inline Count sample_arrival_count(double rate, Rng& rng) {
    if (!(rate >= 0.0)) throw std::invalid_argument("arrival rate must be >= 0");
    if (rate == 0.0) return 0;
    return static_cast<Count>(std::poisson_distribution<std::int64_t>(rate)(rng));
}

/// Probability that a fresh arrival joins a queue of the given length.
inline double balk_probability(double beta, std::size_t queue_len) {
    return std::exp(-beta * static_cast<double>(queue_len));
}

/// Geometric on {1, 2, ...} with the given mean.
inline Slot sample_duration(double mean, Rng& rng) {
    if (!(mean >= 1.0)) throw std::invalid_argument("duration mean must be >= 1, got " + std::to_string(mean));
    if (mean == 1.0) return 1;
    return 1 + static_cast<Slot>(std::geometric_distribution<std::int64_t>(1.0 / mean)(rng));
}

struct RenegeScan {
    std::vector<Count> departures;  // d(t)
    std::vector<Request> removed;
};

/// Removes every queued request whose admission window closed before `slot`.
inline RenegeScan scan_reneges(std::vector<SliceQueue>& queues, Slot slot) {
    RenegeScan out;
    out.departures.assign(queues.size(), 0);
    for (std::size_t k = 0; k < queues.size(); ++k) {
        auto& entries = queues[k].entries;
        std::deque<Request> kept;
        for (auto& r : entries) {
            if (slot > r.last_admissible_slot()) {
                ++out.departures[k];
                out.removed.push_back(std::move(r));
            } else {
                kept.push_back(std::move(r));
            }
        }
        entries = std::move(kept);
    }
    return out;
}

struct SlotTraffic {
    std::vector<Count> arrivals;
    std::vector<Count> joined;
    std::vector<Count> balks;  // b(t)
};

/// Draws this slot's arrivals class by class (1..K) and lets each one balk or
/// join against the queue length left by its predecessors.
inline SlotTraffic generate_slot_traffic(const WorkloadConfig& cfg, std::vector<SliceQueue>& queues, Slot slot,
                                         Rng& rng, RequestId& next_id) {
    const std::size_t K = cfg.classes.size();
    if (queues.size() != K) throw std::invalid_argument("generate_slot_traffic: queue count differs from K");
    SlotTraffic out{std::vector<Count>(K, 0), std::vector<Count>(K, 0), std::vector<Count>(K, 0)};
    for (std::size_t k = 0; k < K; ++k) {
        const auto& spec = cfg.classes[k];
        auto& queue = queues[k];
        const Count arrivals = sample_arrival_count(spec.arrival_rate, rng);
        out.arrivals[k] = arrivals;
        for (Count i = 0; i < arrivals; ++i) {
            const double p_join = balk_probability(spec.balk_sensitivity, queue.length());
            if (!std::bernoulli_distribution(p_join)(rng)) {
                ++out.balks[k];
                continue;
            }
            Request r;
            r.id = next_id++;
            r.class_id = spec.class_id;
            r.perceived_slot = slot;
            r.elastic = spec.elastic;
            r.holdtime = sample_duration(spec.mean_holdtime, rng);
            r.lifetime = sample_duration(spec.mean_lifetime, rng);
            queue.entries.push_back(std::move(r));
            ++out.joined[k];
        }
    }
    return out;
}

}  // namespace slicesim
