#pragma once

// Prioritized slice admission control considering fairness.
//
// A decision runs in two phases over a private working copy of the ledger:
// priority amendment admits requests of violating classes ordered by resource
// efficiency until the CSAR vector is monotone; fairness enhancement then
// alternates a high-priority-first pass (while fairness is at least varphi)
// with single admissions that move the CSARs toward targets whose gaps are
// exactly epsilon * w.

#include "slicesim/core_model.hpp"
#include "slicesim/policy.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace slicesim {

/// Working state of one PSACCF decision.
class DecisionContext {
public:
    DecisionContext(const SystemState& state, std::span<const ServiceClassSpec> classes,
                    std::span<const double> initial_csar, FairnessConfig cfg)
        : classes_(classes),
          available_(state.available),
          alpha_(initial_csar.begin(), initial_csar.end()),
          decision_(classes.size(), 0),
          queue_len_(state.queue_lengths()),
          ledger_(state.ledger),
          fairness_(std::move(cfg)) {
        if (classes.size() != state.num_classes() || initial_csar.size() != classes.size())
            throw std::invalid_argument("DecisionContext: class count mismatch");
    }

    [[nodiscard]] std::size_t num_classes() const noexcept { return classes_.size(); }
    [[nodiscard]] std::span<const double> alpha() const noexcept { return alpha_; }
    [[nodiscard]] std::span<const Count> decision() const noexcept { return decision_; }
    [[nodiscard]] std::span<const Count> queue_lengths() const noexcept { return queue_len_; }
    [[nodiscard]] const CsarLedger& ledger() const noexcept { return ledger_; }
    [[nodiscard]] const FairnessConfig& fairness() const noexcept { return fairness_; }
    [[nodiscard]] const ResourceVector& available() const noexcept { return available_; }
    [[nodiscard]] const ResourceVector& demand(std::size_t k) const { return classes_[k].demand; }

    /// Whether one more class-index-k request still fits R * (a + e_k) <= c_ava.
    [[nodiscard]] bool fits(std::size_t k) const {
        const ResourceVector& r = classes_[k].demand;
        const ResourceVector idle = raw_idle();
        for (std::size_t n = 0; n < r.size(); ++n) {
            if (idle[n] - r[n] < -kTolerance) return false;
        }
        return true;
    }

    /// Pre-admits the head request of class index k.
    void admit(std::size_t k) {
        if (queue_len_[k] <= 0) throw std::logic_error("DecisionContext::admit on an empty queue");
        ++decision_[k];
        --queue_len_[k];
        ledger_.record_admissions(k);
        alpha_[k] = ledger_.ratio(k);
    }

    /// c_ava - R * a, without clamping.
    [[nodiscard]] ResourceVector raw_idle() const {
        ResourceVector idle = available_;
        for (std::size_t k = 0; k < classes_.size(); ++k) {
            if (decision_[k] != 0) idle -= classes_[k].demand * static_cast<double>(decision_[k]);
        }
        return idle;
    }

private:
    std::span<const ServiceClassSpec> classes_;
    ResourceVector available_;
    std::vector<double> alpha_;
    std::vector<Count> decision_;
    std::vector<Count> queue_len_;
    CsarLedger ledger_;
    FairnessConfig fairness_;
};

/// Idle capacity left after the current pre-admissions, clamped at zero.
inline ResourceVector idle_capacity(const DecisionContext& ctx) {
    ResourceVector idle = ctx.raw_idle();
    for (std::size_t n = 0; n < idle.size(); ++n) idle[n] = std::max(idle[n], 0.0);
    return idle;
}

/// Index (0-based) of the resource a class would saturate first.
inline std::size_t dominant_resource(const ResourceVector& demand, const ResourceVector& idle) {
    if (demand.size() != idle.size()) throw std::invalid_argument("dominant_resource: length mismatch");
    std::size_t best = demand.size();
    double best_ratio = -1.0;
    for (std::size_t n = 0; n < demand.size(); ++n) {
        if (!(demand[n] > 0.0)) continue;
        const double ratio = idle[n] <= 0.0 ? std::numeric_limits<double>::infinity() : demand[n] / idle[n];
        if (ratio > best_ratio) {
            best_ratio = ratio;
            best = n;
        }
    }
    if (best == demand.size()) throw std::invalid_argument("dominant_resource: demand has no positive element");
    return best;
}

/// CSAR increment from admitting one more request (smoothed form).
inline double csar_derivative(double alpha_k, Count cum_confirmed_k) {
    return (1.0 - alpha_k) / (1.0 + static_cast<double>(cum_confirmed_k));
}

/// CSAR increment per unit of dominant resource for class index k.
inline double resource_efficiency(const DecisionContext& ctx, std::size_t k, const ResourceVector& idle) {
    const ResourceVector& r = ctx.demand(k);
    const std::size_t dr = dominant_resource(r, idle);
    return csar_derivative(ctx.alpha()[k], ctx.ledger().cum_confirmed()[k]) / r[dr];
}

inline double resource_efficiency(const DecisionContext& ctx, std::size_t k) {
    return resource_efficiency(ctx, k, idle_capacity(ctx));
}

namespace detail {

/// Sorts class indices by resource efficiency, descending; exact ties go to
/// the higher class.
inline void sort_by_efficiency(std::vector<std::size_t>& order, const std::vector<double>& re) {
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (re[a] != re[b]) return re[a] > re[b];
        return a > b;
    });
}

inline bool admit_first_fitting(DecisionContext& ctx, const std::vector<std::size_t>& order) {
    for (std::size_t k : order) {
        if (ctx.queue_lengths()[k] > 0 && ctx.fits(k)) {
            ctx.admit(k);
            return true;
        }
    }
    return false;
}

}  // namespace detail

/// Priority amendment: admit violators, best resource efficiency first,
/// until the CSAR vector is monotone or no violator can be admitted.
inline void fix_priority(DecisionContext& ctx) {
    const std::size_t K = ctx.num_classes();
    std::vector<double> re(K, 0.0);
    while (priority_indicator(ctx.alpha()) == 0) {
        std::vector<std::size_t> order;
        for (int id : violator_set(ctx.alpha())) {
            const auto k = static_cast<std::size_t>(id - 1);
            if (ctx.queue_lengths()[k] > 0) order.push_back(k);
        }
        const ResourceVector idle = idle_capacity(ctx);
        for (std::size_t k : order) re[k] = resource_efficiency(ctx, k, idle);
        detail::sort_by_efficiency(order, re);
        if (!detail::admit_first_fitting(ctx, order)) break;
    }
}

/// High-priority-first admissions while fairness stays at or above varphi.
inline void check_fairness(DecisionContext& ctx) {
    const std::size_t K = ctx.num_classes();
    std::vector<std::size_t> order(K);
    for (std::size_t i = 0; i < K; ++i) order[i] = K - 1 - i;
    while (fairness_index(ctx.alpha(), ctx.fairness()) >= ctx.fairness().varphi - kTolerance) {
        if (!detail::admit_first_fitting(ctx, order)) break;
    }
}

/// Target CSARs whose adjacent gaps are epsilon * w (clamped at 0 near the top).
inline std::vector<double> target_csar(std::span<const double> alpha, const FairnessConfig& cfg) {
    const std::size_t K = alpha.size();
    if (K <= 1) return {alpha.begin(), alpha.end()};
    if (cfg.weights.size() != K - 1) throw std::invalid_argument("target_csar: weights must have K-1 entries");

    // suffix[k] = sum of w_i for i in [k, K-1) (0-based), i.e. the weight mass above class k.
    std::vector<double> suffix(K, 0.0);
    for (std::size_t k = K - 1; k-- > 0;) suffix[k] = suffix[k + 1] + cfg.weights[k];
    const double span = cfg.epsilon * suffix[0];

    std::vector<double> target(K);
    if (alpha[K - 1] - alpha[0] > span) {
        for (std::size_t k = 0; k < K; ++k) target[k] = alpha[K - 1] - cfg.epsilon * suffix[k];
    } else if (alpha[0] + span <= 1.0) {
        double prefix = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            target[k] = alpha[0] + cfg.epsilon * prefix;
            if (k + 1 < K) prefix += cfg.weights[k];
        }
    } else {
        for (std::size_t k = 0; k < K; ++k) target[k] = std::max(1.0 - cfg.epsilon * suffix[k], 0.0);
    }
    return target;
}

/// One admission toward the targets: largest shortfall first, resource
/// efficiency breaking ties. Returns whether anything was admitted.
inline bool approach_target(DecisionContext& ctx, std::span<const double> targets) {
    const std::size_t K = ctx.num_classes();
    const ResourceVector idle = idle_capacity(ctx);
    std::vector<std::size_t> order;
    std::vector<double> re(K, 0.0);
    std::vector<double> shortfall(K, 0.0);
    for (std::size_t k = 0; k < K; ++k) {
        if (ctx.alpha()[k] < targets[k] - kTolerance && ctx.queue_lengths()[k] > 0) {
            order.push_back(k);
            re[k] = resource_efficiency(ctx, k, idle);
            shortfall[k] = targets[k] - ctx.alpha()[k];
        }
    }
    detail::sort_by_efficiency(order, re);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return shortfall[a] > shortfall[b]; });
    return detail::admit_first_fitting(ctx, order);
}

/// Full PSACCF decision for one slot.
inline std::vector<Count> psaccf_decide(const SystemState& state, std::span<const ServiceClassSpec> classes,
                                        std::span<const double> initial_csar, const FairnessConfig& cfg) {
    DecisionContext ctx(state, classes, initial_csar, cfg);
    fix_priority(ctx);
    if (priority_indicator(ctx.alpha()) == 1) {
        for (;;) {
            check_fairness(ctx);
            const auto targets = target_csar(ctx.alpha(), ctx.fairness());
            if (!approach_target(ctx, targets)) break;
        }
    }
    return {ctx.decision().begin(), ctx.decision().end()};
}

class PsaccfPolicy final : public AdmissionPolicy {
public:
    explicit PsaccfPolicy(FairnessConfig cfg) : cfg_(std::move(cfg)) {}

    [[nodiscard]] std::string_view name() const noexcept override { return "psaccf"; }

    [[nodiscard]] Decision decide(const SystemState& state, std::span<const ServiceClassSpec> classes,
                                  std::span<const double> initial_csar) const override {
        return {psaccf_decide(state, classes, initial_csar, cfg_), {}};
    }

    [[nodiscard]] const FairnessConfig& fairness() const noexcept { return cfg_; }

private:
    FairnessConfig cfg_;
};

}  // namespace slicesim
