#pragma once

// Per-slot lifecycle driver.
//
// Each slot runs these phases in order:
//   1. expiries            2. elastic minimum reallocation
//   3. reneges -> d(t)     4. arrivals and balks -> b(t)
//   5. fold d + b into the confirmed counters, compute the initial CSAR
//   6. policy decision (timed)
//   7. preemptions, then admissions
//   8. surplus redistribution to elastic requests
//   9. profit accrual and elastic work delivery
//  10. metrics record

#include "slicesim/baselines.hpp"
#include "slicesim/core_model.hpp"
#include "slicesim/policy.hpp"
#include "slicesim/scheduler.hpp"
#include "slicesim/workload.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace slicesim {

struct SimulationConfig {
    WorkloadConfig workload;
    FairnessConfig fairness;
    ResourceVector capacity{2.0, 2.0};
    std::string policy = "psaccf";
    Slot horizon = 1000;
    double penalty_ratio = 1.5;
    /// Wall-clock latencies are left at zero unless enabled, so that
    /// outputs of identical runs stay byte-identical.
    bool record_timing = false;
};

struct SlotRecord {
    Slot slot = 0;
    std::vector<double> alpha;
    int priority_ind = 1;
    double priority_objective_running = 1.0;
    double fairness = 1.0;
    std::vector<double> utilization;
    double utilization_min = 0.0;
    double profit_cum = 0.0;
    std::int64_t decision_latency_ns = 0;    // policy call only
    std::int64_t allocation_latency_ns = 0;  // preemption, admission and surplus phases
    std::vector<Count> departures;           // d(t)
    std::vector<Count> balks;                // b(t)
    std::vector<Count> admissions;           // a(t)
    Count preemptions = 0;

    friend bool operator==(const SlotRecord&, const SlotRecord&) = default;
};

class Simulation {
public:
    explicit Simulation(SimulationConfig cfg)
        : cfg_(std::move(cfg)),
          state_(cfg_.workload.classes.size(), cfg_.capacity),
          policy_(make_policy(cfg_.policy, cfg_.fairness)),
          rng_(cfg_.workload.seed) {
        validate_classes(cfg_.workload.classes, cfg_.capacity.size());
        cfg_.fairness.validate(cfg_.workload.classes.size());
        if (std::any_of(cfg_.capacity.begin(), cfg_.capacity.end(), [](double c) { return !(c > 0.0); }))
            throw std::invalid_argument("capacity entries must be positive");
        if (cfg_.horizon < 0) throw std::invalid_argument("horizon must be >= 0");
        if (!(cfg_.penalty_ratio >= 0.0)) throw std::invalid_argument("penalty ratio must be >= 0");
        state_.slot = 0;
    }

    [[nodiscard]] const SystemState& state() const noexcept { return state_; }
    [[nodiscard]] const ProfitLedger& profit() const noexcept { return profit_; }
    [[nodiscard]] const SimulationConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] bool done() const noexcept { return state_.slot >= cfg_.horizon; }

    /// Advances one slot and returns its record.
    SlotRecord step() {
        using Clock = std::chrono::steady_clock;
        const auto& classes = cfg_.workload.classes;
        const std::size_t K = classes.size();
        const Slot t = ++state_.slot;

        process_expiries(state_, t);
        reallocate_minimum(state_, t);
        check_invariants(state_, "after reallocation");

        const RenegeScan reneges = scan_reneges(state_.queues, t);
        const SlotTraffic traffic = generate_slot_traffic(cfg_.workload, state_.queues, t, rng_, next_id_);

        const CsarLedger previous = state_.ledger;
        for (std::size_t k = 0; k < K; ++k) state_.ledger.record_losses(k, reneges.departures[k] + traffic.balks[k]);
        const std::vector<double> alpha_initial = initial_csar(previous, reneges.departures, traffic.balks);

        const auto t0 = cfg_.record_timing ? Clock::now() : Clock::time_point{};
        const Decision decision = policy_->decide(state_, classes, alpha_initial);
        const auto t1 = cfg_.record_timing ? Clock::now() : Clock::time_point{};

        const std::vector<Request> dropped = apply_preemptions(state_, decision.preemptions);
        apply_admissions(state_, classes, decision.admissions, t);
        redistribute_surplus(state_);
        const auto t2 = cfg_.record_timing ? Clock::now() : Clock::time_point{};
        check_invariants(state_, "after allocation");

        accrue_profit(state_, classes, dropped, cfg_.penalty_ratio, profit_, t);
        deliver_slot(state_);

        SlotRecord rec;
        rec.slot = t;
        rec.alpha = csar(state_.ledger);
        rec.priority_ind = priority_indicator(rec.alpha);
        indicator_sum_ += rec.priority_ind;
        rec.priority_objective_running = static_cast<double>(indicator_sum_) / static_cast<double>(t);
        rec.fairness = fairness_index(rec.alpha, cfg_.fairness);
        const Utilization u = utilization(state_);
        rec.utilization = u.per_resource;
        rec.utilization_min = u.min;
        rec.profit_cum = profit_.cumulative_profit;
        if (cfg_.record_timing) {
            rec.decision_latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t1 - t0).count();
            rec.allocation_latency_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(t2 - t1).count();
        }
        rec.departures = reneges.departures;
        rec.balks = traffic.balks;
        rec.admissions = decision.admissions;
        rec.preemptions = static_cast<Count>(dropped.size());
        return rec;
    }

    std::vector<SlotRecord> run_to_end() {
        std::vector<SlotRecord> records;
        records.reserve(static_cast<std::size_t>(std::max<Slot>(cfg_.horizon - state_.slot, 0)));
        while (!done()) records.push_back(step());
        return records;
    }

private:
    SimulationConfig cfg_;
    SystemState state_;
    std::unique_ptr<AdmissionPolicy> policy_;
    Rng rng_;
    RequestId next_id_ = 1;
    ProfitLedger profit_;
    std::int64_t indicator_sum_ = 0;
};

inline std::vector<SlotRecord> run(const SimulationConfig& cfg) { return Simulation(cfg).run_to_end(); }

// ---------------------------------------------------------------------------
// Summaries
// ---------------------------------------------------------------------------

/// Steady-state means over slots >= steady_start, plus end-of-run totals.
struct RunSummary {
    std::size_t slots = 0;
    std::size_t window_slots = 0;
    std::vector<double> mean_alpha;
    double mean_fairness = 0.0;
    std::vector<double> mean_utilization;
    double mean_utilization_min = 0.0;
    double priority_objective = 0.0;  // at the last slot
    double profit = 0.0;              // at the last slot
    double median_decision_latency_ns = 0.0;
};

inline double median(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    double hi = values[mid];
    if (values.size() % 2 == 1) return hi;
    const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lo + hi);
}

inline RunSummary summarize(std::span<const SlotRecord> records, Slot steady_start) {
    RunSummary s;
    s.slots = records.size();
    if (records.empty()) return s;
    auto first = std::find_if(records.begin(), records.end(), [&](const SlotRecord& r) { return r.slot >= steady_start; });
    if (first == records.end()) first = records.begin();
    const std::span<const SlotRecord> window(first, records.end());
    s.window_slots = window.size();

    const std::size_t K = records.front().alpha.size();
    const std::size_t N = records.front().utilization.size();
    s.mean_alpha.assign(K, 0.0);
    s.mean_utilization.assign(N, 0.0);
    std::vector<double> latencies;
    latencies.reserve(window.size());
    for (const auto& r : window) {
        for (std::size_t k = 0; k < K; ++k) s.mean_alpha[k] += r.alpha[k];
        for (std::size_t n = 0; n < N; ++n) s.mean_utilization[n] += r.utilization[n];
        s.mean_fairness += r.fairness;
        s.mean_utilization_min += r.utilization_min;
        latencies.push_back(static_cast<double>(r.decision_latency_ns));
    }
    const double count = static_cast<double>(window.size());
    for (double& v : s.mean_alpha) v /= count;
    for (double& v : s.mean_utilization) v /= count;
    s.mean_fairness /= count;
    s.mean_utilization_min /= count;
    s.priority_objective = records.back().priority_objective_running;
    s.profit = records.back().profit_cum;
    s.median_decision_latency_ns = median(std::move(latencies));
    return s;
}

// ---------------------------------------------------------------------------
// Parameter sweeps
// ---------------------------------------------------------------------------

struct SweepGrid {
    std::vector<double> lambda0s{5, 7, 9, 11, 13, 15};
    std::vector<double> epsilons{0.05, 0.10, 0.15};
    std::vector<double> varphis{0.85, 0.90, 0.95, 1.0};
    std::vector<std::string> policies{"psaccf", "mhpf", "ahpf"};
    int repetitions = 1;

    [[nodiscard]] std::size_t cells() const {
        return lambda0s.size() * epsilons.size() * varphis.size() * policies.size();
    }
    [[nodiscard]] std::size_t runs() const { return cells() * static_cast<std::size_t>(std::max(repetitions, 0)); }
};

struct SweepRun {
    std::size_t index = 0;
    double lambda0 = 0.0;
    double epsilon = 0.0;
    double varphi = 0.0;
    std::string policy;
    int repetition = 0;
    std::uint64_t seed = 0;
    std::vector<SlotRecord> records;
};

/// Enumerates runs in grid order (lambda0, epsilon, varphi, policy, repetition);
/// run i uses seed base_seed + i.
inline std::vector<SweepRun> plan_sweep(const SweepGrid& grid, std::uint64_t base_seed) {
    std::vector<SweepRun> plan;
    plan.reserve(grid.runs());
    for (double lambda0 : grid.lambda0s)
        for (double epsilon : grid.epsilons)
            for (double varphi : grid.varphis)
                for (const auto& policy : grid.policies)
                    for (int rep = 0; rep < grid.repetitions; ++rep) {
                        SweepRun run;
                        run.index = plan.size();
                        run.lambda0 = lambda0;
                        run.epsilon = epsilon;
                        run.varphi = varphi;
                        run.policy = policy;
                        run.repetition = rep;
                        run.seed = base_seed + run.index;
                        plan.push_back(std::move(run));
                    }
    return plan;
}

/// Simulation config of one sweep run: classes are re-resolved from the
/// factors at the run's lambda0.
inline SimulationConfig sweep_run_config(const WorkloadFactors& factors, const SimulationConfig& base,
                                         const SweepRun& run) {
    SimulationConfig cfg = base;
    WorkloadFactors f = factors;
    f.base_arrival_rate = run.lambda0;
    cfg.workload = make_workload(f, run.seed);
    cfg.fairness.epsilon = run.epsilon;
    cfg.fairness.varphi = run.varphi;
    cfg.policy = run.policy;
    return cfg;
}

/// Runs every grid cell; results come back in grid order whatever the worker count.
inline std::vector<SweepRun> sweep(const WorkloadFactors& factors, const SimulationConfig& base, const SweepGrid& grid,
                                   std::uint64_t base_seed, int workers = 1,
                                   const std::function<void(const SweepRun&)>& on_done = {}) {
    std::vector<SweepRun> plan = plan_sweep(grid, base_seed);
    std::vector<std::exception_ptr> errors(plan.size());
    std::atomic<std::size_t> next{0};
    std::mutex done_mutex;

    auto worker = [&] {
        for (std::size_t i = next++; i < plan.size(); i = next++) {
            try {
                plan[i].records = run(sweep_run_config(factors, base, plan[i]));
                if (on_done) {
                    std::lock_guard lock(done_mutex);
                    on_done(plan[i]);
                }
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    const int count = std::clamp(workers, 1, static_cast<int>(std::max<std::size_t>(plan.size(), 1)));
    {
        std::vector<std::jthread> pool;
        for (int w = 1; w < count; ++w) pool.emplace_back(worker);
        worker();
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return plan;
}

}  // namespace slicesim
