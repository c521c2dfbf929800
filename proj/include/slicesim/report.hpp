#pragma once

// CSV output: per-slot series, run summaries and sweep tables.

#include "slicesim/config.hpp"
#include "slicesim/sim_engine.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicesim {

inline constexpr int kSummarySchemaVersion = 1;

class OutputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline std::vector<std::string> slots_csv_columns(std::size_t K, std::size_t N) {
    std::vector<std::string> cols{"slot"};
    for (std::size_t k = 1; k <= K; ++k) cols.push_back("alpha_" + std::to_string(k));
    cols.insert(cols.end(), {"priority", "priority_avg", "fairness"});
    for (std::size_t n = 1; n <= N; ++n) cols.push_back("util_" + std::to_string(n));
    cols.insert(cols.end(), {"util_min", "profit", "latency_ns"});
    for (const char* prefix : {"d_", "b_", "a_"})
        for (std::size_t k = 1; k <= K; ++k) cols.push_back(prefix + std::to_string(k));
    return cols;
}

namespace detail {

inline void write_row(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
    os << '\n';
}

template <typename T>
void append_all(std::vector<std::string>& row, const std::vector<T>& values) {
    for (const auto& v : values) {
        if constexpr (std::is_floating_point_v<T>) {
            row.push_back(format_double(v));
        } else {
            row.push_back(std::to_string(v));
        }
    }
}

inline std::ofstream open_for_write(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw OutputError("cannot open '" + path.string() + "' for writing");
    return out;
}

inline void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw OutputError("write failed for '" + path.string() + "'");
}

}  // namespace detail

inline void write_slots_csv(std::ostream& os, std::span<const SlotRecord> records, std::size_t K, std::size_t N) {
    detail::write_row(os, slots_csv_columns(K, N));
    for (const auto& r : records) {
        std::vector<std::string> row{std::to_string(r.slot)};
        detail::append_all(row, r.alpha);
        row.push_back(std::to_string(r.priority_ind));
        row.push_back(format_double(r.priority_objective_running));
        row.push_back(format_double(r.fairness));
        detail::append_all(row, r.utilization);
        row.push_back(format_double(r.utilization_min));
        row.push_back(format_double(r.profit_cum));
        row.push_back(std::to_string(r.decision_latency_ns));
        detail::append_all(row, r.departures);
        detail::append_all(row, r.balks);
        detail::append_all(row, r.admissions);
        detail::write_row(os, row);
    }
}

/// Identifies a run in summary tables.
struct RunLabel {
    std::string policy;
    double lambda0 = 0.0;
    double epsilon = 0.0;
    double varphi = 0.0;
    std::uint64_t seed = 0;
    int repetition = 0;
};

inline std::vector<std::string> summary_csv_columns(std::size_t K, std::size_t N) {
    std::vector<std::string> cols{"schema_version", "policy", "lambda0", "epsilon", "varphi", "seed",
                                  "repetition",     "slots",  "window_slots"};
    for (std::size_t k = 1; k <= K; ++k) cols.push_back("mean_alpha_" + std::to_string(k));
    cols.push_back("mean_fairness");
    for (std::size_t n = 1; n <= N; ++n) cols.push_back("mean_util_" + std::to_string(n));
    cols.insert(cols.end(), {"mean_util_min", "priority_objective", "profit", "median_latency_ns"});
    return cols;
}

inline void write_summary_row(std::ostream& os, const RunLabel& label, const RunSummary& s) {
    std::vector<std::string> row{std::to_string(kSummarySchemaVersion),
                                 label.policy,
                                 format_double(label.lambda0),
                                 format_double(label.epsilon),
                                 format_double(label.varphi),
                                 std::to_string(label.seed),
                                 std::to_string(label.repetition),
                                 std::to_string(s.slots),
                                 std::to_string(s.window_slots)};
    detail::append_all(row, s.mean_alpha);
    row.push_back(format_double(s.mean_fairness));
    detail::append_all(row, s.mean_utilization);
    row.push_back(format_double(s.mean_utilization_min));
    row.push_back(format_double(s.priority_objective));
    row.push_back(format_double(s.profit));
    row.push_back(format_double(s.median_decision_latency_ns));
    detail::write_row(os, row);
}

/// Writes slots.csv, summary.csv and config.txt for one run into `dir`.
inline void emit_records(std::span<const SlotRecord> records, const RunConfig& cfg, const std::filesystem::path& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw OutputError("cannot create output directory '" + dir.string() + "': " + ec.message());
    const std::size_t K = cfg.num_classes();
    const std::size_t N = cfg.num_resources();

    const auto slots_path = dir / "slots.csv";
    auto slots = detail::open_for_write(slots_path);
    write_slots_csv(slots, records, K, N);
    detail::finish(slots, slots_path);

    const auto summary_path = dir / "summary.csv";
    auto summary = detail::open_for_write(summary_path);
    detail::write_row(summary, summary_csv_columns(K, N));
    const RunLabel label{cfg.policy, cfg.workload.base_arrival_rate, cfg.epsilon, cfg.varphi, cfg.seed, 0};
    write_summary_row(summary, label, summarize(records, cfg.steady_start));
    detail::finish(summary, summary_path);

    const auto config_path = dir / "config.txt";
    auto config = detail::open_for_write(config_path);
    config << to_config_text(cfg);
    detail::finish(config, config_path);
}

inline std::string sweep_run_dirname(const SweepRun& run) {
    std::ostringstream os;
    os << "run_" << run.index << "_" << run.policy << "_l" << format_double(run.lambda0) << "_e"
       << format_double(run.epsilon) << "_p" << format_double(run.varphi) << "_r" << run.repetition;
    return os.str();
}

inline void write_sweep_summary(std::ostream& os, std::span<const SweepRun> runs, std::size_t K, std::size_t N,
                                Slot steady_start) {
    detail::write_row(os, summary_csv_columns(K, N));
    for (const auto& run : runs) {
        const RunLabel label{run.policy, run.lambda0, run.epsilon, run.varphi, run.seed, run.repetition};
        write_summary_row(os, label, summarize(run.records, steady_start));
    }
}

/// Runs the grid and writes one directory per run plus sweep_summary.csv.
inline std::vector<SweepRun> reproduce_grid(const RunConfig& cfg, const SweepGrid& grid,
                                            const std::filesystem::path& outdir, int workers,
                                            const std::function<void(const SweepRun&)>& progress = {}) {
    std::error_code ec;
    std::filesystem::create_directories(outdir / "runs", ec);
    if (ec) throw OutputError("cannot create output directory '" + outdir.string() + "': " + ec.message());
    const std::size_t K = cfg.num_classes();
    const std::size_t N = cfg.num_resources();
    const SimulationConfig base = to_simulation_config(cfg);

    auto runs = sweep(cfg.workload, base, grid, cfg.seed, workers, [&](const SweepRun& run) {
        const auto dir = outdir / "runs" / sweep_run_dirname(run);
        std::filesystem::create_directories(dir);
        const auto path = dir / "slots.csv";
        auto out = detail::open_for_write(path);
        write_slots_csv(out, run.records, K, N);
        detail::finish(out, path);
        if (progress) progress(run);
    });

    const auto path = outdir / "sweep_summary.csv";
    auto out = detail::open_for_write(path);
    write_sweep_summary(out, runs, K, N, cfg.steady_start);
    detail::finish(out, path);

    const auto config_path = outdir / "config.txt";
    auto config = detail::open_for_write(config_path);
    config << to_config_text(cfg);
    detail::finish(config, config_path);
    return runs;
}

}  // namespace slicesim
