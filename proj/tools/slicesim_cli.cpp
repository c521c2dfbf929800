// slicesim: run one admission-control simulation or the full parameter grid.
//
// Exit codes: 0 success, 2 configuration error, 1 runtime failure.

#include "slicesim/config.hpp"
#include "slicesim/report.hpp"
#include "slicesim/sim_engine.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace {

struct Overrides {
    std::string config_path;
    std::optional<std::string> policy;
    std::optional<double> lambda0;
    std::optional<double> epsilon;
    std::optional<double> varphi;
    std::optional<std::int64_t> horizon;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    bool sweep = false;
    int workers = 1;
    int reps = 1;
    bool no_balk = false;
    bool timing = false;
};

slicesim::RunConfig resolve(const Overrides& o) {
    slicesim::RunConfig cfg = o.config_path.empty() ? slicesim::RunConfig{} : slicesim::parse_config_file(o.config_path);
    if (o.policy) cfg.policy = *o.policy;
    if (o.lambda0) cfg.workload.base_arrival_rate = *o.lambda0;
    if (o.epsilon) cfg.epsilon = *o.epsilon;
    if (o.varphi) cfg.varphi = *o.varphi;
    if (o.horizon) cfg.horizon = *o.horizon;
    if (o.seed) cfg.seed = *o.seed;
    if (o.out) cfg.out = *o.out;
    if (o.no_balk) cfg.workload.base_balk = 0.0;
    if (o.timing) cfg.timing = true;
    slicesim::validate(cfg);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Slice admission control simulator (psaccf, mhpf, ahpf)"};
    Overrides o;
    app.add_option("--config", o.config_path, "key = value config file")->check(CLI::ExistingFile);
    app.add_option("--policy", o.policy, "psaccf | mhpf | ahpf");
    app.add_option("--lambda0", o.lambda0, "base arrival rate");
    app.add_option("--epsilon", o.epsilon, "target CSAR gap factor");
    app.add_option("--varphi", o.varphi, "fairness threshold in [0,1]");
    app.add_option("--horizon", o.horizon, "number of slots");
    app.add_option("--seed", o.seed, "random seed (sweeps use seed + run index)");
    app.add_option("--out", o.out, "output directory");
    app.add_flag("--sweep", o.sweep, "run the full lambda0 x epsilon x varphi x policy grid");
    app.add_option("--workers", o.workers, "parallel runs during a sweep")->check(CLI::PositiveNumber);
    app.add_option("--reps", o.reps, "repetitions per sweep cell")->check(CLI::PositiveNumber);
    app.add_flag("--no-balk", o.no_balk, "disable balking (beta0 = 0)");
    app.add_flag("--timing", o.timing, "record wall-clock decision latency (breaks byte-identical output)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    slicesim::RunConfig cfg;
    try {
        cfg = resolve(o);
    } catch (const slicesim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }

    try {
        const std::filesystem::path outdir(cfg.out);
        if (o.sweep) {
            slicesim::SweepGrid grid;
            grid.repetitions = o.reps;
            const std::size_t total = grid.runs();
            std::size_t finished = 0;
            slicesim::reproduce_grid(cfg, grid, outdir, o.workers, [&](const slicesim::SweepRun& run) {
                ++finished;
                std::cout << "[" << finished << "/" << total << "] " << slicesim::sweep_run_dirname(run) << '\n';
            });
            std::cout << "wrote " << (outdir / "sweep_summary.csv").string() << '\n';
        } else {
            const auto records = slicesim::run(slicesim::to_simulation_config(cfg));
            slicesim::emit_records(records, cfg, outdir);
            const auto s = slicesim::summarize(records, cfg.steady_start);
            std::cout << cfg.policy << ": " << records.size() << " slots, fairness " << s.mean_fairness
                      << ", priority " << s.priority_objective << ", profit " << s.profit << '\n';
            std::cout << "wrote " << (outdir / "slots.csv").string() << '\n';
        }
    } catch (const slicesim::InvariantViolation& e) {
        std::cerr << "invariant violation: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
