#pragma once

#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "evsense/config.hpp"
#include "evsense/metrics.hpp"
#include "evsense/output.hpp"

namespace evsense {

struct BatchConfig {
    Experiment experiment;
    std::size_t replications = 1;
    std::uint64_t base_seed = 1;
    std::filesystem::path out_dir; // empty: nothing is written
    Tick snapshot_interval = 0;
    unsigned parallel = 1;
};

/// Seed of replication k. Streams inside a replication are derived from it
/// with derive_seed(), so output does not depend on scheduling.
inline std::uint64_t replication_seed(std::uint64_t base_seed, std::size_t k) noexcept
{
    return base_seed + k;
}

inline std::string run_dir_name(std::size_t k)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "run_%04zu", k);
    return buf;
}

/// Runs all replications (up to `parallel` at a time) and writes
///   out_dir/config.toml, out_dir/run_NNNN/{summary,window[,snapshots]}.csv,
///   out_dir/aggregate.csv and, for two or more replications,
///   out_dir/aggregate_window.csv.
inline std::vector<RunResult> run_batch(const BatchConfig& cfg)
{
    if (cfg.replications == 0)
        throw std::invalid_argument("replications must be at least 1");
    cfg.experiment.params.validate();
    cfg.experiment.scenario.validate();

    namespace fs = std::filesystem;
    if (!cfg.out_dir.empty()) {
        std::error_code ec;
        fs::create_directories(cfg.out_dir, ec);
        if (ec)
            throw std::runtime_error("cannot create output directory '" + cfg.out_dir.string() + "': " + ec.message());
        const fs::path cfg_path = cfg.out_dir / "config.toml";
        auto out = detail::open_output(cfg_path);
        out << write_config(cfg.experiment);
        detail::close_output(out, cfg_path);
    }

    std::vector<RunResult> results(cfg.replications);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    const auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cfg.replications)
                return;
            try {
                RunOptions opts;
                opts.snapshot_interval = cfg.snapshot_interval;
                RunResult r = run(cfg.experiment.params, cfg.experiment.scenario,
                                  replication_seed(cfg.base_seed, k), opts);
                if (!cfg.out_dir.empty()) {
                    const fs::path dir = cfg.out_dir / run_dir_name(k);
                    fs::create_directories(dir);
                    write_summary_csv(dir / "summary.csv", r);
                    write_window_csv(dir / "window.csv", r);
                    if (cfg.snapshot_interval > 0)
                        write_snapshots_csv(dir / "snapshots.csv", r);
                }
                r.snapshots.clear();
                r.snapshots.shrink_to_fit();
                results[k] = std::move(r);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure)
                    failure = std::current_exception();
                next = cfg.replications;
                return;
            }
        }
    };

    const unsigned n_threads =
        static_cast<unsigned>(std::max<std::size_t>(1, std::min<std::size_t>(cfg.parallel, cfg.replications)));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < n_threads; ++i)
            pool.emplace_back(worker);
    }
    if (failure)
        std::rethrow_exception(failure);

    if (!cfg.out_dir.empty()) {
        if (results.size() >= 2) {
            const AggregateResult agg = aggregate(results);
            write_aggregate_csv(cfg.out_dir / "aggregate.csv", agg.global, agg.local);
            write_aggregate_window_csv(cfg.out_dir / "aggregate_window.csv", agg);
        } else {
            MeanCI g{results[0].global_fraction, 0.0, 1}, l{results[0].avg_local_fraction, 0.0, 1};
            write_aggregate_csv(cfg.out_dir / "aggregate.csv", g, l);
        }
    }
    return results;
}

} // namespace evsense
