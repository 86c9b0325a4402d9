// evsense: run replication batches of the mobile event-sensing simulator.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evsense/batch.hpp"
#include "evsense/config.hpp"
#include "evsense/presets.hpp"

namespace {

struct Overrides {
    std::optional<std::uint32_t> n_agents;
    std::optional<evsense::Tick> still_time;
    std::optional<double> step_size;
    std::optional<evsense::Tick> time_window;
    std::optional<double> rtog_min_grad;
    std::optional<double> gtor_max_grad;
    std::optional<double> gtor_prob;
    std::optional<std::uint32_t> gtor_first_steps;
    std::optional<double> sensing_range;
    std::optional<double> comm_range;
    std::optional<double> cell_size;
    std::optional<evsense::Tick> metric_window;
    std::optional<std::string> boundary;
    bool no_phase_offsets = false;

    bool touches_switching() const { return rtog_min_grad || gtor_max_grad || gtor_prob || gtor_first_steps; }

    void apply(evsense::SimParams& p) const
    {
        if (n_agents) p.n_agents = *n_agents;
        if (still_time) p.still_time = *still_time;
        if (step_size) p.step_size = *step_size;
        if (time_window) p.time_window = *time_window;
        if (rtog_min_grad) p.switching.r_to_g_min_grad = *rtog_min_grad;
        if (gtor_max_grad) p.switching.g_to_r_max_grad = *gtor_max_grad;
        if (gtor_prob) p.switching.g_to_r_prob = *gtor_prob;
        if (gtor_first_steps) p.switching.g_to_r_first_steps = *gtor_first_steps;
        if (sensing_range) p.sensing.r_s = *sensing_range;
        if (comm_range) p.sensing.r_c = *comm_range;
        if (cell_size) p.cell_size = *cell_size;
        if (metric_window) p.metric_window = *metric_window;
        if (boundary) p.boundary = evsense::parse_boundary(*boundary);
        if (no_phase_offsets) p.phase_offsets = false;
    }
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulate autonomous mobile agents sensing a time-varying event field"};

    std::string preset_name;
    std::string config_path;
    std::string behavior_name;
    double scale = 1.0;
    std::size_t replications = 1;
    std::uint64_t seed = 1;
    std::string out_dir = "evsense-out";
    evsense::Tick snapshot_interval = 0;
    unsigned parallel = 1;
    std::string dump_name;
    std::string dump_output;
    Overrides ov;

    auto* preset_opt = app.add_option("--preset", preset_name, "Built-in experiment")
                           ->check(CLI::IsMember({"exp1", "exp2", "exp3"}));
    auto* config_opt = app.add_option("--config", config_path, "Scenario file to run")->check(CLI::ExistingFile);
    preset_opt->excludes(config_opt);
    auto* behavior_opt = app.add_option("--behavior", behavior_name, "random | mixed | gradient | custom")
                             ->check(CLI::IsMember({"random", "mixed", "gradient", "custom"}));
    auto* scale_opt = app.add_option("--scale", scale, "Fraction of the full run length, in (0, 1]");
    app.add_option("--replications", replications, "Number of independent runs")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "Base seed; replication k uses seed + k");
    app.add_option("--out-dir", out_dir, "Output directory");
    app.add_option("--snapshot-interval", snapshot_interval, "Write agent states every N ticks (0 = off)")
        ->check(CLI::NonNegativeNumber);
    app.add_option("--parallel", parallel, "Replications run concurrently")->check(CLI::PositiveNumber);
    auto* dump_opt = app.add_option("--dump-config", dump_name, "Print the scenario file of a preset and exit")
                         ->check(CLI::IsMember({"exp1", "exp2", "exp3"}));
    app.add_option("-o,--output", dump_output, "Destination file for --dump-config (default: stdout)")
        ->needs(dump_opt);
    dump_opt->excludes(preset_opt)->excludes(config_opt);

    auto* custom = app.add_option_group("custom", "Individual parameter overrides");
    custom->add_option("--n-agents", ov.n_agents)->check(CLI::PositiveNumber);
    custom->add_option("--still-time", ov.still_time)->check(CLI::PositiveNumber);
    custom->add_option("--step-size", ov.step_size)->check(CLI::PositiveNumber);
    custom->add_option("--time-window", ov.time_window)->check(CLI::PositiveNumber);
    custom->add_option("--rtog-min-grad", ov.rtog_min_grad);
    custom->add_option("--gtor-max-grad", ov.gtor_max_grad);
    custom->add_option("--gtor-prob", ov.gtor_prob)->check(CLI::Range(0.0, 1.0));
    custom->add_option("--gtor-first-steps", ov.gtor_first_steps);
    custom->add_option("--sensing-range", ov.sensing_range)->check(CLI::PositiveNumber);
    custom->add_option("--comm-range", ov.comm_range)->check(CLI::PositiveNumber);
    custom->add_option("--cell-size", ov.cell_size)->check(CLI::PositiveNumber);
    custom->add_option("--metric-window", ov.metric_window)->check(CLI::PositiveNumber);
    custom->add_option("--boundary", ov.boundary)->check(CLI::IsMember({"clamp", "reflect"}));
    custom->add_flag("--no-phase-offsets", ov.no_phase_offsets, "All agents move at ticks 0, StillTime, ...");

    CLI11_PARSE(app, argc, argv);

    try {
        evsense::Experiment ex;
        if (!dump_name.empty() || !preset_name.empty()) {
            const std::string name = dump_name.empty() ? preset_name : dump_name;
            const auto behavior =
                behavior_name.empty() ? evsense::Behavior::Mixed : evsense::parse_behavior(behavior_name);
            ex = evsense::preset(name, scale, behavior);
        } else if (!config_path.empty()) {
            if (*behavior_opt)
                throw std::invalid_argument("--behavior applies to presets; edit the [switching] table instead");
            if (*scale_opt)
                throw std::invalid_argument("--scale applies to presets only");
            ex = evsense::load_config(config_path);
        } else {
            throw std::invalid_argument("one of --preset, --config or --dump-config is required");
        }
        if (ov.touches_switching())
            ex.params.behavior = evsense::Behavior::Custom;
        ov.apply(ex.params);
        ex.params.validate();

        if (!dump_name.empty()) {
            const std::string text = evsense::write_config(ex);
            if (dump_output.empty()) {
                std::cout << text;
            } else {
                std::ofstream out(dump_output, std::ios::binary | std::ios::trunc);
                if (!(out << text))
                    throw std::runtime_error("cannot write '" + dump_output + "'");
            }
            return 0;
        }

        evsense::BatchConfig batch;
        batch.experiment = ex;
        batch.replications = replications;
        batch.base_seed = seed;
        batch.out_dir = out_dir;
        batch.snapshot_interval = snapshot_interval;
        batch.parallel = parallel;
        const auto results = evsense::run_batch(batch);

        std::vector<double> g, l;
        for (const auto& r : results) {
            g.push_back(r.global_fraction);
            l.push_back(r.avg_local_fraction);
        }
        const auto gm = evsense::mean_ci(g), lm = evsense::mean_ci(l);
        std::printf("behavior %s, %zu replication(s)\n", std::string(evsense::to_string(ex.params.behavior)).c_str(),
                    results.size());
        std::printf("  global fraction of events (%%):        %s +- %s\n", evsense::fixed(gm.mean, 2).c_str(),
                    evsense::fixed(gm.half_width, 2).c_str());
        std::printf("  average local fraction of events (%%): %s +- %s\n", evsense::fixed(lm.mean, 2).c_str(),
                    evsense::fixed(lm.half_width, 2).c_str());
        std::printf("  output: %s\n", out_dir.c_str());
    } catch (const std::exception& e) {
        std::cerr << "evsense: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
