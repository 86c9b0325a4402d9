#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "evsense/params.hpp"
#include "evsense/scenario.hpp"

namespace evsense {

struct Experiment {
    ScenarioSpec scenario;
    SimParams params;

    friend bool operator==(const Experiment&, const Experiment&) = default;
};

namespace detail {

inline Tick scaled_tick(Tick t, double scale) { return static_cast<Tick>(std::llround(static_cast<double>(t) * scale)); }

/// Behavior column of the parameter tables. `mixed_prob` is GtoRProb of the
/// mixed column, which differs per experiment.
inline SwitchParams behavior_column(Behavior b, double mixed_prob)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (b) {
    case Behavior::Random: return {inf, inf, 1.0, 0};
    case Behavior::Gradient: return {0.01, 0.00001, 0.0, 0};
    case Behavior::Mixed:
    case Behavior::Custom: return {0.01, 0.00001, mixed_prob, 10};
    }
    return {};
}

} // namespace detail

/// Apply a behavior column to an experiment whose mixed GtoRProb is
/// `mixed_prob`. Custom keeps the existing values.
inline void apply_behavior(SimParams& params, Behavior b, double mixed_prob)
{
    if (b != Behavior::Custom)
        params.switching = detail::behavior_column(b, mixed_prob);
    params.behavior = b;
}

inline double mixed_gtor_prob(std::string_view name)
{
    if (name == "exp1") return 0.005;
    if (name == "exp2") return 0.0005;
    if (name == "exp3") return 0.01;
    throw std::invalid_argument("unknown preset '" + std::string(name) + "'");
}

/// Built-in experiment configurations. `scale` in (0, 1] shrinks the run
/// length, event total and every scripted time while keeping the per-tick
/// event rate; patches move proportionally faster so their paths are
/// unchanged. Patch geometry (200x200 squares) is a modelling choice.
inline Experiment preset(std::string_view name, double scale = 1.0, Behavior behavior = Behavior::Mixed)
{
    if (!(scale > 0.0 && scale <= 1.0))
        throw std::invalid_argument("scale must lie in (0, 1]");
    const double gtor = mixed_gtor_prob(name);

    Experiment ex;
    ScenarioSpec& sc = ex.scenario;
    SimParams& p = ex.params;
    sc.region = Region(1000.0, 1000.0);
    p.sensing = {100.0, 200.0};
    p.cell_size = 10.0;
    p.time_window = 1000;

    constexpr double side = 200.0;
    if (name == "exp1" || name == "exp2") {
        sc.max_t = detail::scaled_tick(90'000, scale);
        sc.total_events = static_cast<std::uint64_t>(std::llround((name == "exp1" ? 900'000.0 : 1'650'000.0) * scale));
        sc.vis_time = 0;
        p.n_agents = 30;
        p.still_time = 10;
        p.step_size = 30.0;
        p.metric_window = 900;
        // Leading edge travels from x = side to x = width over the run.
        const double vx = (sc.region.width - side) / static_cast<double>(sc.max_t);
        const double y0 = (sc.region.height - side) / 2.0;
        sc.patches.push_back({{0.0, y0, side, y0 + side}, vx, 0.0, 0, sc.max_t, 1.0});
        if (name == "exp2") {
            // Trailing cloud slides in from beyond the left edge.
            sc.patches.push_back({{-side, y0, 0.0, y0 + side}, vx, 0.0, detail::scaled_tick(10'000, scale), sc.max_t, 1.0});
        }
    } else {
        sc.max_t = detail::scaled_tick(100'000, scale);
        sc.total_events = static_cast<std::uint64_t>(std::llround(750'000.0 * scale));
        sc.vis_time = 100;
        p.n_agents = 50;
        p.still_time = 20;
        p.step_size = 25.0;
        p.metric_window = 1000;
        // Quadrant centers in activation order: bottom-left, top-right,
        // bottom-right, top-left.
        const Point centers[4] = {{250.0, 250.0}, {750.0, 750.0}, {750.0, 250.0}, {250.0, 750.0}};
        const Tick starts[4] = {0, 25'000, 50'000, 75'000};
        for (int k = 0; k < 4; ++k) {
            const Rect r{centers[k].x - side / 2, centers[k].y - side / 2, centers[k].x + side / 2,
                         centers[k].y + side / 2};
            sc.patches.push_back({r, 0.0, 0.0, detail::scaled_tick(starts[k], scale), sc.max_t, double(k + 1)});
        }
    }
    apply_behavior(p, behavior, gtor);
    return ex;
}

} // namespace evsense
