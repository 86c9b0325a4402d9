#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evsense/engine.hpp"

namespace evsense {

/// Final accounting of one event.
struct EventOutcome {
    Tick occurred_at = 0;
    std::uint32_t detected_count = 0; // |detected_by|
    std::uint32_t noticed_count = 0;  // |noticed_by|
};

inline std::vector<EventOutcome> event_outcomes(const World& world)
{
    std::vector<EventOutcome> out;
    out.reserve(world.events().size());
    for (const Event& e : world.events()) {
        EventOutcome o{e.occurred_at, 0, 0};
        for (const auto& a : world.agents()) {
            o.detected_count += a.has_detected(e.id) ? 1 : 0;
            o.noticed_count += a.view.knows(e.id) ? 1 : 0;
        }
        out.push_back(o);
    }
    return out;
}

/// Percentage of events detected by at least one agent.
inline double global_fraction(std::span<const EventOutcome> events)
{
    if (events.empty())
        return 0.0;
    std::size_t hit = 0;
    for (const auto& e : events)
        hit += e.detected_count > 0 ? 1 : 0;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(events.size());
}

/// Mean over agents of the percentage of events each agent noticed.
inline double avg_local_fraction(std::span<const EventOutcome> events, std::uint32_t n_agents)
{
    if (events.empty() || n_agents == 0)
        return 0.0;
    double noticed = 0.0;
    for (const auto& e : events)
        noticed += e.noticed_count;
    return 100.0 * noticed / (static_cast<double>(events.size()) * n_agents);
}

struct WindowValue {
    double global = 0.0;
    double local = 0.0;

    friend bool operator==(const WindowValue&, const WindowValue&) = default;
};

/// Both metrics restricted to events with occurred_at in
/// [t - window/2, t + window/2]; empty when no event falls in the window.
inline std::optional<WindowValue> window_metrics(std::span<const EventOutcome> events, std::uint32_t n_agents,
                                                 Tick t, Tick window)
{
    if (window <= 0)
        throw std::invalid_argument("metric window must be positive");
    const Tick lo = t - window / 2, hi = t + window / 2;
    std::size_t n = 0, hit = 0;
    double noticed = 0.0;
    for (const auto& e : events) {
        if (e.occurred_at < lo || e.occurred_at > hi)
            continue;
        ++n;
        hit += e.detected_count > 0 ? 1 : 0;
        noticed += e.noticed_count;
    }
    if (n == 0)
        return std::nullopt;
    return WindowValue{100.0 * static_cast<double>(hit) / static_cast<double>(n),
                       100.0 * noticed / (static_cast<double>(n) * n_agents)};
}

/// window_metrics for every tick in [0, max_t), via prefix sums.
inline std::vector<std::optional<WindowValue>> window_series(std::span<const EventOutcome> events,
                                                             std::uint32_t n_agents, Tick max_t, Tick window)
{
    if (window <= 0)
        throw std::invalid_argument("metric window must be positive");
    const auto m = static_cast<std::size_t>(max_t);
    std::vector<std::uint64_t> cnt(m + 1, 0), hit(m + 1, 0), noticed(m + 1, 0);
    for (const auto& e : events) {
        if (e.occurred_at < 0 || e.occurred_at >= max_t)
            continue;
        const auto k = static_cast<std::size_t>(e.occurred_at) + 1;
        ++cnt[k];
        hit[k] += e.detected_count > 0 ? 1 : 0;
        noticed[k] += e.noticed_count;
    }
    for (std::size_t k = 1; k <= m; ++k) {
        cnt[k] += cnt[k - 1];
        hit[k] += hit[k - 1];
        noticed[k] += noticed[k - 1];
    }
    std::vector<std::optional<WindowValue>> out(m);
    for (Tick t = 0; t < max_t; ++t) {
        const auto lo = static_cast<std::size_t>(std::max<Tick>(0, t - window / 2));
        const auto hi = static_cast<std::size_t>(std::min<Tick>(max_t - 1, t + window / 2)) + 1;
        const auto n = cnt[hi] - cnt[lo];
        if (n == 0)
            continue;
        const double dn = static_cast<double>(n);
        out[static_cast<std::size_t>(t)] =
            WindowValue{100.0 * static_cast<double>(hit[hi] - hit[lo]) / dn,
                        100.0 * static_cast<double>(noticed[hi] - noticed[lo]) / (dn * n_agents)};
    }
    return out;
}

struct RunResult {
    std::uint64_t seed = 0;
    Behavior behavior = Behavior::Custom;
    double global_fraction = 0.0;
    double avg_local_fraction = 0.0;
    std::vector<std::optional<WindowValue>> window_series;
    std::vector<Snapshot> snapshots;
    RunDiagnostics diagnostics;
    std::uint64_t total_events = 0;
    bool detected_subset_of_noticed = true;
};

struct RunOptions {
    Tick snapshot_interval = 0;
};

/// One full replication. Identical (params, spec, seed) give identical
/// results.
inline RunResult run(const SimParams& params, const ScenarioSpec& spec, std::uint64_t seed,
                     const RunOptions& options = {})
{
    World world(params, spec, seed);
    world.set_snapshot_interval(options.snapshot_interval);
    while (!world.finished())
        world.step();

    RunResult r;
    r.seed = seed;
    r.behavior = params.behavior;
    for (const Event& e : world.events())
        for (const auto& a : world.agents())
            if (a.has_detected(e.id) && !a.view.knows(e.id))
                r.detected_subset_of_noticed = false;
    const auto outcomes = event_outcomes(world);
    r.global_fraction = global_fraction(outcomes);
    r.avg_local_fraction = avg_local_fraction(outcomes, params.n_agents);
    r.window_series = window_series(outcomes, params.n_agents, spec.max_t, params.metric_window);
    r.snapshots = world.snapshots();
    r.diagnostics = world.diagnostics();
    r.total_events = outcomes.size();
    return r;
}

struct MeanCI {
    double mean = 0.0;
    double half_width = 0.0; // 95% normal-approximation half-width
    std::size_t n = 0;

    double lo() const noexcept { return mean - half_width; }
    double hi() const noexcept { return mean + half_width; }
};

/// Mean and 1.96 * sd / sqrt(n) with the sample standard deviation.
inline MeanCI mean_ci(std::span<const double> xs)
{
    MeanCI out;
    out.n = xs.size();
    if (xs.empty())
        return out;
    double sum = 0.0;
    for (double x : xs)
        sum += x;
    out.mean = sum / static_cast<double>(xs.size());
    if (xs.size() < 2)
        return out;
    double ss = 0.0;
    for (double x : xs)
        ss += (x - out.mean) * (x - out.mean);
    const double sd = std::sqrt(ss / static_cast<double>(xs.size() - 1));
    out.half_width = 1.96 * sd / std::sqrt(static_cast<double>(xs.size()));
    return out;
}

struct WindowCI {
    MeanCI global;
    MeanCI local;
};

struct AggregateResult {
    MeanCI global;
    MeanCI local;
    std::vector<std::optional<WindowCI>> window_series;
    std::size_t replications = 0;
};

inline AggregateResult aggregate(std::span<const RunResult> results)
{
    if (results.size() < 2)
        throw std::invalid_argument("aggregation needs at least two replications");
    AggregateResult agg;
    agg.replications = results.size();
    std::vector<double> g, l;
    for (const auto& r : results) {
        g.push_back(r.global_fraction);
        l.push_back(r.avg_local_fraction);
    }
    agg.global = mean_ci(g);
    agg.local = mean_ci(l);

    std::size_t len = 0;
    for (const auto& r : results)
        len = std::max(len, r.window_series.size());
    agg.window_series.resize(len);
    for (std::size_t t = 0; t < len; ++t) {
        g.clear();
        l.clear();
        for (const auto& r : results) {
            if (t < r.window_series.size() && r.window_series[t]) {
                g.push_back(r.window_series[t]->global);
                l.push_back(r.window_series[t]->local);
            }
        }
        if (!g.empty())
            agg.window_series[t] = WindowCI{mean_ci(g), mean_ci(l)};
    }
    return agg;
}

} // namespace evsense
