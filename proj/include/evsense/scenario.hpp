#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "evsense/geometry.hpp"
#include "evsense/random.hpp"
#include "evsense/types.hpp"

namespace evsense {

struct Rect {
    double x0 = 0.0, y0 = 0.0, x1 = 0.0, y1 = 0.0;

    double width() const noexcept { return x1 - x0; }
    double height() const noexcept { return y1 - y0; }
    double area() const noexcept { return std::max(0.0, width()) * std::max(0.0, height()); }
    bool contains(Point p) const noexcept { return p.x >= x0 && p.x < x1 && p.y >= y0 && p.y < y1; }

    Rect translated(double dx, double dy) const noexcept { return {x0 + dx, y0 + dy, x1 + dx, y1 + dy}; }

    Rect clipped(const Region& r) const noexcept
    {
        return {std::max(x0, 0.0), std::max(y0, 0.0), std::min(x1, r.width), std::min(y1, r.height)};
    }

    friend bool operator==(const Rect&, const Rect&) = default;
};

/// A rectangle of uniform event density that translates at constant
/// velocity while active. The start rectangle may lie partly or wholly
/// outside the region (a cloud sliding in); only the clipped part counts.
struct Patch {
    Rect rect_at_start;
    double vx = 0.0; // distance units per tick
    double vy = 0.0;
    Tick t_start = 0;
    Tick t_end = std::numeric_limits<Tick>::max();
    double weight = 1.0;

    bool active(Tick t) const noexcept { return t >= t_start && t <= t_end; }

    Rect rect_at(Tick t) const noexcept
    {
        const double dt = static_cast<double>(t - t_start);
        return rect_at_start.translated(vx * dt, vy * dt);
    }

    void validate() const
    {
        if (t_start > t_end)
            throw std::invalid_argument("patch activity window is reversed");
        if (!(weight >= 0.0) || !std::isfinite(weight))
            throw std::invalid_argument("patch weight must be finite and nonnegative");
        if (!(rect_at_start.width() > 0.0) || !(rect_at_start.height() > 0.0))
            throw std::invalid_argument("patch rectangle must have positive area");
    }

    friend bool operator==(const Patch&, const Patch&) = default;
};

struct ScenarioSpec {
    Region region{1000.0, 1000.0};
    std::vector<Patch> patches;
    std::uint64_t total_events = 0;
    Tick max_t = 0;
    Tick vis_time = 0;

    void validate() const
    {
        if (total_events == 0)
            throw std::invalid_argument("scenario needs total_events > 0");
        if (max_t <= 0)
            throw std::invalid_argument("scenario needs max_t > 0");
        if (vis_time < 0)
            throw std::invalid_argument("vis_time must be nonnegative");
        for (const auto& p : patches)
            p.validate();
    }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

struct Event {
    EventId id = 0;
    Point pos;
    Tick occurred_at = 0;
    Tick visible_until = 0;

    EventRecord record() const noexcept { return {id, pos, occurred_at}; }
};

/// Piecewise-constant event density at q: summed weights of active patches
/// covering q.
inline double density_weight(const ScenarioSpec& spec, Point q, Tick t)
{
    double w = 0.0;
    for (const auto& p : spec.patches)
        if (p.active(t) && p.rect_at(t).clipped(spec.region).contains(q))
            w += p.weight;
    return w;
}

/// Events emitted at tick t: the cumulative count after tick t is
/// floor((t + 1) * total / max_t), so a run emits exactly total_events and
/// every tick emits total/max_t when that ratio is an integer.
inline std::uint64_t events_at_tick(const ScenarioSpec& spec, Tick t) noexcept
{
    if (t < 0 || t >= spec.max_t)
        return 0;
    const auto m = static_cast<unsigned __int128>(spec.max_t);
    const auto n = static_cast<unsigned __int128>(spec.total_events);
    const auto tt = static_cast<unsigned __int128>(t);
    return static_cast<std::uint64_t>((tt + 1) * n / m - tt * n / m);
}

/// Draws this tick's events. Each event picks an active patch with
/// probability proportional to weight times clipped area, then a uniform
/// point in the clipped rectangle. `next_id` is advanced per event.
inline std::vector<Event> sample_events(const ScenarioSpec& spec, Tick t, RandomStream& rng, EventId& next_id)
{
    std::vector<Event> out;
    const std::uint64_t n = events_at_tick(spec, t);
    if (n == 0)
        return out;

    thread_local std::vector<Rect> rects;
    thread_local std::vector<double> cumulative;
    rects.clear();
    cumulative.clear();
    double total = 0.0;
    for (const auto& p : spec.patches) {
        if (!p.active(t))
            continue;
        const Rect r = p.rect_at(t).clipped(spec.region);
        const double mass = p.weight * r.area();
        if (!(mass > 0.0))
            continue;
        total += mass;
        rects.push_back(r);
        cumulative.push_back(total);
    }
    if (rects.empty())
        return out;

    out.reserve(n);
    for (std::uint64_t k = 0; k < n; ++k) {
        std::size_t idx = 0;
        if (rects.size() > 1) {
            const double u = rng.uniform01() * total;
            idx = static_cast<std::size_t>(std::upper_bound(cumulative.begin(), cumulative.end(), u) -
                                           cumulative.begin());
            idx = std::min(idx, rects.size() - 1);
        }
        const Rect& r = rects[idx];
        Event e;
        e.id = next_id++;
        e.pos = {r.x0 + r.width() * rng.uniform01(), r.y0 + r.height() * rng.uniform01()};
        e.occurred_at = t;
        e.visible_until = t + spec.vis_time;
        out.push_back(e);
    }
    return out;
}

} // namespace evsense
