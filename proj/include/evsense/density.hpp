#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "evsense/geometry.hpp"
#include "evsense/sensing.hpp"
#include "evsense/types.hpp"

namespace evsense {

/// Anything that assigns a nonnegative density value to each grid cell.
template <typename D>
concept DensityField = requires(const D& d, std::size_t i) {
    { d.grid() } -> std::convertible_to<const Grid&>;
    { d.value(i) } -> std::convertible_to<double>;
};

/// Max-normalized per-cell event counts of one agent at one tick.
class DensityEstimate {
public:
    DensityEstimate() = default;
    DensityEstimate(Grid grid, std::vector<double> values, Tick built_at)
        : grid_(std::move(grid)), values_(std::move(values)), built_at_(built_at)
    {
        if (values_.size() != grid_.size())
            throw std::invalid_argument("density values do not match grid size");
    }

    const Grid& grid() const noexcept { return grid_; }
    double value(std::size_t flat) const noexcept { return values_[flat]; }
    double value(CellIndex c) const noexcept { return values_[grid_.flat(c)]; }
    std::span<const double> values() const noexcept { return values_; }
    Tick built_at() const noexcept { return built_at_; }

private:
    Grid grid_;
    std::vector<double> values_;
    Tick built_at_ = 0;
};

/// Counts the events with tick in [now - time_window, now] per cell and
/// divides by the largest count.
inline DensityEstimate estimate_density(std::span<const EventRecord> known_events, Tick now, Tick time_window,
                                        const Grid& grid)
{
    if (time_window <= 0)
        throw std::invalid_argument("time window must be positive");
    std::vector<std::uint32_t> counts(grid.size(), 0);
    std::uint32_t max_count = 0;
    for (const auto& e : known_events) {
        const auto cell = grid.cell_of(e.pos);
        if (e.tick < now - time_window || e.tick > now)
            continue;
        max_count = std::max(max_count, ++counts[grid.flat(cell)]);
    }
    std::vector<double> values(grid.size(), 0.0);
    if (max_count > 0) {
        const double denom = static_cast<double>(max_count);
        for (std::size_t i = 0; i < counts.size(); ++i)
            values[i] = static_cast<double>(counts[i]) / denom;
    }
    return DensityEstimate(grid, std::move(values), now);
}

/// Incrementally maintained version of estimate_density for a sliding
/// window. Events are bucketed by tick in a ring of time_window + 1 slots,
/// and the maximum count is tracked through a histogram of counts, so
/// insertion and expiry are O(1) amortized.
class WindowDensity {
public:
    WindowDensity() = default;
    WindowDensity(Grid grid, Tick time_window)
        : grid_(std::move(grid)), window_(time_window), counts_(grid_.size(), 0),
          buckets_(static_cast<std::size_t>(time_window) + 1), count_freq_(1, grid_.size())
    {
        if (time_window <= 0)
            throw std::invalid_argument("time window must be positive");
    }

    const Grid& grid() const noexcept { return grid_; }
    Tick time_window() const noexcept { return window_; }
    Tick now() const noexcept { return now_; }

    /// Move the window end to `now` (monotone), expiring old ticks.
    void advance(Tick now)
    {
        if (now <= now_)
            return;
        const Tick old_start = now_ - window_;
        const Tick new_start = now - window_;
        const Tick first = std::max(old_start, new_start - static_cast<Tick>(buckets_.size()));
        for (Tick t = first; t < new_start; ++t) {
            auto& bucket = buckets_[slot(t)];
            for (const auto& [tick, cell] : bucket)
                if (tick < new_start)
                    decrement(cell);
            std::erase_if(bucket, [new_start](const auto& e) { return e.first < new_start; });
        }
        now_ = now;
    }

    /// Add an event occurring at `tick` (<= now()). Events already outside
    /// the window are ignored. Returns whether it was counted.
    bool add(Point pos, Tick tick)
    {
        const auto cell = grid_.flat(grid_.cell_of(pos));
        if (tick < now_ - window_ || tick > now_)
            return false;
        buckets_[slot(tick)].emplace_back(tick, cell);
        increment(cell);
        return true;
    }

    std::uint32_t max_count() const noexcept { return max_; }
    std::uint32_t count(std::size_t flat) const noexcept { return counts_[flat]; }

    double value(std::size_t flat) const noexcept
    {
        return max_ == 0 ? 0.0 : static_cast<double>(counts_[flat]) / static_cast<double>(max_);
    }

    DensityEstimate snapshot() const
    {
        std::vector<double> v(grid_.size());
        for (std::size_t i = 0; i < v.size(); ++i)
            v[i] = value(i);
        return DensityEstimate(grid_, std::move(v), now_);
    }

private:
    std::size_t slot(Tick t) const noexcept
    {
        const auto n = static_cast<Tick>(buckets_.size());
        return static_cast<std::size_t>(((t % n) + n) % n);
    }

    void increment(std::size_t cell)
    {
        const auto c = counts_[cell]++;
        if (count_freq_.size() <= c + 1)
            count_freq_.resize(c + 2, 0);
        --count_freq_[c];
        ++count_freq_[c + 1];
        max_ = std::max(max_, c + 1);
    }

    void decrement(std::size_t cell)
    {
        const auto c = counts_[cell]--;
        --count_freq_[c];
        ++count_freq_[c - 1];
        while (max_ > 0 && count_freq_[max_] == 0)
            --max_;
    }

    Grid grid_;
    Tick window_ = 1;
    Tick now_ = 0;
    std::vector<std::uint32_t> counts_;
    std::vector<std::vector<std::pair<Tick, std::size_t>>> buckets_;
    std::vector<std::size_t> count_freq_; // count_freq_[c] = #cells holding count c
    std::uint32_t max_ = 0;
};

struct GradientVector {
    double gx = 0.0;
    double gy = 0.0;
};

inline double gradient_magnitude(GradientVector g) noexcept
{
    return std::hypot(g.gx, g.gy);
}

/// Cell-sum surrogate of the detection objective:
/// sum over cells of density * P(cell center, positions).
template <DensityField D>
double discrete_objective(std::span<const Point> positions, const D& density, const SensingParams& params)
{
    const Grid& grid = density.grid();
    double total = 0.0;
    for (std::size_t row = 0; row < grid.n_rows(); ++row) {
        for (std::size_t col = 0; col < grid.n_cols(); ++col) {
            const std::size_t i = row * grid.n_cols() + col;
            const double v = density.value(i);
            if (v == 0.0)
                continue;
            total += v * joint_detection_prob(positions, grid.center_unchecked(col, row), params);
        }
    }
    return total;
}

/// Cells closer than this to the agent are skipped: 1/d diverges there.
inline constexpr double gradient_singularity_eps = 1e-9;

/// Gradient of discrete_objective with respect to the position of the agent
/// at `self_pos`. `neighbor_positions` are the other agents' known valid
/// locations; those farther than 2 R_s cannot overlap the agent's sensing
/// disc and are dropped.
template <DensityField D>
GradientVector gradient(Point self_pos, std::span<const Point> neighbor_positions, const D& density,
                        const SensingParams& params)
{
    const double rs = params.r_s;
    const double reach2 = 4.0 * rs * rs;
    const double rs2 = rs * rs;

    thread_local std::vector<Point> near;
    near.clear();
    for (const Point& p : neighbor_positions)
        if (distance_sq(p, self_pos) <= reach2)
            near.push_back(p);

    GradientVector g;
    density.grid().for_each_cell_in_disc(self_pos, rs, [&](std::size_t i, Point q) {
        const double v = density.value(i);
        if (v == 0.0)
            return;
        const double d = distance(self_pos, q);
        if (d < gradient_singularity_eps)
            return;
        double miss = 1.0;
        for (const Point& k : near) {
            const double dk2 = distance_sq(k, q);
            if (dk2 > rs2)
                continue;
            const double u = 1.0 - std::sqrt(dk2) / rs;
            miss *= 1.0 - u * u;
        }
        const double common = v * miss * (2.0 / rs) * (1.0 / rs - 1.0 / d);
        g.gx += common * (self_pos.x - q.x);
        g.gy += common * (self_pos.y - q.y);
    });
    return g;
}

} // namespace evsense
