#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace evsense {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
};

inline double distance_sq(Point a, Point b) noexcept
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}

inline double distance(Point a, Point b) noexcept
{
    return std::sqrt(distance_sq(a, b));
}

/// Axis-aligned rectangle [0,width] x [0,height].
struct Region {
    double width = 0.0;
    double height = 0.0;

    Region() = default;
    Region(double w, double h) : width(w), height(h)
    {
        if (!(w > 0.0) || !(h > 0.0) || !std::isfinite(w) || !std::isfinite(h))
            throw std::invalid_argument("region dimensions must be positive and finite");
    }

    bool contains(Point p) const noexcept
    {
        return p.x >= 0.0 && p.x <= width && p.y >= 0.0 && p.y <= height;
    }

    Point clamp(Point p) const noexcept
    {
        return {std::clamp(p.x, 0.0, width), std::clamp(p.y, 0.0, height)};
    }

    /// Mirror a point back into the region (single fold per axis, then clamp).
    Point reflect(Point p) const noexcept
    {
        auto fold = [](double v, double hi) {
            if (v < 0.0) v = -v;
            if (v > hi) v = 2.0 * hi - v;
            return std::clamp(v, 0.0, hi);
        };
        return {fold(p.x, width), fold(p.y, height)};
    }

    friend bool operator==(const Region&, const Region&) = default;
};

struct CellIndex {
    std::size_t col = 0; // l
    std::size_t row = 0; // m

    friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Uniform square-cell decomposition of a region. Cells are left-closed and
/// right-open; points on the region's max edges fold into the last row/column.
class Grid {
public:
    Grid() = default;
    Grid(Region region, double delta) : region_(region), delta_(delta)
    {
        if (!(delta > 0.0) || !std::isfinite(delta))
            throw std::invalid_argument("grid cell size must be positive");
        n_cols_ = static_cast<std::size_t>(std::ceil(region.width / delta));
        n_rows_ = static_cast<std::size_t>(std::ceil(region.height / delta));
    }

    const Region& region() const noexcept { return region_; }
    double delta() const noexcept { return delta_; }
    std::size_t n_cols() const noexcept { return n_cols_; }
    std::size_t n_rows() const noexcept { return n_rows_; }
    std::size_t size() const noexcept { return n_cols_ * n_rows_; }

    bool valid(CellIndex c) const noexcept { return c.col < n_cols_ && c.row < n_rows_; }

    /// Row-major flat index.
    std::size_t flat(CellIndex c) const noexcept { return c.row * n_cols_ + c.col; }
    CellIndex unflat(std::size_t i) const noexcept { return {i % n_cols_, i / n_cols_}; }

    CellIndex cell_of(Point p) const
    {
        if (!region_.contains(p))
            throw std::domain_error("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                                    ") lies outside the region");
        const auto col = std::min(static_cast<std::size_t>(std::floor(p.x / delta_)), n_cols_ - 1);
        const auto row = std::min(static_cast<std::size_t>(std::floor(p.y / delta_)), n_rows_ - 1);
        return {col, row};
    }

    Point cell_center(CellIndex c) const
    {
        if (!valid(c))
            throw std::domain_error("cell index out of range");
        return center_unchecked(c.col, c.row);
    }

    Point center_unchecked(std::size_t col, std::size_t row) const noexcept
    {
        return {(static_cast<double>(col) + 0.5) * delta_, (static_cast<double>(row) + 0.5) * delta_};
    }

    /// Visit every cell whose center lies within `radius` of `center`, in
    /// row-major order. `fn(flat_index, cell_center)`.
    template <typename Fn>
    void for_each_cell_in_disc(Point center, double radius, Fn&& fn) const
    {
        if (!(radius > 0.0) || size() == 0)
            return;
        const double r2 = radius * radius;
        const auto lo = [&](double v, std::size_t n) -> std::size_t {
            const double k = std::floor((v - radius) / delta_ - 0.5);
            if (k < 0.0) return 0;
            return std::min(static_cast<std::size_t>(k), n);
        };
        const auto hi = [&](double v, std::size_t n) -> std::size_t {
            const double k = std::ceil((v + radius) / delta_ - 0.5) + 1.0;
            if (k < 0.0) return 0;
            return std::min(static_cast<std::size_t>(k), n);
        };
        const std::size_t c0 = lo(center.x, n_cols_), c1 = hi(center.x, n_cols_);
        const std::size_t r0 = lo(center.y, n_rows_), r1 = hi(center.y, n_rows_);
        for (std::size_t row = r0; row < r1; ++row) {
            for (std::size_t col = c0; col < c1; ++col) {
                const Point q = center_unchecked(col, row);
                if (distance_sq(q, center) <= r2)
                    fn(row * n_cols_ + col, q);
            }
        }
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    Region region_;
    double delta_ = 1.0;
    std::size_t n_cols_ = 0;
    std::size_t n_rows_ = 0;
};

inline CellIndex cell_of(const Grid& grid, Point p) { return grid.cell_of(p); }
inline Point cell_center(const Grid& grid, CellIndex c) { return grid.cell_center(c); }

/// Cells treated as intersecting the disc: those whose center is inside it.
inline std::vector<CellIndex> cells_in_disc(const Grid& grid, Point center, double radius)
{
    if (!(radius > 0.0))
        throw std::invalid_argument("disc radius must be positive");
    std::vector<CellIndex> out;
    grid.for_each_cell_in_disc(center, radius, [&](std::size_t i, Point) { out.push_back(grid.unflat(i)); });
    return out;
}

} // namespace evsense
