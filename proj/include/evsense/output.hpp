#pragma once

// CSV writers. Columns are fixed, decimals use '.', absent values are "NA".
//
//   summary.csv    behavior,seed,global_pct,local_pct
//   window.csv     tick,window_global_pct,window_local_pct
//   snapshots.csv  tick,agent,x,y,mode
//   aggregate.csv  metric,mean,ci95_half_width,replications
//   aggregate_window.csv
//                  tick,global_mean,global_ci95,local_mean,local_ci95,n

#include <charconv>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>

#include "evsense/metrics.hpp"

namespace evsense {

inline std::string fixed(double v, int precision = 6)
{
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, precision);
    if (ec != std::errc())
        return "NA";
    return std::string(buf, end);
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    return out;
}

inline void close_output(std::ofstream& out, const std::filesystem::path& path)
{
    out.close();
    if (!out)
        throw std::runtime_error("error while writing '" + path.string() + "'");
}

} // namespace detail

inline void write_summary_csv(const std::filesystem::path& path, const RunResult& r)
{
    auto out = detail::open_output(path);
    out << "behavior,seed,global_pct,local_pct\n";
    out << to_string(r.behavior) << ',' << std::to_string(r.seed) << ',' << fixed(r.global_fraction) << ','
        << fixed(r.avg_local_fraction) << '\n';
    detail::close_output(out, path);
}

inline void write_window_csv(const std::filesystem::path& path, const RunResult& r)
{
    auto out = detail::open_output(path);
    out << "tick,window_global_pct,window_local_pct\n";
    std::string line;
    for (std::size_t t = 0; t < r.window_series.size(); ++t) {
        line = std::to_string(t);
        if (const auto& w = r.window_series[t]) {
            line += ',' + fixed(w->global) + ',' + fixed(w->local);
        } else {
            line += ",NA,NA";
        }
        out << line << '\n';
    }
    detail::close_output(out, path);
}

inline void write_snapshots_csv(const std::filesystem::path& path, const RunResult& r)
{
    auto out = detail::open_output(path);
    out << "tick,agent,x,y,mode\n";
    for (const auto& s : r.snapshots)
        out << std::to_string(s.tick) << ',' << std::to_string(s.agent) << ',' << fixed(s.pos.x, 4) << ','
            << fixed(s.pos.y, 4) << ',' << to_string(s.mode) << '\n';
    detail::close_output(out, path);
}

inline void write_aggregate_csv(const std::filesystem::path& path, const MeanCI& global, const MeanCI& local)
{
    auto out = detail::open_output(path);
    out << "metric,mean,ci95_half_width,replications\n";
    const auto row = [&](const char* name, const MeanCI& m) {
        out << name << ',' << fixed(m.mean) << ',' << (m.n >= 2 ? fixed(m.half_width) : std::string("NA")) << ','
            << std::to_string(m.n) << '\n';
    };
    row("global_pct", global);
    row("local_pct", local);
    detail::close_output(out, path);
}

inline void write_aggregate_window_csv(const std::filesystem::path& path, const AggregateResult& agg)
{
    auto out = detail::open_output(path);
    out << "tick,global_mean,global_ci95,local_mean,local_ci95,n\n";
    for (std::size_t t = 0; t < agg.window_series.size(); ++t) {
        out << std::to_string(t);
        if (const auto& w = agg.window_series[t]) {
            out << ',' << fixed(w->global.mean) << ',' << fixed(w->global.half_width) << ',' << fixed(w->local.mean)
                << ',' << fixed(w->local.half_width) << ',' << std::to_string(w->global.n) << '\n';
        } else {
            out << ",NA,NA,NA,NA,0\n";
        }
    }
    detail::close_output(out, path);
}

} // namespace evsense
