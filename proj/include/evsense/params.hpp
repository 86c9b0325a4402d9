#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include "evsense/agent.hpp"
#include "evsense/sensing.hpp"
#include "evsense/types.hpp"

namespace evsense {

enum class Behavior { Random, Mixed, Gradient, Custom };

inline std::string_view to_string(Behavior b) noexcept
{
    switch (b) {
    case Behavior::Random: return "random";
    case Behavior::Mixed: return "mixed";
    case Behavior::Gradient: return "gradient";
    case Behavior::Custom: return "custom";
    }
    return "custom";
}

inline Behavior parse_behavior(std::string_view s)
{
    if (s == "random") return Behavior::Random;
    if (s == "mixed") return Behavior::Mixed;
    if (s == "gradient") return Behavior::Gradient;
    if (s == "custom") return Behavior::Custom;
    throw std::invalid_argument("unknown behavior '" + std::string(s) + "'");
}

inline std::string_view to_string(BoundaryMode b) noexcept
{
    return b == BoundaryMode::Clamp ? "clamp" : "reflect";
}

inline BoundaryMode parse_boundary(std::string_view s)
{
    if (s == "clamp") return BoundaryMode::Clamp;
    if (s == "reflect") return BoundaryMode::Reflect;
    throw std::invalid_argument("unknown boundary mode '" + std::string(s) + "'");
}

/// Agent and sensing parameters of one simulation. Timing of the event
/// field (max_t, VisTime) lives in ScenarioSpec.
struct SimParams {
    std::uint32_t n_agents = 30;
    Tick still_time = 10;
    double step_size = 30.0;
    Tick time_window = 1000;
    SwitchParams switching;
    SensingParams sensing;
    double cell_size = 10.0;
    Tick metric_window = 900;
    BoundaryMode boundary = BoundaryMode::Clamp;
    bool phase_offsets = true; // false: every agent moves at ticks 0, StillTime, ...
    Behavior behavior = Behavior::Custom;

    void validate() const
    {
        if (n_agents == 0)
            throw std::invalid_argument("n_agents must be positive");
        if (still_time <= 0)
            throw std::invalid_argument("still_time must be positive");
        if (!(step_size > 0.0))
            throw std::invalid_argument("step_size must be positive");
        if (time_window <= 0)
            throw std::invalid_argument("time_window must be positive");
        if (!(sensing.r_s > 0.0) || !(sensing.r_c > 0.0))
            throw std::invalid_argument("sensing and communication ranges must be positive");
        if (!(cell_size > 0.0))
            throw std::invalid_argument("cell_size must be positive");
        if (metric_window <= 0)
            throw std::invalid_argument("metric_window must be positive");
        switching.validate();
    }

    friend bool operator==(const SimParams&, const SimParams&) = default;
};

} // namespace evsense
