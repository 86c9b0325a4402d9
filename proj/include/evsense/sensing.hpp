#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

#include "evsense/geometry.hpp"
#include "evsense/random.hpp"

namespace evsense {

struct SensingParams {
    double r_s = 100.0; // maximum sensing range
    double r_c = 200.0; // maximum communication range

    friend bool operator==(const SensingParams&, const SensingParams&) = default;
};

/// Probability that an agent at `agent_pos` detects an event at `q`:
/// (1 - d/R_s)^2 inside the sensing disc, 0 outside.
inline double detection_prob(Point agent_pos, Point q, const SensingParams& params) noexcept
{
    const double d = distance(agent_pos, q);
    if (d > params.r_s)
        return 0.0;
    const double u = 1.0 - d / params.r_s;
    return u * u;
}

/// Boolean-model link: lossless delivery iff d <= R_c.
inline bool can_communicate(Point a, Point b, const SensingParams& params) noexcept
{
    return distance(a, b) <= params.r_c;
}

/// Probability that at least one of the agents detects an event at `q`.
inline double joint_detection_prob(std::span<const Point> agent_positions, Point q,
                                   const SensingParams& params) noexcept
{
    double miss = 1.0;
    for (const Point& s : agent_positions)
        miss *= 1.0 - detection_prob(s, q, params);
    return 1.0 - miss;
}

/// One Bernoulli(p) trial. Always consumes exactly one draw.
inline bool attempt_detection(RandomStream& rng, double p)
{
    if (!(p >= 0.0 && p <= 1.0))
        throw std::domain_error("detection probability outside [0, 1]");
    return rng.uniform01() < p;
}

} // namespace evsense
