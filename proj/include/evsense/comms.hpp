#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "evsense/agent.hpp"
#include "evsense/message.hpp"
#include "evsense/sensing.hpp"

namespace evsense {

/// Agents connected to `origin_index` in the Boolean-model graph (edge iff
/// distance <= R_c), excluding the origin. Sorted ascending.
inline std::vector<std::size_t> reachable_set(std::size_t origin_index, std::span<const Point> positions,
                                              const SensingParams& params)
{
    const std::size_t n = positions.size();
    std::vector<char> visited(n, 0);
    std::vector<std::size_t> frontier{origin_index};
    visited[origin_index] = 1;
    const double rc2 = params.r_c * params.r_c;
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const Point u = positions[frontier[head]];
        for (std::size_t v = 0; v < n; ++v) {
            if (!visited[v] && distance_sq(u, positions[v]) <= rc2) {
                visited[v] = 1;
                frontier.push_back(v);
            }
        }
    }
    std::vector<std::size_t> out;
    out.reserve(frontier.size() - 1);
    for (std::size_t v = 0; v < n; ++v)
        if (visited[v] && v != origin_index)
            out.push_back(v);
    return out;
}

struct Delivery {
    std::size_t recipient = 0;
    bool first_time = false;
};

using DeliveryReport = std::vector<Delivery>;

/// Floods `msg` from `sender_index`. Delivery is instantaneous, so
/// hop-by-hop forwarding with duplicate suppression reaches exactly the
/// sender's connected component; each member integrates the message once,
/// in ascending index order.
inline DeliveryReport broadcast(const Message& msg, std::size_t sender_index, std::span<AgentState> agents,
                                const SensingParams& params, Tick now)
{
    thread_local std::vector<Point> positions;
    positions.clear();
    positions.reserve(agents.size());
    for (const auto& a : agents)
        positions.push_back(a.pos);

    DeliveryReport report;
    for (std::size_t r : reachable_set(sender_index, positions, params))
        report.push_back({r, integrate_message(agents[r].view, msg, now)});
    return report;
}

} // namespace evsense
