#pragma once

#include <cstdint>

#include "evsense/geometry.hpp"

namespace evsense {

/// Simulation clock. One tick is one time unit of the model.
using Tick = std::int64_t;
using AgentId = std::uint32_t;
using EventId = std::uint64_t;
using SeqNo = std::uint64_t;

/// What an agent knows about one event: where and when it happened.
struct EventRecord {
    EventId id = 0;
    Point pos;
    Tick tick = 0;

    friend bool operator==(const EventRecord&, const EventRecord&) = default;
};

} // namespace evsense
