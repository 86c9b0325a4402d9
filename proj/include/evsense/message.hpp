#pragma once

#include <optional>
#include <vector>

#include "evsense/types.hpp"

namespace evsense {

/// One flooded report. `location` is empty when the sender is in random
/// mode: receivers must not use such positions for gradient computation.
struct Message {
    AgentId origin = 0;
    SeqNo seq = 0;
    std::optional<Point> location;
    std::vector<EventRecord> events;
};

} // namespace evsense
