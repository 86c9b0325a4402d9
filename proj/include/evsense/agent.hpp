#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "evsense/density.hpp"
#include "evsense/geometry.hpp"
#include "evsense/message.hpp"
#include "evsense/random.hpp"
#include "evsense/types.hpp"

namespace evsense {

enum class ExecutionMode { Random, Gradient };

inline std::string_view to_string(ExecutionMode m) noexcept
{
    return m == ExecutionMode::Random ? "random" : "gradient";
}

/// Mode switching thresholds. Thresholds may be +inf.
struct SwitchParams {
    double r_to_g_min_grad = 0.01;
    double g_to_r_max_grad = 1e-5;
    double g_to_r_prob = 0.0;
    std::uint32_t g_to_r_first_steps = 0;

    void validate() const
    {
        if (!(r_to_g_min_grad >= 0.0) || !(g_to_r_max_grad >= 0.0))
            throw std::invalid_argument("switch thresholds must be nonnegative");
        if (!(g_to_r_prob >= 0.0 && g_to_r_prob <= 1.0))
            throw std::invalid_argument("GtoRProb must lie in [0, 1]");
    }

    friend bool operator==(const SwitchParams&, const SwitchParams&) = default;
};

enum class BoundaryMode { Clamp, Reflect };

struct LocationReport {
    Point pos;
    Tick reported_at = 0;
};

/// Everything an agent has learned: events (deduplicated by id, with a
/// sliding-window density over them), the last valid location of each
/// other agent, and the messages already seen.
class AgentView {
public:
    AgentView() = default;
    AgentView(const Grid& grid, Tick time_window) : density_(grid, time_window) {}

    bool knows(EventId id) const noexcept { return id < known_.size() && known_[id]; }
    std::size_t known_event_count() const noexcept { return known_count_; }

    /// Records an event; returns false if it was already known.
    bool add_event(const EventRecord& e, Tick now)
    {
        if (knows(e.id))
            return false;
        if (e.id >= known_.size())
            known_.resize(std::max<std::size_t>(e.id + 1, known_.size() * 2), false);
        known_[e.id] = true;
        ++known_count_;
        density_.advance(now);
        density_.add(e.pos, e.tick);
        return true;
    }

    /// Marks (origin, seq) as seen; returns false if it had been seen before.
    bool mark_seen(AgentId origin, SeqNo seq)
    {
        auto& bits = seen_[origin];
        if (seq >= bits.size())
            bits.resize(std::max<std::size_t>(seq + 1, bits.size() * 2), false);
        if (bits[seq])
            return false;
        bits[seq] = true;
        return true;
    }

    bool has_seen(AgentId origin, SeqNo seq) const
    {
        auto it = seen_.find(origin);
        return it != seen_.end() && seq < it->second.size() && it->second[seq];
    }

    void set_location(AgentId id, Point p, Tick t) { locations_[id] = {p, t}; }
    void clear_location(AgentId id) { locations_.erase(id); }
    const std::map<AgentId, LocationReport>& known_locations() const noexcept { return locations_; }

    /// Density estimate over [now - TimeWindow, now].
    const WindowDensity& density_at(Tick now)
    {
        density_.advance(now);
        return density_;
    }

private:
    std::vector<bool> known_;
    std::size_t known_count_ = 0;
    WindowDensity density_;
    std::map<AgentId, LocationReport> locations_;
    std::unordered_map<AgentId, std::vector<bool>> seen_;
};

struct AgentState {
    AgentId id = 0;
    Point pos;
    ExecutionMode mode = ExecutionMode::Random;
    AgentView view;
    std::vector<EventRecord> sensed_buffer; // sensed since the last move
    std::vector<bool> detected;             // event ids this agent detected itself
    Tick next_move_tick = 0;
    std::uint32_t forced_steps_left = 0;
    double forced_direction = 0.0; // radians
    SeqNo seq = 0;

    bool has_detected(EventId id) const noexcept { return id < detected.size() && detected[id]; }

    /// Records a direct detection; the event is also noticed and queued for
    /// the next message. Returns false if already detected.
    bool record_detection(const EventRecord& e, Tick now)
    {
        if (has_detected(e.id))
            return false;
        if (e.id >= detected.size())
            detected.resize(std::max<std::size_t>(e.id + 1, detected.size() * 2), false);
        detected[e.id] = true;
        view.add_event(e, now);
        sensed_buffer.push_back(e);
        return true;
    }
};

struct ModeDecision {
    ExecutionMode mode = ExecutionMode::Random;
    bool start_forced_walk = false;
};

/// Mode for the move the agent is about to make. Threshold rules are
/// applied first; the GtoRProb escape only applies to an agent that stays
/// in gradient mode after them. An agent still on a forced walk stays in
/// random mode until the walk is over.
inline ModeDecision decide_mode(const AgentState& state, double grad_mag, const SwitchParams& params,
                                RandomStream& rng)
{
    if (!(grad_mag >= 0.0))
        throw std::invalid_argument("gradient magnitude must be nonnegative");
    if (state.mode == ExecutionMode::Random) {
        if (state.forced_steps_left == 0 && grad_mag > params.r_to_g_min_grad)
            return {ExecutionMode::Gradient, false};
        return {ExecutionMode::Random, false};
    }
    if (grad_mag < params.g_to_r_max_grad)
        return {ExecutionMode::Random, false};
    if (rng.uniform01() < params.g_to_r_prob)
        return {ExecutionMode::Random, true};
    return {ExecutionMode::Gradient, false};
}

inline void apply_mode(AgentState& state, const ModeDecision& decision, const SwitchParams& params,
                       RandomStream& rng)
{
    state.mode = decision.mode;
    if (decision.mode == ExecutionMode::Gradient) {
        state.forced_steps_left = 0;
    } else if (decision.start_forced_walk && params.g_to_r_first_steps > 0) {
        state.forced_steps_left = params.g_to_r_first_steps;
        state.forced_direction = rng.angle();
    }
}

struct PlannedMove {
    Point target;       // after boundary handling
    Point displacement; // before boundary handling
    bool forced = false;
};

/// Computes the next position and consumes one forced-walk step if any.
inline PlannedMove plan_move(AgentState& state, GradientVector grad, double step_size, const Region& region,
                             RandomStream& rng, BoundaryMode boundary = BoundaryMode::Clamp)
{
    PlannedMove move;
    if (state.mode == ExecutionMode::Gradient) {
        move.displacement = {step_size * grad.gx, step_size * grad.gy};
    } else {
        double theta;
        if (state.forced_steps_left > 0) {
            theta = state.forced_direction;
            --state.forced_steps_left;
            move.forced = true;
        } else {
            theta = rng.angle();
        }
        move.displacement = {step_size * std::cos(theta), step_size * std::sin(theta)};
    }
    const Point raw{state.pos.x + move.displacement.x, state.pos.y + move.displacement.y};
    move.target = boundary == BoundaryMode::Clamp ? region.clamp(raw) : region.reflect(raw);
    return move;
}

inline Point next_position(AgentState& state, GradientVector grad, double step_size, const Region& region,
                           RandomStream& rng, BoundaryMode boundary = BoundaryMode::Clamp)
{
    return plan_move(state, grad, step_size, region, rng, boundary).target;
}

/// Drains the sensed buffer into a new message. Random-mode agents send no
/// location.
inline Message build_message(AgentState& state)
{
    Message msg;
    msg.origin = state.id;
    msg.seq = state.seq++;
    if (state.mode == ExecutionMode::Gradient)
        msg.location = state.pos;
    msg.events = std::move(state.sensed_buffer);
    state.sensed_buffer.clear();
    return msg;
}

/// Applies a message to a view. Returns true when this is the first receipt
/// of (origin, seq), i.e. when it must be passed on.
inline bool integrate_message(AgentView& view, const Message& msg, Tick now)
{
    if (!view.mark_seen(msg.origin, msg.seq))
        return false;
    for (const auto& e : msg.events)
        view.add_event(e, now);
    if (msg.location)
        view.set_location(msg.origin, *msg.location, now);
    else
        view.clear_location(msg.origin);
    return true;
}

} // namespace evsense
