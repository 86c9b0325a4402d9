#pragma once

#include <cmath>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "evsense/agent.hpp"
#include "evsense/comms.hpp"
#include "evsense/density.hpp"
#include "evsense/params.hpp"
#include "evsense/random.hpp"
#include "evsense/scenario.hpp"
#include "evsense/sensing.hpp"

namespace evsense {

struct Snapshot {
    Tick tick = 0;
    AgentId agent = 0;
    Point pos;
    ExecutionMode mode = ExecutionMode::Random;
};

/// Counters for the structural checks that are run on every simulation.
struct RunDiagnostics {
    std::uint64_t moves = 0;
    std::uint64_t gradient_mode_agent_ticks = 0;
    std::uint64_t occurrence_attempts = 0;
    std::uint64_t footprint_attempts = 0;
    std::uint64_t valid_location_messages = 0;
    std::uint64_t masking_violations = 0;     // recipient still holds a random-mode sender's location
    std::uint64_t collinearity_violations = 0; // forced-walk steps that changed direction
    std::uint64_t forced_steps = 0;
};

class World {
public:
    World(SimParams params, ScenarioSpec spec, std::uint64_t seed)
        : params_(std::move(params)), spec_(std::move(spec)), grid_(spec_.region, params_.cell_size),
          event_rng_(derive_seed(seed, streams::events))
    {
        params_.validate();
        spec_.validate();

        RandomStream placement(derive_seed(seed, streams::placement));
        agents_.resize(params_.n_agents);
        agent_rngs_.reserve(params_.n_agents);
        last_forced_.resize(params_.n_agents);
        for (std::uint32_t i = 0; i < params_.n_agents; ++i) {
            auto& a = agents_[i];
            a.id = i;
            a.pos = {placement.uniform(0.0, spec_.region.width), placement.uniform(0.0, spec_.region.height)};
            a.mode = ExecutionMode::Random;
            a.view = AgentView(grid_, params_.time_window);
            a.detected.assign(spec_.total_events, false);
            a.next_move_tick = params_.phase_offsets
                                   ? static_cast<Tick>(placement.below(static_cast<std::uint64_t>(params_.still_time)))
                                   : 0;
            agent_rngs_.emplace_back(derive_seed(seed, streams::agent_base + i));
        }
        events_.reserve(spec_.total_events);
    }

    const SimParams& params() const noexcept { return params_; }
    const ScenarioSpec& scenario() const noexcept { return spec_; }
    const Grid& grid() const noexcept { return grid_; }
    Tick now() const noexcept { return now_; }
    std::span<const AgentState> agents() const noexcept { return agents_; }
    std::span<AgentState> agents() noexcept { return agents_; }
    std::span<const Event> events() const noexcept { return events_; }
    const RunDiagnostics& diagnostics() const noexcept { return diag_; }
    const std::vector<Snapshot>& snapshots() const noexcept { return snapshots_; }
    void set_snapshot_interval(Tick every) noexcept { snapshot_every_ = every; }

    /// Agents that detected event `e` directly.
    std::vector<AgentId> detected_by(EventId e) const
    {
        std::vector<AgentId> out;
        for (const auto& a : agents_)
            if (a.has_detected(e))
                out.push_back(a.id);
        return out;
    }

    /// Agents that know of event `e` (own detection or a message).
    std::vector<AgentId> noticed_by(EventId e) const
    {
        std::vector<AgentId> out;
        for (const auto& a : agents_)
            if (a.view.knows(e))
                out.push_back(a.id);
        return out;
    }

    /// Advances the world by one tick: new events and their occurrence
    /// detection, footprint expiry, then the moves due at this tick in
    /// ascending agent order (mode, move, footprint detection, message).
    void step()
    {
        const Tick t = now_;
        if (t >= spec_.max_t)
            throw std::logic_error("simulation already finished");

        for (const Event& e : sample_events(spec_, t, event_rng_, next_event_id_)) {
            events_.push_back(e);
            const EventRecord rec = e.record();
            for (std::size_t i = 0; i < agents_.size(); ++i) {
                const double p = detection_prob(agents_[i].pos, e.pos, params_.sensing);
                if (p == 0.0)
                    continue;
                ++diag_.occurrence_attempts;
                if (attempt_detection(agent_rngs_[i], p))
                    agents_[i].record_detection(rec, t);
            }
            if (spec_.vis_time > 0)
                visible_.push_back(events_.size() - 1);
        }

        while (!visible_.empty() && events_[visible_.front()].visible_until < t)
            visible_.pop_front();

        for (std::size_t i = 0; i < agents_.size(); ++i)
            if (agents_[i].next_move_tick == t)
                move_agent(i, t);

        for (const auto& a : agents_)
            if (a.mode == ExecutionMode::Gradient)
                ++diag_.gradient_mode_agent_ticks;

        if (snapshot_every_ > 0 && t % snapshot_every_ == 0)
            for (const auto& a : agents_)
                snapshots_.push_back({t, a.id, a.pos, a.mode});

        ++now_;
    }

    bool finished() const noexcept { return now_ >= spec_.max_t; }

private:
    void move_agent(std::size_t i, Tick t)
    {
        AgentState& a = agents_[i];
        RandomStream& rng = agent_rngs_[i];
        const double rs = params_.sensing.r_s;

        neighbors_.clear();
        for (const auto& [id, report] : a.view.known_locations())
            if (id != a.id && distance_sq(report.pos, a.pos) <= 4.0 * rs * rs)
                neighbors_.push_back(report.pos);

        const WindowDensity& density = a.view.density_at(t);
        const GradientVector g = gradient(a.pos, neighbors_, density, params_.sensing);
        const ModeDecision decision = decide_mode(a, gradient_magnitude(g), params_.switching, rng);
        apply_mode(a, decision, params_.switching, rng);

        const PlannedMove move = plan_move(a, g, params_.step_size, spec_.region, rng, params_.boundary);
        check_forced_walk(i, move);
        a.pos = move.target;
        ++diag_.moves;

        for (std::size_t k : visible_) {
            const Event& e = events_[k];
            if (a.has_detected(e.id))
                continue;
            const double p = detection_prob(a.pos, e.pos, params_.sensing);
            if (p == 0.0)
                continue;
            ++diag_.footprint_attempts;
            if (attempt_detection(rng, p))
                a.record_detection(e.record(), t);
        }

        const Message msg = build_message(a);
        if (msg.location)
            ++diag_.valid_location_messages;
        broadcast(msg, i, agents_, params_.sensing, t);
        if (!msg.location) {
            for (std::size_t r = 0; r < agents_.size(); ++r)
                if (r != i && agents_[r].view.has_seen(msg.origin, msg.seq) &&
                    agents_[r].view.known_locations().contains(a.id))
                    ++diag_.masking_violations;
        }
        a.next_move_tick += params_.still_time;
    }

    void check_forced_walk(std::size_t i, const PlannedMove& move)
    {
        auto& last = last_forced_[i];
        if (!move.forced) {
            last.reset();
            return;
        }
        ++diag_.forced_steps;
        if (last) {
            const double cross = last->x * move.displacement.y - last->y * move.displacement.x;
            const double dot = last->x * move.displacement.x + last->y * move.displacement.y;
            const double scale = std::hypot(last->x, last->y) * std::hypot(move.displacement.x, move.displacement.y);
            if (std::abs(cross) > 1e-9 * scale || dot <= 0.0)
                ++diag_.collinearity_violations;
        }
        last = move.displacement;
    }

    SimParams params_;
    ScenarioSpec spec_;
    Grid grid_;
    RandomStream event_rng_;
    std::vector<AgentState> agents_;
    std::vector<RandomStream> agent_rngs_;
    std::vector<Event> events_;
    std::deque<std::size_t> visible_;
    EventId next_event_id_ = 0;
    Tick now_ = 0;
    Tick snapshot_every_ = 0;
    std::vector<Snapshot> snapshots_;
    RunDiagnostics diag_;
    std::vector<Point> neighbors_;
    std::vector<std::optional<Point>> last_forced_;
};

} // namespace evsense
