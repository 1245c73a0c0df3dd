#include "aentd3/lift_env.hpp"

#include <algorithm>
#include <cmath>

namespace aentd3 {
namespace {

double clamp_to(double v, const Interval& iv) {
    return std::clamp(v, iv.lo, iv.hi);
}

void check_component(double a, const ActionBounds& b, const char* who) {
    if (!(a >= b.low && a <= b.high))
        throw ShapeError(std::string(who) +
                         ": action component outside bounds (caller must clip)");
}

} // namespace

void EnvConfig::validate() const {
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(safety_delta > 0)) throw ConfigError("safety_delta must be positive");
    if (!(initial_separation > 0))
        throw ConfigError("initial_separation must be positive");
    if (!(action_bounds.low < action_bounds.high))
        throw ConfigError("action bounds must satisfy low < high");
    if (!(workspace_x.lo < workspace_x.hi) || !(workspace_z.lo < workspace_z.hi))
        throw ConfigError("workspace intervals must be non-empty");
    if (!(tilt_weight >= 0)) throw ConfigError("tilt_weight must be >= 0");
    if (!(reset_noise >= 0)) throw ConfigError("reset_noise must be >= 0");

    const double half = 0.5 * initial_separation;
    if (-half < workspace_x.lo || half > workspace_x.hi)
        throw ConfigError("initial effector positions fall outside workspace_x");
    if (start_height < workspace_z.lo || start_height > workspace_z.hi)
        throw ConfigError("start_height outside workspace_z");
    if (target_height < workspace_z.lo || target_height > workspace_z.hi)
        throw ConfigError("target_height outside workspace_z");

    // The separation must stay strictly positive over any legal episode so
    // the tilt angle is always defined: even from the most adverse reset
    // (noise shrinks the gap by up to 2 * reset_noise), one final in-bounds
    // move past an exhausted safety margin cannot close the gap.
    const double worst_step =
        std::max(std::abs(action_bounds.low), std::abs(action_bounds.high));
    const double min_gap = initial_separation - 2.0 * reset_noise -
                           safety_delta - 2.0 * worst_step;
    if (!(min_gap > 0))
        throw ConfigError("initial_separation too small for safety_delta, "
                          "reset_noise and action bounds (separation could "
                          "reach zero)");
}

const char* done_reason_name(DoneReason r) {
    switch (r) {
        case DoneReason::Running: return "running";
        case DoneReason::HorizonReached: return "horizon_reached";
        case DoneReason::SafetyTermination: return "safety_termination";
    }
    return "running";
}

EnvState reset(const EnvConfig& cfg, Rng& rng) {
    cfg.validate();
    EnvState s;
    const double half = 0.5 * cfg.initial_separation;
    s.x1 = -half;
    s.z1 = cfg.start_height;
    s.x2 = half;
    s.z2 = cfg.start_height;
    if (cfg.reset_noise > 0) {
        s.x1 += rng.uniform(-cfg.reset_noise, cfg.reset_noise);
        s.z1 += rng.uniform(-cfg.reset_noise, cfg.reset_noise);
        s.x2 += rng.uniform(-cfg.reset_noise, cfg.reset_noise);
        s.z2 += rng.uniform(-cfg.reset_noise, cfg.reset_noise);
        s.x1 = clamp_to(s.x1, cfg.workspace_x);
        s.x2 = clamp_to(s.x2, cfg.workspace_x);
        s.z1 = clamp_to(s.z1, cfg.workspace_z);
        s.z2 = clamp_to(s.z2, cfg.workspace_z);
    }
    s.initial_separation = s.separation();
    s.step_count = 0;
    s.done_reason = DoneReason::Running;
    return s;
}

double reward_fn(const EnvState& s, const EnvConfig& cfg) {
    return s.beam_height() - cfg.tilt_weight * std::abs(s.beam_tilt());
}

StepResult step(const EnvState& s, std::span<const double> a1,
                std::span<const double> a2, const EnvConfig& cfg) {
    if (s.done()) throw StateError("step called on a finished episode");
    if (a1.size() != 2 || a2.size() != 2)
        throw ShapeError("step: each agent action must have dim 2");
    check_component(a1[0], cfg.action_bounds, "agent 1 dx");
    check_component(a1[1], cfg.action_bounds, "agent 1 dz");
    check_component(a2[0], cfg.action_bounds, "agent 2 dx");
    check_component(a2[1], cfg.action_bounds, "agent 2 dz");

    StepResult r;
    r.next_state = s;
    EnvState& n = r.next_state;
    n.x1 = clamp_to(s.x1 + a1[0], cfg.workspace_x);
    n.z1 = clamp_to(s.z1 + a1[1], cfg.workspace_z);
    n.x2 = clamp_to(s.x2 + a2[0], cfg.workspace_x);
    n.z2 = clamp_to(s.z2 + a2[1], cfg.workspace_z);
    n.step_count = s.step_count + 1;

    r.reward = reward_fn(n, cfg);

    if (std::abs(n.separation() - s.initial_separation) > cfg.safety_delta)
        n.done_reason = DoneReason::SafetyTermination;
    else if (n.step_count >= cfg.horizon)
        n.done_reason = DoneReason::HorizonReached;
    else
        n.done_reason = DoneReason::Running;

    r.done = n.done();
    r.done_reason = n.done_reason;
    return r;
}

std::array<double, 2> scripted_partner(const EnvState& s, const EnvConfig& cfg) {
    if (s.beam_height() < cfg.target_height)
        return {0.0, cfg.action_bounds.high};
    return {0.0, 0.0};
}

std::vector<double> state_vector(const EnvState& s) {
    return {s.x1, s.z1, s.x2, s.z2};
}

StatePartition state_partition(const EnvState& s, int agent_index) {
    if (agent_index == 1) return {{s.x1, s.z1}, {s.x2, s.z2}};
    if (agent_index == 2) return {{s.x2, s.z2}, {s.x1, s.z1}};
    throw ShapeError("agent_index must be 1 or 2");
}

} // namespace aentd3
