#pragma once

#include <array>
#include <span>
#include <vector>

#include "aentd3/errors.hpp"
#include "aentd3/rl.hpp"
#include "aentd3/rng.hpp"

namespace aentd3 {

// Kinematic two-effector beam lift in the x-z plane. Two agents each move
// one end of a rigid beam by commanding per-step displacements; the team is
// rewarded for raising the beam while keeping it level, and the episode
// aborts if the horizontal separation of the effectors drifts from its
// initial value by more than `safety_delta` (the beam would be dropped or
// crushed). Purely kinematic: commands move effectors directly, no forces.

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

struct EnvConfig {
    int horizon = 200;                  // max steps per episode
    double safety_delta = 0.02;         // allowed |separation - initial|
    double initial_separation = 0.4;    // nominal grip width at reset
    double start_height = 0.5;          // both effectors start here
    double target_height = 1.4;         // height the scripted partner seeks
    ActionBounds action_bounds;         // per-component displacement limits
    Interval workspace_x{-0.7, 0.7};
    Interval workspace_z{0.0, 1.5};
    double tilt_weight = 1.0;           // reward weight on the tilt penalty
    double reset_noise = 0.0;           // uniform +-noise on reset positions

    void validate() const; // throws ConfigError
};

enum class DoneReason { Running, HorizonReached, SafetyTermination };

const char* done_reason_name(DoneReason r);

// Effector 1 is the left end (agent 1), effector 2 the right end (agent 2).
struct EnvState {
    double x1 = 0, z1 = 0, x2 = 0, z2 = 0;
    // Separation measured at reset; the safety rule compares against this
    // actual value, not the configured nominal one.
    double initial_separation = 0.0;
    int step_count = 0;
    DoneReason done_reason = DoneReason::Running;

    double separation() const { return x2 - x1; }
    double beam_height() const { return 0.5 * (z1 + z2); }
    double beam_tilt() const { return std::atan((z1 - z2) / (x2 - x1)); }
    bool done() const { return done_reason != DoneReason::Running; }
    bool terminated_early() const {
        return done_reason == DoneReason::SafetyTermination;
    }
};

struct StepResult {
    EnvState next_state;
    double reward = 0.0;
    bool done = false;
    DoneReason done_reason = DoneReason::Running;
};

// Place both effectors at start height, separated by initial_separation and
// centred on x = 0. With reset_noise > 0, each coordinate is offset by an
// independent uniform draw from [-reset_noise, reset_noise] (order x1, z1,
// x2, z2; no draws when reset_noise == 0) and clamped to the workspace.
EnvState reset(const EnvConfig& cfg, Rng& rng);

// Advance one step. `a1`/`a2` are the per-effector displacements (dim 2:
// dx, dz), already within action bounds — out-of-bounds input is the
// caller's bug and throws ShapeError. Position updates clamp to the
// workspace. The safety rule is evaluated on the post-move state and takes
// precedence over horizon expiry when both trigger at the same step.
// Stepping a finished episode throws StateError.
StepResult step(const EnvState& s, std::span<const double> a1,
                std::span<const double> a2, const EnvConfig& cfg);

// beam_height + tilt_weight * (-|beam_tilt|), evaluated on `s`.
double reward_fn(const EnvState& s, const EnvConfig& cfg);

// Deterministic lift-only partner for effector 2: (0, +action_bounds.high)
// while the beam centre is below target_height, (0, 0) once at or above.
std::array<double, 2> scripted_partner(const EnvState& s, const EnvConfig& cfg);

// Full state as a flat vector, [x1, z1, x2, z2].
std::vector<double> state_vector(const EnvState& s);

// Per-agent view: the agent's own effector (x, z) and the partner's
// effector (x, z). agent_index is 1-based (1 = left, 2 = right).
struct StatePartition {
    std::vector<double> own;
    std::vector<double> partner;
};
StatePartition state_partition(const EnvState& s, int agent_index);

} // namespace aentd3
