#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "aentd3/mlp.hpp"
#include "aentd3/rl.hpp"
#include "aentd3/rng.hpp"

namespace aentd3 {

enum class Mode { Centralized, Decentralized };

const char* mode_name(Mode m);
Mode mode_from_name(const std::string& name);

struct Hyperparams {
    double gamma = 0.99;         // discount
    double tau = 0.005;          // soft-update rate
    double explore_sigma = 0.01; // behaviour noise std (collection)
    double target_sigma = 0.01;  // smoothing noise std inside the TD target
    double noise_clip = 0.02;    // clip bound c for the smoothing noise
    int policy_delay = 2;        // d: critic updates per actor/target update
    int batch_size = 256;        // N
    int episodes = 2000;         // M: training episodes per seed
    int horizon = 200;           // T: max steps per episode
    ActionBounds action_bounds;  // componentwise action range
    // When true, critic and actor updates re-estimate the partner action
    // with the current online estimator instead of using the value stored
    // at collection time (ablation; default is the stored, stale value).
    bool recompute_partner_estimate = false;

    void validate() const; // throws ConfigError
};

struct OptimizerSettings {
    double critic_lr = 1e-3;
    double actor_lr = 1e-4;
    double aen_lr = 1e-4;
    // Multiplier on the fan-in bound of every network's final layer at
    // initialization. 1 keeps the plain fan-in scheme; a small value
    // starts policies near the zero action and value estimates near zero
    // (the usual deterministic-policy-gradient head initialization),
    // which matters in environments where a biased initial policy walks
    // straight into a safety abort.
    double head_init_scale = 1.0;
};

// Structural description of one learner. The full state an agent sees is
// its own observation slice followed by the partner's slice, in that
// order. A centralized learner folds everything into the "own" slots
// (partner dims 0) and emits the whole joint action itself. A
// decentralized learner with partner_action_dim > 0 carries a partner
// action estimator; with partner dims 0 it degenerates to plain TD3 on its
// own slice (same update path as centralized).
struct AgentLayout {
    Mode mode = Mode::Decentralized;
    std::size_t own_state_dim = 0;
    std::size_t partner_state_dim = 0;
    std::size_t own_action_dim = 0;
    std::size_t partner_action_dim = 0;
    std::size_t hidden_width = 128;

    std::size_t state_dim() const { return own_state_dim + partner_state_dim; }
    std::size_t critic_input_dim() const {
        return state_dim() + own_action_dim + partner_action_dim;
    }
    void validate() const; // throws ConfigError
};

// Online networks, their target copies, and per-network Adam state. The
// estimator members are empty (no layers) when partner_action_dim == 0.
struct AgentNetworks {
    MlpNetwork critic1, critic2, actor, estimator;
    MlpNetwork target_critic1, target_critic2, target_actor, target_estimator;
    AdamState adam_critic1, adam_critic2, adam_actor, adam_estimator;
};

// Per-element TD targets plus the target actions they were built from
// (both post-clip), kept for inspection by tests.
struct TdTargetDetail {
    std::vector<double> y;                      // N
    std::vector<double> own_target_actions;     // N * own_action_dim
    std::vector<double> partner_target_actions; // N * partner_action_dim
    std::vector<double> q1, q2;                 // target critic values, N each
};

struct CriticLosses {
    double critic1 = 0.0;
    double critic2 = 0.0;
};

// One TD3 / AEN-TD3 learner. Construction draws network parameters from
// `rng` in a fixed order: critic 1, critic 2, actor, then the partner
// estimator when present; targets start as exact copies of their online
// networks. All methods are single-threaded.
class Agent {
public:
    Agent(const AgentLayout& layout, const ActionBounds& bounds,
          const OptimizerSettings& opt, Rng& rng);

    const AgentLayout& layout() const { return layout_; }
    const ActionBounds& bounds() const { return bounds_; }
    bool has_estimator() const { return layout_.partner_action_dim > 0; }
    std::uint64_t train_step_count() const { return train_steps_; }

    AgentNetworks& nets() { return nets_; }
    const AgentNetworks& nets() const { return nets_; }
    void set_train_step_count(std::uint64_t n) { train_steps_ = n; }

    // clip(actor(own_state) + eps), eps ~ N(0, sigma^2) per component. One
    // gaussian per component is drawn in component order even when sigma
    // is 0, so the draw count never depends on sigma.
    std::vector<double> select_action(std::span<const double> own_state,
                                      double sigma, Rng& rng) const;

    // Deterministic policy output, clipped to bounds; consumes no draws.
    std::vector<double> policy_action(std::span<const double> own_state) const;

    // Partner action estimate from the online estimator. The Tanh head
    // keeps the output inside the action bounds. ModeError when the agent
    // has no estimator (centralized, or partner dims 0).
    std::vector<double>
    estimate_partner_action(std::span<const double> partner_state) const;

    // y_n = r_n + gamma * min_j targetQ_j(s', a~, a^), stopping at r_n on
    // terminal transitions. a~ = clip(target_actor(s'_own) + noise) with
    // clipped gaussian smoothing noise (target_sigma, noise_clip); a^ =
    // clip(target_estimator(s'_partner)). Noise is drawn for every batch
    // element in order, terminal or not: 2 * own_action_dim uniforms each.
    TdTargetDetail compute_td_target(const std::vector<Transition>& batch,
                                     const Hyperparams& hp, Rng& rng) const;

    // One Adam step on each critic against the shared targets y, loss
    // (1/N) sum (Q - y)^2. Touches nothing but the two critics and their
    // Adam states. Returns both losses.
    CriticLosses critic_update(const std::vector<Transition>& batch,
                               std::span<const double> y,
                               const Hyperparams& hp);

    // Gradient ascent on (1/N) sum Q1(s, actor(s_own), partner_estimate)
    // through critic 1 into the actor only.
    void actor_update(const std::vector<Transition>& batch,
                      const Hyperparams& hp);

    // Gradient ascent on (1/N) sum Q1(s, a_own, estimator(s_partner))
    // through critic 1 into the estimator only.
    void aen_update(const std::vector<Transition>& batch);

    // One full update: sample batch_size transitions, fit critics to the
    // TD targets; when step_index (1-based) is divisible by policy_delay,
    // also update actor (and estimator when present) and soft-update every
    // target (critic 1, critic 2, actor, estimator order).
    void train_step(const ReplayBuffer& buffer, const Hyperparams& hp,
                    std::uint64_t step_index, Rng& rng);

private:
    AgentLayout layout_;
    ActionBounds bounds_;
    OptimizerSettings opt_;
    AgentNetworks nets_;
    std::uint64_t train_steps_ = 0;

    void check_batch(const std::vector<Transition>& batch) const;
    // Fills `x` with [state, own_action, partner_estimate] for sample t.
    void build_critic_input(const Transition& t,
                            std::span<const double> partner_estimate,
                            std::vector<double>& x) const;
    // Stored estimate, or a fresh one when hp.recompute_partner_estimate.
    std::vector<double> update_time_estimate(const Transition& t,
                                             const Hyperparams& hp,
                                             Workspace& ws) const;
};

// The single-learner baseline step: identical to train_step on an agent
// whose layout folds the full state and joint action into the own slots.
// Throws ModeError if the agent is not centralized.
void centralized_td3_step(Agent& agent, const ReplayBuffer& buffer,
                          const Hyperparams& hp, std::uint64_t step_index,
                          Rng& rng);

} // namespace aentd3
