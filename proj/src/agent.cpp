#include "aentd3/agent.hpp"

#include <algorithm>
#include <cmath>

namespace aentd3 {
namespace {

void accumulate(ParamGrads& acc, const ParamGrads& sample) {
    for (std::size_t i = 0; i < acc.data.size(); ++i)
        acc.data[i] += sample.data[i];
}

std::span<const double> own_slice(const std::vector<double>& state,
                                  const AgentLayout& layout) {
    return {state.data(), layout.own_state_dim};
}

std::span<const double> partner_slice(const std::vector<double>& state,
                                      const AgentLayout& layout) {
    return {state.data() + layout.own_state_dim, layout.partner_state_dim};
}

} // namespace

const char* mode_name(Mode m) {
    return m == Mode::Centralized ? "centralized" : "decentralized";
}

Mode mode_from_name(const std::string& name) {
    if (name == "centralized") return Mode::Centralized;
    if (name == "decentralized") return Mode::Decentralized;
    throw ConfigError("unknown mode: " + name);
}

void Hyperparams::validate() const {
    if (!(gamma > 0.0 && gamma < 1.0))
        throw ConfigError("gamma must be in (0, 1)");
    if (!(tau > 0.0 && tau < 1.0)) throw ConfigError("tau must be in (0, 1)");
    if (!(explore_sigma >= 0.0)) throw ConfigError("explore_sigma must be >= 0");
    if (!(target_sigma >= 0.0)) throw ConfigError("target_sigma must be >= 0");
    if (!(noise_clip > 0.0)) throw ConfigError("noise_clip must be positive");
    if (policy_delay < 1) throw ConfigError("policy_delay must be >= 1");
    if (batch_size < 1) throw ConfigError("batch_size must be >= 1");
    if (episodes < 1) throw ConfigError("episodes must be >= 1");
    if (horizon < 1) throw ConfigError("horizon must be >= 1");
    if (!(action_bounds.low < action_bounds.high))
        throw ConfigError("action bounds must satisfy low < high");
}

void AgentLayout::validate() const {
    if (own_state_dim == 0) throw ConfigError("own_state_dim must be positive");
    if (own_action_dim == 0)
        throw ConfigError("own_action_dim must be positive");
    if (hidden_width == 0) throw ConfigError("hidden_width must be positive");
    if (mode == Mode::Centralized &&
        (partner_state_dim != 0 || partner_action_dim != 0))
        throw ConfigError("centralized layout folds everything into the own "
                          "slots; partner dims must be 0");
    if (partner_action_dim > 0 && partner_state_dim == 0)
        throw ConfigError("partner action estimation requires a partner "
                          "state slice");
}

Agent::Agent(const AgentLayout& layout, const ActionBounds& bounds,
             const OptimizerSettings& opt, Rng& rng)
    : layout_(layout), bounds_(bounds), opt_(opt) {
    layout_.validate();
    if (!(bounds.low < bounds.high))
        throw ConfigError("action bounds must satisfy low < high");
    if (!(opt.critic_lr > 0.0 && opt.actor_lr > 0.0 && opt.aen_lr > 0.0))
        throw ConfigError("learning rates must be positive");
    if (!(opt.head_init_scale > 0.0))
        throw ConfigError("head_init_scale must be positive");

    // Rescales the final layer's weights post-draw; equivalent to drawing
    // them from the fan-in range shrunk by head_init_scale (biases are
    // zero already). A scale of exactly 1 is a bitwise no-op.
    const auto scale_head = [&opt](MlpNetwork& net) {
        for (double& w : net.layers.back().weights)
            w *= opt.head_init_scale;
    };

    const std::size_t W = layout_.hidden_width;
    const double head_scale =
        std::max(std::abs(bounds.low), std::abs(bounds.high));

    const std::vector<LayerSpec> critic_specs{
        {layout_.critic_input_dim(), W, Activation::ReLU},
        {W, W, Activation::ReLU},
        {W, 1, Activation::Identity}};
    const std::vector<LayerSpec> actor_specs{
        {layout_.own_state_dim, W, Activation::ReLU},
        {W, W, Activation::ReLU},
        {W, layout_.own_action_dim, Activation::Tanh}};

    nets_.critic1 = init_network(critic_specs, 0.0, rng);
    nets_.critic2 = init_network(critic_specs, 0.0, rng);
    nets_.actor = init_network(actor_specs, head_scale, rng);
    if (has_estimator()) {
        const std::vector<LayerSpec> estimator_specs{
            {layout_.partner_state_dim, W, Activation::ReLU},
            {W, W, Activation::ReLU},
            {W, layout_.partner_action_dim, Activation::Tanh}};
        nets_.estimator = init_network(estimator_specs, head_scale, rng);
    }
    scale_head(nets_.critic1);
    scale_head(nets_.critic2);
    scale_head(nets_.actor);
    if (has_estimator()) scale_head(nets_.estimator);

    nets_.target_critic1 = nets_.critic1;
    nets_.target_critic2 = nets_.critic2;
    nets_.target_actor = nets_.actor;
    nets_.target_estimator = nets_.estimator;

    nets_.adam_critic1 = make_adam(nets_.critic1, opt.critic_lr);
    nets_.adam_critic2 = make_adam(nets_.critic2, opt.critic_lr);
    nets_.adam_actor = make_adam(nets_.actor, opt.actor_lr);
    if (has_estimator())
        nets_.adam_estimator = make_adam(nets_.estimator, opt.aen_lr);
}

std::vector<double> Agent::select_action(std::span<const double> own_state,
                                         double sigma, Rng& rng) const {
    if (own_state.size() != layout_.own_state_dim)
        throw ShapeError("select_action: own_state dim mismatch");
    std::vector<double> a = nets_.actor.forward(own_state);
    for (double& c : a)
        c = std::clamp(c + rng.gaussian(sigma), bounds_.low, bounds_.high);
    return a;
}

std::vector<double>
Agent::policy_action(std::span<const double> own_state) const {
    if (own_state.size() != layout_.own_state_dim)
        throw ShapeError("policy_action: own_state dim mismatch");
    std::vector<double> a = nets_.actor.forward(own_state);
    for (double& c : a) c = std::clamp(c, bounds_.low, bounds_.high);
    return a;
}

std::vector<double>
Agent::estimate_partner_action(std::span<const double> partner_state) const {
    if (!has_estimator())
        throw ModeError("estimate_partner_action: this agent has no partner "
                        "action estimator");
    if (partner_state.size() != layout_.partner_state_dim)
        throw ShapeError("estimate_partner_action: partner_state dim mismatch");
    return nets_.estimator.forward(partner_state);
}

void Agent::check_batch(const std::vector<Transition>& batch) const {
    if (batch.empty()) throw ShapeError("empty batch");
    for (const Transition& t : batch) {
        if (t.state.size() != layout_.state_dim() ||
            t.next_state.size() != layout_.state_dim())
            throw ShapeError("batch state dim mismatch");
        if (t.own_action.size() != layout_.own_action_dim)
            throw ShapeError("batch own_action dim mismatch");
        if (t.partner_estimate.size() != layout_.partner_action_dim)
            throw ShapeError("batch partner_estimate dim mismatch");
    }
}

void Agent::build_critic_input(const Transition& t,
                               std::span<const double> partner_estimate,
                               std::vector<double>& x) const {
    x.clear();
    x.insert(x.end(), t.state.begin(), t.state.end());
    x.insert(x.end(), t.own_action.begin(), t.own_action.end());
    x.insert(x.end(), partner_estimate.begin(), partner_estimate.end());
}

std::vector<double> Agent::update_time_estimate(const Transition& t,
                                                const Hyperparams& hp,
                                                Workspace& ws) const {
    if (!has_estimator() || !hp.recompute_partner_estimate)
        return t.partner_estimate;
    auto out = nets_.estimator.forward_into(partner_slice(t.state, layout_), ws);
    return {out.begin(), out.end()};
}

TdTargetDetail Agent::compute_td_target(const std::vector<Transition>& batch,
                                        const Hyperparams& hp,
                                        Rng& rng) const {
    hp.validate();
    check_batch(batch);
    const std::size_t N = batch.size();
    const std::size_t oad = layout_.own_action_dim;
    const std::size_t pad = layout_.partner_action_dim;

    TdTargetDetail d;
    d.y.resize(N);
    d.own_target_actions.resize(N * oad);
    d.partner_target_actions.resize(N * pad);
    d.q1.resize(N);
    d.q2.resize(N);

    Workspace ws;
    std::vector<double> x;
    x.reserve(layout_.critic_input_dim());
    for (std::size_t n = 0; n < N; ++n) {
        const Transition& t = batch[n];
        double* own_target = d.own_target_actions.data() + n * oad;
        double* partner_target = d.partner_target_actions.data() + n * pad;

        // Smoothed own target action; noise drawn in component order for
        // every element, terminal or not.
        {
            auto a = nets_.target_actor.forward_into(
                own_slice(t.next_state, layout_), ws);
            for (std::size_t c = 0; c < oad; ++c) {
                const double eps = std::clamp(rng.gaussian(hp.target_sigma),
                                              -hp.noise_clip, hp.noise_clip);
                own_target[c] =
                    std::clamp(a[c] + eps, bounds_.low, bounds_.high);
            }
        }
        if (pad > 0) {
            auto e = nets_.target_estimator.forward_into(
                partner_slice(t.next_state, layout_), ws);
            for (std::size_t c = 0; c < pad; ++c)
                partner_target[c] = std::clamp(e[c], bounds_.low, bounds_.high);
        }

        x.clear();
        x.insert(x.end(), t.next_state.begin(), t.next_state.end());
        x.insert(x.end(), own_target, own_target + oad);
        x.insert(x.end(), partner_target, partner_target + pad);

        const double q1 = nets_.target_critic1.forward_into(x, ws)[0];
        const double q2 = nets_.target_critic2.forward_into(x, ws)[0];
        d.q1[n] = q1;
        d.q2[n] = q2;
        d.y[n] = t.terminated ? t.reward
                              : t.reward + hp.gamma * std::min(q1, q2);
    }
    return d;
}

CriticLosses Agent::critic_update(const std::vector<Transition>& batch,
                                  std::span<const double> y,
                                  const Hyperparams& hp) {
    check_batch(batch);
    const std::size_t N = batch.size();
    if (y.size() != N)
        throw ShapeError("critic_update: target count does not match batch");
    const double inv_n = 1.0 / static_cast<double>(N);
    const std::size_t pad = layout_.partner_action_dim;

    Workspace ws;
    // Partner estimates are identical for both critics; fix them up front.
    std::vector<double> estimates(N * pad);
    for (std::size_t n = 0; n < N && pad > 0; ++n) {
        const auto e = update_time_estimate(batch[n], hp, ws);
        std::copy(e.begin(), e.end(), estimates.begin() + n * pad);
    }

    CriticLosses losses;
    ParamGrads acc, sample;
    std::vector<double> x, input_grad;
    const double upstream_base = 2.0 * inv_n;
    for (int j = 0; j < 2; ++j) {
        MlpNetwork& critic = (j == 0) ? nets_.critic1 : nets_.critic2;
        AdamState& adam = (j == 0) ? nets_.adam_critic1 : nets_.adam_critic2;
        acc.data.assign(critic.param_count(), 0.0);
        double loss_sum = 0.0;
        for (std::size_t n = 0; n < N; ++n) {
            build_critic_input(batch[n],
                               {estimates.data() + n * pad, pad}, x);
            const double q = critic.forward_into(x, ws)[0];
            const double diff = q - y[n];
            loss_sum += diff * diff;
            const double upstream[1] = {upstream_base * diff};
            critic.backward_cached_into(x, upstream, sample, input_grad, ws);
            accumulate(acc, sample);
        }
        adam_step(critic, acc, adam, GradientDirection::Minimize);
        (j == 0 ? losses.critic1 : losses.critic2) = loss_sum * inv_n;
    }
    return losses;
}

void Agent::actor_update(const std::vector<Transition>& batch,
                         const Hyperparams& hp) {
    check_batch(batch);
    const std::size_t N = batch.size();
    const double inv_n = 1.0 / static_cast<double>(N);
    const std::size_t sd = layout_.state_dim();
    const std::size_t oad = layout_.own_action_dim;

    Workspace ws_actor, ws_critic;
    ParamGrads acc, sample, critic_grads_unused;
    acc.data.assign(nets_.actor.param_count(), 0.0);
    std::vector<double> x, critic_input_grad, actor_input_grad;
    const double upstream[1] = {inv_n};
    for (std::size_t n = 0; n < N; ++n) {
        const Transition& t = batch[n];
        const auto own = own_slice(t.state, layout_);
        const auto a = nets_.actor.forward_into(own, ws_actor);
        const auto estimate = update_time_estimate(t, hp, ws_critic);

        x.clear();
        x.insert(x.end(), t.state.begin(), t.state.end());
        x.insert(x.end(), a.begin(), a.end());
        x.insert(x.end(), estimate.begin(), estimate.end());

        nets_.critic1.backward_into(x, upstream, critic_grads_unused,
                                    critic_input_grad, ws_critic);
        const std::span<const double> da(critic_input_grad.data() + sd, oad);
        nets_.actor.backward_cached_into(own, da, sample, actor_input_grad,
                                         ws_actor);
        accumulate(acc, sample);
    }
    adam_step(nets_.actor, acc, nets_.adam_actor, GradientDirection::Maximize);
}

void Agent::aen_update(const std::vector<Transition>& batch) {
    if (!has_estimator())
        throw ModeError("aen_update: this agent has no partner action "
                        "estimator");
    check_batch(batch);
    const std::size_t N = batch.size();
    const double inv_n = 1.0 / static_cast<double>(N);
    const std::size_t sd = layout_.state_dim();
    const std::size_t oad = layout_.own_action_dim;
    const std::size_t pad = layout_.partner_action_dim;

    Workspace ws_est, ws_critic;
    ParamGrads acc, sample, critic_grads_unused;
    acc.data.assign(nets_.estimator.param_count(), 0.0);
    std::vector<double> x, critic_input_grad, est_input_grad;
    const double upstream[1] = {inv_n};
    for (std::size_t n = 0; n < N; ++n) {
        const Transition& t = batch[n];
        const auto partner = partner_slice(t.state, layout_);
        const auto e = nets_.estimator.forward_into(partner, ws_est);

        x.clear();
        x.insert(x.end(), t.state.begin(), t.state.end());
        x.insert(x.end(), t.own_action.begin(), t.own_action.end());
        x.insert(x.end(), e.begin(), e.end());

        nets_.critic1.backward_into(x, upstream, critic_grads_unused,
                                    critic_input_grad, ws_critic);
        const std::span<const double> de(critic_input_grad.data() + sd + oad,
                                         pad);
        nets_.estimator.backward_cached_into(partner, de, sample,
                                             est_input_grad, ws_est);
        accumulate(acc, sample);
    }
    adam_step(nets_.estimator, acc, nets_.adam_estimator,
              GradientDirection::Maximize);
}

void Agent::train_step(const ReplayBuffer& buffer, const Hyperparams& hp,
                       std::uint64_t step_index, Rng& rng) {
    hp.validate();
    if (step_index == 0)
        throw StateError("train_step: step_index is 1-based");
    if (buffer.size() == 0)
        throw StateError("train_step: replay buffer is empty");
    if (buffer.state_dim() != layout_.state_dim() ||
        buffer.own_action_dim() != layout_.own_action_dim ||
        buffer.partner_estimate_dim() != layout_.partner_action_dim)
        throw ShapeError("train_step: buffer dims do not match agent layout");

    const auto batch =
        buffer.sample(static_cast<std::size_t>(hp.batch_size), rng);
    const auto td = compute_td_target(batch, hp, rng);
    critic_update(batch, td.y, hp);

    if (step_index % static_cast<std::uint64_t>(hp.policy_delay) == 0) {
        actor_update(batch, hp);
        if (has_estimator()) aen_update(batch);
        soft_update(nets_.target_critic1, nets_.critic1, hp.tau);
        soft_update(nets_.target_critic2, nets_.critic2, hp.tau);
        soft_update(nets_.target_actor, nets_.actor, hp.tau);
        if (has_estimator())
            soft_update(nets_.target_estimator, nets_.estimator, hp.tau);
    }
    ++train_steps_;
}

void centralized_td3_step(Agent& agent, const ReplayBuffer& buffer,
                          const Hyperparams& hp, std::uint64_t step_index,
                          Rng& rng) {
    if (agent.layout().mode != Mode::Centralized)
        throw ModeError("centralized_td3_step requires a centralized agent");
    agent.train_step(buffer, hp, step_index, rng);
}

} // namespace aentd3
