#include "aentd3/rl.hpp"

#include <algorithm>

namespace aentd3 {

ReplayBuffer::ReplayBuffer(std::size_t capacity, std::size_t state_dim,
                           std::size_t own_action_dim,
                           std::size_t partner_estimate_dim)
    : capacity_(capacity), state_dim_(state_dim),
      own_action_dim_(own_action_dim),
      partner_estimate_dim_(partner_estimate_dim) {
    if (capacity == 0) throw ConfigError("replay buffer capacity must be positive");
    if (state_dim == 0 || own_action_dim == 0)
        throw ShapeError("replay buffer state/action dims must be positive");
    states_.reserve(capacity * state_dim);
    next_states_.reserve(capacity * state_dim);
    own_actions_.reserve(capacity * own_action_dim);
    partner_estimates_.reserve(capacity * partner_estimate_dim);
    rewards_.reserve(capacity);
    terminated_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (t.state.size() != state_dim_ || t.next_state.size() != state_dim_)
        throw ShapeError("replay push: state dim mismatch");
    if (t.own_action.size() != own_action_dim_)
        throw ShapeError("replay push: own action dim mismatch");
    if (t.partner_estimate.size() != partner_estimate_dim_)
        throw ShapeError("replay push: partner estimate dim mismatch");

    const std::size_t slot = next_;
    auto place = [slot](std::vector<double>& store, std::span<const double> v,
                        std::size_t dim) {
        if (store.size() < (slot + 1) * dim) store.resize((slot + 1) * dim);
        std::copy(v.begin(), v.end(), store.begin() + slot * dim);
    };
    place(states_, t.state, state_dim_);
    place(next_states_, t.next_state, state_dim_);
    place(own_actions_, t.own_action, own_action_dim_);
    place(partner_estimates_, t.partner_estimate, partner_estimate_dim_);
    if (rewards_.size() <= slot) {
        rewards_.resize(slot + 1);
        terminated_.resize(slot + 1);
    }
    rewards_[slot] = t.reward;
    terminated_[slot] = t.terminated ? 1 : 0;

    next_ = (next_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

std::size_t ReplayBuffer::slot_of(std::size_t i) const {
    if (i >= size_) throw StateError("replay buffer index out of range");
    // Once full, `next_` is the oldest retained entry.
    return size_ < capacity_ ? i : (next_ + i) % capacity_;
}

Transition ReplayBuffer::read_slot(std::size_t slot) const {
    Transition t;
    t.state.assign(states_.begin() + slot * state_dim_,
                   states_.begin() + (slot + 1) * state_dim_);
    t.next_state.assign(next_states_.begin() + slot * state_dim_,
                        next_states_.begin() + (slot + 1) * state_dim_);
    t.own_action.assign(own_actions_.begin() + slot * own_action_dim_,
                        own_actions_.begin() + (slot + 1) * own_action_dim_);
    t.partner_estimate.assign(
        partner_estimates_.begin() + slot * partner_estimate_dim_,
        partner_estimates_.begin() + (slot + 1) * partner_estimate_dim_);
    t.reward = rewards_[slot];
    t.terminated = terminated_[slot] != 0;
    return t;
}

Transition ReplayBuffer::get(std::size_t i) const { return read_slot(slot_of(i)); }

std::vector<Transition> ReplayBuffer::sample(std::size_t n, Rng& rng) const {
    if (size_ == 0) throw StateError("cannot sample from an empty replay buffer");
    std::vector<Transition> batch;
    batch.reserve(n);
    for (std::size_t k = 0; k < n; ++k)
        batch.push_back(read_slot(slot_of(rng.index(size_))));
    return batch;
}

std::vector<double> clip_action(std::span<const double> action,
                                const ActionBounds& bounds) {
    std::vector<double> out(action.begin(), action.end());
    for (double& a : out) a = std::clamp(a, bounds.low, bounds.high);
    return out;
}

std::vector<double> clipped_gaussian_noise(std::size_t dim, double sigma,
                                           double clip, Rng& rng) {
    std::vector<double> out(dim);
    for (double& e : out) e = std::clamp(rng.gaussian(sigma), -clip, clip);
    return out;
}

} // namespace aentd3
