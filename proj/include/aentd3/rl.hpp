#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aentd3/errors.hpp"
#include "aentd3/rng.hpp"

namespace aentd3 {

struct ActionBounds {
    double low = -0.04;
    double high = 0.04;
};

// One stored experience from one agent's point of view. `state` and
// `next_state` are the full environment state in this agent's ordering
// (own effector first). `partner_estimate` is the AEN output recorded at
// collection time; it is empty for centralized agents, which observe the
// partner action directly inside `own_action` (joint action).
struct Transition {
    std::vector<double> state;
    std::vector<double> own_action;
    std::vector<double> partner_estimate;
    double reward = 0.0;
    std::vector<double> next_state;
    // True termination (safety abort): the TD target must not bootstrap
    // through it. Horizon expiry is not stored as terminal.
    bool terminated = false;
};

// Fixed-capacity FIFO ring buffer with uniform sampling (with replacement).
// Dimensions are fixed at construction; push validates every transition
// against them. Storage is flat per field so a million-transition buffer is
// a handful of allocations.
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t state_dim,
                 std::size_t own_action_dim, std::size_t partner_estimate_dim);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t state_dim() const { return state_dim_; }
    std::size_t own_action_dim() const { return own_action_dim_; }
    std::size_t partner_estimate_dim() const { return partner_estimate_dim_; }

    // Appends, overwriting the oldest entry once full.
    void push(const Transition& t);

    // n independent uniform draws over the current contents (sampling with
    // replacement; batches may repeat entries). One Rng::index(size) draw
    // per sampled transition, in order. Throws StateError when empty.
    std::vector<Transition> sample(std::size_t n, Rng& rng) const;

    // Read back entry i in insertion order (0 = oldest retained).
    Transition get(std::size_t i) const;

private:
    std::size_t capacity_, state_dim_, own_action_dim_, partner_estimate_dim_;
    std::size_t size_ = 0;
    std::size_t next_ = 0; // slot for the next push
    std::vector<double> states_, own_actions_, partner_estimates_, next_states_;
    std::vector<double> rewards_;
    std::vector<unsigned char> terminated_;

    std::size_t slot_of(std::size_t i) const;
    Transition read_slot(std::size_t slot) const;
};

// Elementwise clamp into [bounds.low, bounds.high].
std::vector<double> clip_action(std::span<const double> action,
                                const ActionBounds& bounds);

// dim independent draws from N(0, sigma^2), each clamped into [-clip, clip].
// Consumes exactly 2 * dim uniforms regardless of sigma (see Rng::gaussian).
std::vector<double> clipped_gaussian_noise(std::size_t dim, double sigma,
                                           double clip, Rng& rng);

} // namespace aentd3
