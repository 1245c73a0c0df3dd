#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aentd3/errors.hpp"

namespace aentd3 {

// Upsampling of low-rate policy outputs to the actuator control rate, plus
// a per-cycle command-change limiter. Everything here is pure and
// single-threaded.

struct InterpolationConfig {
    double policy_rate_hz = 4.0;
    double control_rate_hz = 20.0;
    // Largest allowed max-norm change between consecutive emitted commands
    // (one action bound spread over the 5 substeps at the defaults).
    double max_step_delta = 0.008;

    // Substeps per policy period; control_rate must be an integer multiple
    // of policy_rate. Throws ConfigError otherwise.
    std::size_t substeps() const;
    void validate() const;
};

struct TimedCommand {
    double timestamp = 0.0; // seconds; multiples of 1/control_rate_hz
    std::vector<double> command;
    bool accepted = true;
};

struct CommandStream {
    std::vector<TimedCommand> commands;
    // Number of accept events that directly followed one or more
    // rejections. Such a resume is worth surfacing: the actuator held its
    // last command for the whole rejection run and only then moved again.
    std::size_t resumes_after_rejection = 0;
};

// The k = substeps() commands c_j = prev + (j/k)(next - prev), j = 1..k.
// The last command is set to `next` verbatim, so segment endpoints are
// exact to the bit.
std::vector<std::vector<double>> interpolate(std::span<const double> prev,
                                             std::span<const double> next,
                                             const InterpolationConfig& cfg);

// Reject iff max-norm(candidate - prev_emitted) > max_step_delta; a change
// exactly equal to the threshold is accepted.
bool safety_accepts(std::span<const double> prev_emitted,
                    std::span<const double> candidate,
                    const InterpolationConfig& cfg);

// Streaming form of the filter: feed candidates in order; rejected
// candidates are skipped and the previously emitted command stays the
// comparison baseline for the next candidate (the actuator holds).
class SafetyFilter {
public:
    SafetyFilter(std::vector<double> initial, const InterpolationConfig& cfg);
    // True if accepted; the candidate then becomes the new baseline.
    bool offer(std::span<const double> candidate);
    const std::vector<double>& last_emitted() const { return emitted_; }
    std::size_t resumes_after_rejection() const { return resumes_; }

private:
    std::vector<double> emitted_;
    InterpolationConfig cfg_;
    bool in_rejection_run_ = false;
    std::size_t resumes_ = 0;
};

// Interpolate each consecutive pair of policy actions and stream every
// substep through the safety filter (the first action is the starting
// baseline and is not itself emitted). Output: k * (len - 1) evaluated
// commands, timestamps (segment * k + j) / control_rate_hz.
CommandStream run_pipeline(const std::vector<std::vector<double>>& actions,
                           const InterpolationConfig& cfg);

} // namespace aentd3
