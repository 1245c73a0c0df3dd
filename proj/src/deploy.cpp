#include "aentd3/deploy.hpp"

#include <cmath>
#include <utility>

namespace aentd3 {

void InterpolationConfig::validate() const {
    if (!(policy_rate_hz > 0) || !(control_rate_hz > 0))
        throw ConfigError("rates must be positive");
    if (!(max_step_delta > 0))
        throw ConfigError("max_step_delta must be positive");
    substeps();
}

std::size_t InterpolationConfig::substeps() const {
    const double ratio = control_rate_hz / policy_rate_hz;
    const double rounded = std::nearbyint(ratio);
    if (!(rounded >= 1.0) || std::abs(ratio - rounded) > 1e-9)
        throw ConfigError("control_rate_hz must be an integer multiple of "
                          "policy_rate_hz");
    return static_cast<std::size_t>(rounded);
}

std::vector<std::vector<double>> interpolate(std::span<const double> prev,
                                             std::span<const double> next,
                                             const InterpolationConfig& cfg) {
    if (prev.size() != next.size())
        throw ShapeError("interpolate: action dims differ");
    const std::size_t k = cfg.substeps();
    std::vector<std::vector<double>> out(k);
    for (std::size_t j = 1; j <= k; ++j) {
        std::vector<double>& c = out[j - 1];
        c.resize(prev.size());
        if (j == k) {
            // exact endpoint, not prev + 1.0 * (next - prev)
            c.assign(next.begin(), next.end());
        } else {
            const double f =
                static_cast<double>(j) / static_cast<double>(k);
            for (std::size_t i = 0; i < prev.size(); ++i)
                c[i] = prev[i] + f * (next[i] - prev[i]);
        }
    }
    return out;
}

bool safety_accepts(std::span<const double> prev_emitted,
                    std::span<const double> candidate,
                    const InterpolationConfig& cfg) {
    if (prev_emitted.size() != candidate.size())
        throw ShapeError("safety filter: command dims differ");
    double change = 0.0;
    for (std::size_t i = 0; i < candidate.size(); ++i)
        change = std::max(change, std::abs(candidate[i] - prev_emitted[i]));
    return change <= cfg.max_step_delta;
}

SafetyFilter::SafetyFilter(std::vector<double> initial,
                           const InterpolationConfig& cfg)
    : emitted_(std::move(initial)), cfg_(cfg) {
    cfg_.validate();
}

bool SafetyFilter::offer(std::span<const double> candidate) {
    if (safety_accepts(emitted_, candidate, cfg_)) {
        if (in_rejection_run_) {
            ++resumes_;
            in_rejection_run_ = false;
        }
        emitted_.assign(candidate.begin(), candidate.end());
        return true;
    }
    in_rejection_run_ = true;
    return false;
}

CommandStream run_pipeline(const std::vector<std::vector<double>>& actions,
                           const InterpolationConfig& cfg) {
    if (actions.empty()) throw ConfigError("run_pipeline: no policy actions");
    const std::size_t k = cfg.substeps();
    const std::size_t dim = actions.front().size();
    for (const auto& a : actions)
        if (a.size() != dim)
            throw ShapeError("run_pipeline: inconsistent action dims");

    CommandStream stream;
    stream.commands.reserve(k * (actions.size() - 1));
    SafetyFilter filter(actions.front(), cfg);
    std::size_t cycle = 0;
    for (std::size_t seg = 0; seg + 1 < actions.size(); ++seg) {
        const auto commands = interpolate(actions[seg], actions[seg + 1], cfg);
        for (const auto& c : commands) {
            ++cycle;
            TimedCommand tc;
            tc.timestamp = static_cast<double>(cycle) / cfg.control_rate_hz;
            tc.command = c;
            tc.accepted = filter.offer(c);
            stream.commands.push_back(std::move(tc));
        }
    }
    stream.resumes_after_rejection = filter.resumes_after_rejection();
    return stream;
}

} // namespace aentd3
