#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "aentd3/agent.hpp"
#include "aentd3/lift_env.hpp"

namespace aentd3 {

// Who plays effector 2. Learned: a second independent learner (or, in
// centralized mode, the single joint learner). Scripted: the fixed
// deterministic lift policy, giving ground truth for estimator error.
enum class PartnerKind { Learned, Scripted };

const char* partner_kind_name(PartnerKind p);
PartnerKind partner_kind_from_name(const std::string& name);

struct ExperimentConfig {
    std::string label;      // groups runs in summaries; defaults to the mode
    Mode mode = Mode::Decentralized;
    PartnerKind partner = PartnerKind::Learned;
    Hyperparams hyper;
    OptimizerSettings opt;
    EnvConfig env;
    std::size_t centralized_width = 256;
    std::size_t decentralized_width = 128;
    std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::uint64_t learning_starts = 1000;
    std::size_t buffer_capacity = 1'000'000;
    // Success = median return over the final `success_window` episodes >=
    // success_threshold_factor * best centralized median (or an explicit
    // threshold given to summarize).
    int success_window = 100;
    double success_threshold_factor = 0.85;
    // Output locations; "{seed}" expands to the seed. Required when the
    // config has more than one seed.
    std::string metrics_path = "runs/{seed}_metrics.csv";
    std::string checkpoint_path = "runs/{seed}.ckpt";

    std::size_t hidden_width() const {
        return mode == Mode::Centralized ? centralized_width
                                         : decentralized_width;
    }
    void validate() const; // throws ConfigError
};

// JSON file round trip. Unknown keys are rejected (typos should fail
// loudly); missing keys keep their defaults.
ExperimentConfig load_config_file(const std::string& path);
ExperimentConfig config_from_json_text(const std::string& text);
std::string config_to_json_text(const ExperimentConfig& cfg);

// Canonical "key = value" lines (no trailing newline on entries) used for
// the config echo in metrics headers and for checkpoint embedding.
std::vector<std::string> config_echo_lines(const ExperimentConfig& cfg);

// Path template expansion for per-seed outputs.
std::string expand_seed_path(const std::string& pattern, std::uint64_t seed);

} // namespace aentd3
