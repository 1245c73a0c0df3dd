#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "aentd3/agent.hpp"
#include "aentd3/config.hpp"

namespace aentd3 {

// Versioned structured-text serialization. Manifest lines carry layer
// specs, scales and optimizer hyperparameters; parameters follow as flat
// decimal lists (row-major weights then biases per layer), written in
// shortest round-trip form so a load reproduces every double bit-exactly.

void save_network(std::ostream& out, const MlpNetwork& net);
MlpNetwork load_network(std::istream& in); // throws CheckpointError

void save_adam(std::ostream& out, const AdamState& state);
AdamState load_adam(std::istream& in); // throws CheckpointError

// A full training run snapshot: the experiment config as of saving (a
// fine-tune rewrites the safety margin before saving), the seed, and every
// learner with its target networks and optimizer states.
struct TrainingCheckpoint {
    ExperimentConfig config;
    std::uint64_t seed = 0;
    std::vector<Agent> agents;
};

void save_checkpoint(const std::string& path, const TrainingCheckpoint& ckpt);
TrainingCheckpoint load_checkpoint(const std::string& path);

} // namespace aentd3
