#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "aentd3/agent.hpp"
#include "aentd3/checkpoint.hpp"
#include "aentd3/config.hpp"
#include "aentd3/metrics.hpp"
#include "aentd3/rng.hpp"

namespace aentd3 {

// Independent deterministic random streams for one seed, split from a
// common root in a fixed order. Every consumer owns its stream, so the
// draw sequence of one (say, exploration noise) can never shift another
// (batch sampling), and runs are reproducible stream by stream.
struct SeedStreams {
    Rng env;    // reset noise
    Rng init1;  // first learner's parameter initialization
    Rng init2;  // second learner's parameter initialization (may go unused)
    Rng act1;   // first learner's exploration and warm-up action draws
    Rng act2;   // second learner's exploration and warm-up action draws
    Rng train1; // first learner's batch sampling and target smoothing noise
    Rng train2; // second learner's batch sampling and target smoothing noise
};

SeedStreams make_seed_streams(std::uint64_t seed);

// Network/IO layout for learner `agent_index` (0-based) under this config:
// centralized folds the whole state and joint action into one learner;
// decentralized learners see their own effector first and estimate the
// partner's action.
AgentLayout layout_for(const ExperimentConfig& cfg, std::size_t agent_index);

// Number of learners the config implies (1, or 2 for decentralized
// self-play).
std::size_t learner_count(const ExperimentConfig& cfg);

// Freshly initialized learners, drawing parameters from streams.init1 /
// streams.init2 in learner order.
std::vector<Agent> make_initial_agents(const ExperimentConfig& cfg,
                                       SeedStreams& streams);

struct TrainResult {
    std::vector<MetricsRecord> records; // one per episode, gapless
    TrainingCheckpoint checkpoint;
};

// One full training run for one seed: uniform-random warm-up for
// learning_starts environment steps (no records, no updates), then
// `episodes` episodes of up to `horizon` steps, storing each transition
// and updating every learner once per environment step. Pure function of
// (config, seed); writes no files.
TrainResult run_training(const ExperimentConfig& cfg, std::uint64_t seed);

struct EvalOptions {
    int episodes = 10;
    // When non-empty, the joint commands of the first eval episode are
    // written here as CSV rows (one row per step), ready to feed the
    // interpolation pipeline.
    std::string trace_path;
};

// Deterministic policy rollouts: exploration noise and reset noise both
// zero. Records carry the final beam height, plus the estimator error per
// episode when a scripted partner provides ground truth. Throws
// CheckpointError when the checkpoint's learners do not match its config.
std::vector<MetricsRecord> run_eval(const TrainingCheckpoint& ckpt,
                                    const EvalOptions& opts);

struct FinetuneResult {
    std::vector<MetricsRecord> records;
    TrainingCheckpoint checkpoint; // config carries the tightened delta
};

// Continue training a loaded checkpoint for `extra_steps` environment
// steps under a strictly tightened safety band (ConfigError otherwise),
// with fresh replay buffers. extra_steps == 0 returns the input learners
// untouched (only the config's safety_delta changes).
FinetuneResult resume_finetune(const TrainingCheckpoint& src, double new_delta,
                               std::uint64_t extra_steps);

// Mean squared error of `agent`'s partner-action estimate against the
// scripted partner's true action over `n_states` probe states. Probe
// states are env resets (using the config's reset noise) raised by a
// fixed ladder of beam heights so both scripted regimes — lifting below
// the target, holding at it — are represented. Deterministic in
// (agent, env, n_states, probe_seed).
double estimator_probe_mse(const Agent& agent, const EnvConfig& env,
                           int n_states, std::uint64_t probe_seed);

struct SummaryOptions {
    // Explicit success threshold; when absent it is derived as
    // factor * best centralized per-seed final-window median (falling
    // back to the best observed median when no centralized input exists).
    std::optional<double> threshold;
    int curve_points = 200; // max samples per label in the curves output
};

struct SummaryRow {
    std::string label;
    std::string mode;
    std::uint64_t num_seeds = 0;
    std::uint64_t num_success = 0;
    double success_rate = 0.0;
    double threshold = 0.0;
    double median_final = 0.0; // across seeds, of per-seed final-window medians
    double iqr_low = 0.0;      // 25th percentile of the same
    double iqr_high = 0.0;     // 75th percentile
};

struct CurvePoint {
    std::string label;
    std::uint64_t episode = 0;
    double median_return = 0.0;
    double iqr_low = 0.0;
    double iqr_high = 0.0;
};

struct SummaryResult {
    std::vector<SummaryRow> rows;
    std::vector<CurvePoint> curves;
};

// Aggregates training/eval metrics into per-label success statistics and
// downsampled return curves. Inputs that are already summaries pass
// through unchanged (summarizing a summary is idempotent); train records
// group by label, then by seed.
SummaryResult export_summary(const std::vector<MetricsFile>& inputs,
                             const SummaryOptions& opts);

// "# kind = summary" / "# kind = curves" headers plus one CSV row per
// entry, in shortest round-trip number formatting.
void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);
void write_curves_csv(std::ostream& out, const std::vector<CurvePoint>& pts);

} // namespace aentd3
