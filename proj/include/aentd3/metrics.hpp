#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "aentd3/config.hpp"
#include "aentd3/lift_env.hpp"

namespace aentd3 {

// One row of a training or evaluation metrics file.
struct MetricsRecord {
    std::uint64_t seed = 0;
    std::uint64_t episode = 0; // 1-based, gapless per run
    double episode_return = 0.0;
    std::uint64_t episode_length = 0;
    DoneReason done_reason = DoneReason::HorizonReached;
    // Beam height at the last step; evaluation runs only.
    std::optional<double> final_height;
    // Mean squared estimator error against the scripted partner's true
    // action, averaged over the episode's states; only defined when a
    // scripted partner provides ground truth.
    std::optional<double> aen_mse;
    // Measured, not persisted: the CSV must be byte-identical across
    // reruns, so timing stays in memory.
    double wall_time_s = 0.0;
};

// A parsed metrics file: `#`-prefixed header lines ("key = value"),
// followed by a column-name row and comma-separated data rows. `records`
// is populated for train/eval files; other kinds (summary, curves) keep
// their rows as raw strings so they can be passed through untouched.
struct MetricsFile {
    std::string path;
    std::map<std::string, std::string> header; // parsed "# key = value"
    std::string kind;                          // train, eval, summary, curves
    std::vector<std::string> columns;
    std::vector<MetricsRecord> records;
    std::vector<std::vector<std::string>> raw_rows;

    std::string header_value(const std::string& key,
                             const std::string& fallback) const;
};

// Writes the config echo, "# seed", "# kind", the column row, and one
// data row per record. Optional columns appear only when at least one
// record carries them. Numbers use shortest round-trip formatting so the
// bytes are a pure function of the values.
void write_metrics_csv(const std::string& path, const ExperimentConfig& cfg,
                       std::uint64_t seed, const std::string& kind,
                       const std::vector<MetricsRecord>& records);

MetricsFile read_metrics_csv(const std::string& path);

} // namespace aentd3
