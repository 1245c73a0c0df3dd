// Command-line front end: train / eval / finetune / deploy-sim / summarize.
//
// Exit codes: 0 success, 2 configuration error, 3 shape/state/mode error,
// 4 checkpoint error, 5 I/O error, 6 unexpected failure, 1 usage error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "aentd3/checkpoint.hpp"
#include "aentd3/config.hpp"
#include "aentd3/deploy.hpp"
#include "aentd3/errors.hpp"
#include "aentd3/experiment.hpp"
#include "aentd3/metrics.hpp"
#include "aentd3/numio.hpp"

namespace {

using namespace aentd3;

void ensure_parent_dir(const std::string& path) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
        if (ec)
            throw IoError("cannot create directory " +
                          p.parent_path().string() + ": " + ec.message());
    }
}

// Replaces the extension (e.g. ".ckpt") with `suffix`; appends when the
// path has no extension.
std::string with_suffix(const std::string& path, const std::string& suffix) {
    std::filesystem::path p(path);
    p.replace_extension();
    return p.string() + suffix;
}

int cmd_train(const std::string& config_path, std::uint64_t seed) {
    const ExperimentConfig cfg = load_config_file(config_path);
    cfg.validate();
    const TrainResult result = run_training(cfg, seed);

    const std::string metrics_path = expand_seed_path(cfg.metrics_path, seed);
    const std::string ckpt_path = expand_seed_path(cfg.checkpoint_path, seed);
    ensure_parent_dir(metrics_path);
    ensure_parent_dir(ckpt_path);
    write_metrics_csv(metrics_path, cfg, seed, "train", result.records);
    save_checkpoint(ckpt_path, result.checkpoint);

    double total_wall = 0.0;
    for (const MetricsRecord& r : result.records) total_wall += r.wall_time_s;
    std::cout << "trained " << result.records.size() << " episodes (seed "
              << seed << ", " << format_double(total_wall)
              << " s)\n  metrics: " << metrics_path
              << "\n  checkpoint: " << ckpt_path << '\n';
    return 0;
}

int cmd_eval(const std::string& ckpt_path, int episodes,
             const std::string& output, const std::string& trace) {
    const TrainingCheckpoint ckpt = load_checkpoint(ckpt_path);
    EvalOptions opts;
    opts.episodes = episodes;
    opts.trace_path = trace;
    if (!trace.empty()) ensure_parent_dir(trace);
    const std::vector<MetricsRecord> records = run_eval(ckpt, opts);

    const std::string out_path =
        output.empty() ? with_suffix(ckpt_path, "_eval.csv") : output;
    ensure_parent_dir(out_path);
    write_metrics_csv(out_path, ckpt.config, ckpt.seed, "eval", records);

    double ret_sum = 0.0;
    std::uint64_t safety = 0;
    for (const MetricsRecord& r : records) {
        ret_sum += r.episode_return;
        if (r.done_reason == DoneReason::SafetyTermination) ++safety;
    }
    std::cout << "evaluated " << records.size() << " episodes\n  mean return: "
              << format_double(ret_sum / double(records.size()))
              << "\n  safety terminations: " << safety
              << "\n  metrics: " << out_path << '\n';
    if (!records.empty() && records.back().final_height)
        std::cout << "  final height (last episode): "
                  << format_double(*records.back().final_height) << '\n';
    return 0;
}

int cmd_finetune(const std::string& ckpt_path, double delta,
                 std::uint64_t steps, std::string output,
                 std::string metrics) {
    const TrainingCheckpoint src = load_checkpoint(ckpt_path);
    const FinetuneResult result = resume_finetune(src, delta, steps);

    if (output.empty()) output = with_suffix(ckpt_path, "_finetuned.ckpt");
    if (metrics.empty()) metrics = with_suffix(output, "_metrics.csv");
    ensure_parent_dir(output);
    ensure_parent_dir(metrics);
    save_checkpoint(output, result.checkpoint);
    write_metrics_csv(metrics, result.checkpoint.config, result.checkpoint.seed,
                      "train", result.records);
    std::cout << "fine-tuned for " << steps << " steps at safety_delta "
              << format_double(delta) << "\n  checkpoint: " << output
              << "\n  metrics: " << metrics << '\n';
    return 0;
}

std::vector<std::vector<double>> read_command_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read command file: " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::string cell;
        std::istringstream ss(line);
        while (std::getline(ss, cell, ',')) row.push_back(parse_double(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

int cmd_deploy_sim(const std::string& input, const std::string& output,
                   double policy_hz, double control_hz, double max_delta) {
    InterpolationConfig cfg;
    cfg.policy_rate_hz = policy_hz;
    cfg.control_rate_hz = control_hz;
    cfg.max_step_delta = max_delta;
    const std::vector<std::vector<double>> actions = read_command_rows(input);
    const CommandStream stream = run_pipeline(actions, cfg);

    ensure_parent_dir(output);
    std::ofstream f(output);
    if (!f) throw IoError("cannot write command file: " + output);
    f << "# kind = pipeline\n";
    f << "# policy_rate_hz = " << format_double(cfg.policy_rate_hz) << '\n';
    f << "# control_rate_hz = " << format_double(cfg.control_rate_hz) << '\n';
    f << "# max_step_delta = " << format_double(cfg.max_step_delta) << '\n';
    f << "# resumes_after_rejection = " << stream.resumes_after_rejection
      << '\n';
    const std::size_t dim =
        stream.commands.empty() ? 0 : stream.commands.front().command.size();
    f << "timestamp";
    for (std::size_t i = 0; i < dim; ++i) f << ",c" << i;
    f << ",accepted\n";
    std::size_t rejected = 0;
    for (const TimedCommand& c : stream.commands) {
        f << format_double(c.timestamp);
        for (double v : c.command) f << ',' << format_double(v);
        f << ',' << (c.accepted ? '1' : '0') << '\n';
        if (!c.accepted) ++rejected;
    }
    f.flush();
    if (!f) throw IoError("failed while writing command file: " + output);

    std::cout << "interpolated " << actions.size() << " policy commands into "
              << stream.commands.size() << " control commands\n  rejected: "
              << rejected << "\n  resumes after rejection: "
              << stream.resumes_after_rejection << "\n  output: " << output
              << '\n';
    return 0;
}

int cmd_summarize(const std::vector<std::string>& files,
                  std::optional<double> threshold, const std::string& output,
                  const std::string& curves_path) {
    std::vector<MetricsFile> inputs;
    inputs.reserve(files.size());
    for (const std::string& f : files) inputs.push_back(read_metrics_csv(f));
    SummaryOptions opts;
    opts.threshold = threshold;
    const SummaryResult result = export_summary(inputs, opts);

    if (output.empty()) {
        write_summary_csv(std::cout, result.rows);
    } else {
        ensure_parent_dir(output);
        std::ofstream f(output);
        if (!f) throw IoError("cannot write summary file: " + output);
        write_summary_csv(f, result.rows);
        f.flush();
        if (!f) throw IoError("failed while writing summary file: " + output);
        std::cout << "summary: " << output << '\n';
    }
    if (!curves_path.empty()) {
        ensure_parent_dir(curves_path);
        std::ofstream f(curves_path);
        if (!f) throw IoError("cannot write curves file: " + curves_path);
        write_curves_csv(f, result.curves);
        f.flush();
        if (!f)
            throw IoError("failed while writing curves file: " + curves_path);
        std::cout << "curves: " << curves_path << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Decentralized cooperative lifting: TD3 with partner-action "
                 "estimation"};
    app.require_subcommand(1);

    // train
    std::string train_config;
    std::uint64_t train_seed = 1;
    CLI::App* train = app.add_subcommand("train", "Train one seed of a config");
    train->add_option("--config", train_config, "Experiment config (JSON)")
        ->required();
    train->add_option("--seed", train_seed, "Random seed")->required();

    // eval
    std::string eval_ckpt, eval_output, eval_trace;
    int eval_episodes = 10;
    CLI::App* eval = app.add_subcommand(
        "eval", "Deterministic rollouts from a checkpoint");
    eval->add_option("--checkpoint", eval_ckpt, "Checkpoint file")->required();
    eval->add_option("--episodes", eval_episodes, "Number of episodes")
        ->required();
    eval->add_option("--output", eval_output,
                     "Metrics CSV path (default: <checkpoint>_eval.csv)");
    eval->add_option("--trace", eval_trace,
                     "Write the first episode's joint commands as CSV");

    // finetune
    std::string ft_ckpt, ft_output, ft_metrics;
    double ft_delta = 0.0;
    std::uint64_t ft_steps = 0;
    CLI::App* finetune = app.add_subcommand(
        "finetune", "Resume training under a tightened safety band");
    finetune->add_option("--checkpoint", ft_ckpt, "Source checkpoint")
        ->required();
    finetune->add_option("--delta", ft_delta, "New (smaller) safety_delta")
        ->required();
    finetune->add_option("--steps", ft_steps, "Extra environment steps")
        ->required();
    finetune->add_option("--output", ft_output,
                         "Checkpoint output (default: <src>_finetuned.ckpt)");
    finetune->add_option("--metrics", ft_metrics,
                         "Metrics output (default: <output>_metrics.csv)");

    // deploy-sim
    std::string dep_input, dep_output;
    double dep_policy_hz = 4.0, dep_control_hz = 20.0, dep_max_delta = 0.008;
    CLI::App* deploy = app.add_subcommand(
        "deploy-sim", "Interpolate policy commands to the control rate "
                      "through the safety filter");
    deploy->add_option("--input", dep_input, "Policy command CSV")->required();
    deploy->add_option("--output", dep_output, "Control command CSV")
        ->required();
    deploy->add_option("--policy-hz", dep_policy_hz, "Policy rate (Hz)");
    deploy->add_option("--control-hz", dep_control_hz, "Control rate (Hz)");
    deploy->add_option("--max-step-delta", dep_max_delta,
                       "Per-cycle command change bound");

    // summarize
    std::vector<std::string> sum_files;
    std::string sum_output, sum_curves;
    double sum_threshold = 0.0;
    CLI::App* summarize =
        app.add_subcommand("summarize", "Aggregate metrics files");
    summarize->add_option("files", sum_files, "Metrics CSV files")
        ->required()
        ->expected(-1);
    CLI::Option* thresh_opt = summarize->add_option(
        "--threshold", sum_threshold, "Explicit success threshold");
    summarize->add_option("--output", sum_output,
                          "Summary CSV path (default: stdout)");
    summarize->add_option("--curves", sum_curves,
                          "Write downsampled return curves here");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*train) return cmd_train(train_config, train_seed);
        if (*eval) return cmd_eval(eval_ckpt, eval_episodes, eval_output,
                                   eval_trace);
        if (*finetune)
            return cmd_finetune(ft_ckpt, ft_delta, ft_steps, ft_output,
                                ft_metrics);
        if (*deploy)
            return cmd_deploy_sim(dep_input, dep_output, dep_policy_hz,
                                  dep_control_hz, dep_max_delta);
        if (*summarize)
            return cmd_summarize(sum_files,
                                 thresh_opt->count()
                                     ? std::optional<double>(sum_threshold)
                                     : std::nullopt,
                                 sum_output, sum_curves);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const CheckpointError& e) {
        std::cerr << "checkpoint error: " << e.what() << '\n';
        return 4;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 5;
    } catch (const ShapeError& e) {
        std::cerr << "shape error: " << e.what() << '\n';
        return 3;
    } catch (const ModeError& e) {
        std::cerr << "mode error: " << e.what() << '\n';
        return 3;
    } catch (const StateError& e) {
        std::cerr << "state error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 6;
    }
    return 1;
}
