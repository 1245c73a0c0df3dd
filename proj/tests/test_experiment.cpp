#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "aentd3/experiment.hpp"

using namespace aentd3;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// A configuration small enough that a full training run takes well under a
// second: tiny widths, short horizon, a handful of episodes.
ExperimentConfig tiny_config(Mode mode) {
    ExperimentConfig cfg;
    cfg.label = mode == Mode::Centralized ? "tiny-central" : "tiny-decentral";
    cfg.mode = mode;
    cfg.hyper.gamma = 0.9;
    cfg.hyper.tau = 0.05;
    cfg.hyper.explore_sigma = 0.002;
    cfg.hyper.target_sigma = 0.001;
    cfg.hyper.noise_clip = 0.002;
    cfg.hyper.policy_delay = 2;
    cfg.hyper.batch_size = 8;
    cfg.hyper.episodes = 3;
    cfg.hyper.horizon = 10;
    cfg.env.horizon = cfg.hyper.horizon;
    cfg.env.action_bounds = cfg.hyper.action_bounds;
    cfg.opt.head_init_scale = 0.01;
    cfg.env.reset_noise = 0.001;
    cfg.centralized_width = 8;
    cfg.decentralized_width = 8;
    cfg.seeds = {1};
    cfg.learning_starts = 32;
    cfg.buffer_capacity = 4096;
    cfg.success_window = 2;
    return cfg;
}

std::vector<double> agent_param_snapshot(const Agent& a) {
    std::vector<double> out;
    std::vector<double> tmp;
    const AgentNetworks& n = a.nets();
    for (const MlpNetwork* net :
         {&n.critic1, &n.critic2, &n.actor, &n.estimator, &n.target_critic1,
          &n.target_critic2, &n.target_actor, &n.target_estimator}) {
        if (net->layers.empty()) continue;
        net->copy_params(tmp);
        out.insert(out.end(), tmp.begin(), tmp.end());
    }
    return out;
}

// Synthetic per-episode training records with a controlled final-window
// median for summary tests.
MetricsFile synthetic_train_file(const std::string& label, std::uint64_t seed,
                                 double final_level) {
    MetricsFile f;
    f.kind = "train";
    f.header["label"] = label;
    f.header["mode"] = "centralized";
    f.header["success_window"] = "4";
    f.header["success_threshold_factor"] = "0.85";
    f.header["seed"] = std::to_string(seed);
    f.columns = {"seed", "episode", "return", "episode_length", "done_reason"};
    for (int e = 1; e <= 12; ++e) {
        MetricsRecord r;
        r.seed = seed;
        r.episode = std::uint64_t(e);
        // Early episodes are poor; the last four sit at final_level.
        r.episode_return = e <= 8 ? 1.0 : final_level;
        r.episode_length = 10;
        r.done_reason = DoneReason::HorizonReached;
        f.records.push_back(r);
    }
    return f;
}

} // namespace

TEST_CASE("seed streams are independent and reproducible") {
    SeedStreams a = make_seed_streams(7);
    SeedStreams b = make_seed_streams(7);
    CHECK(a.env.uniform01() == b.env.uniform01());
    CHECK(a.init1.uniform01() == b.init1.uniform01());
    CHECK(a.init2.uniform01() == b.init2.uniform01());
    CHECK(a.act1.uniform01() == b.act1.uniform01());
    CHECK(a.act2.uniform01() == b.act2.uniform01());
    CHECK(a.train1.uniform01() == b.train1.uniform01());
    CHECK(a.train2.uniform01() == b.train2.uniform01());

    SeedStreams c = make_seed_streams(8);
    CHECK(a.env.uniform01() != c.env.uniform01());
}

TEST_CASE("layouts: centralized folds, decentralized splits") {
    ExperimentConfig central = tiny_config(Mode::Centralized);
    central.centralized_width = 48;
    AgentLayout lc = layout_for(central, 0);
    CHECK(lc.mode == Mode::Centralized);
    CHECK(lc.own_state_dim == 4);
    CHECK(lc.partner_state_dim == 0);
    CHECK(lc.own_action_dim == 4);
    CHECK(lc.partner_action_dim == 0);
    CHECK(lc.hidden_width == 48);
    CHECK(learner_count(central) == 1);

    ExperimentConfig decen = tiny_config(Mode::Decentralized);
    decen.decentralized_width = 24;
    for (std::size_t i : {std::size_t(0), std::size_t(1)}) {
        AgentLayout ld = layout_for(decen, i);
        CHECK(ld.mode == Mode::Decentralized);
        CHECK(ld.own_state_dim == 2);
        CHECK(ld.partner_state_dim == 2);
        CHECK(ld.own_action_dim == 2);
        CHECK(ld.partner_action_dim == 2);
        CHECK(ld.hidden_width == 24);
    }
    CHECK(learner_count(decen) == 2);

    decen.partner = PartnerKind::Scripted;
    CHECK(learner_count(decen) == 1);
}

TEST_CASE("training produces gapless records and a loadable checkpoint") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    TrainResult res = run_training(cfg, 5);

    REQUIRE(res.records.size() == 3);
    for (std::size_t i = 0; i < res.records.size(); ++i) {
        const MetricsRecord& r = res.records[i];
        CHECK(r.seed == 5);
        CHECK(r.episode == i + 1);
        CHECK(r.episode_length >= 1);
        CHECK(r.episode_length <= 10);
        CHECK((r.done_reason == DoneReason::HorizonReached ||
               r.done_reason == DoneReason::SafetyTermination));
        if (r.done_reason == DoneReason::HorizonReached)
            CHECK(r.episode_length == 10);
    }
    CHECK(res.checkpoint.seed == 5);
    REQUIRE(res.checkpoint.agents.size() == 2);
    // Learners actually trained: step counters moved.
    CHECK(res.checkpoint.agents[0].train_step_count() > 0);
    CHECK(res.checkpoint.agents[1].train_step_count() > 0);
}

TEST_CASE("identical seeds give identical runs, different seeds differ") {
    ExperimentConfig cfg = tiny_config(Mode::Centralized);
    TrainResult a = run_training(cfg, 11);
    TrainResult b = run_training(cfg, 11);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        CHECK(a.records[i].episode_return == b.records[i].episode_return);
        CHECK(a.records[i].episode_length == b.records[i].episode_length);
    }
    CHECK(agent_param_snapshot(a.checkpoint.agents[0]) ==
          agent_param_snapshot(b.checkpoint.agents[0]));

    TrainResult c = run_training(cfg, 12);
    CHECK(agent_param_snapshot(a.checkpoint.agents[0]) !=
          agent_param_snapshot(c.checkpoint.agents[0]));
}

TEST_CASE("scripted-partner training runs a single learner") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    cfg.partner = PartnerKind::Scripted;
    TrainResult res = run_training(cfg, 3);
    CHECK(res.checkpoint.agents.size() == 1);
    CHECK(res.checkpoint.agents[0].has_estimator());
}

TEST_CASE("evaluation is deterministic and reports heights") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    TrainResult trained = run_training(cfg, 2);

    EvalOptions opts;
    opts.episodes = 3;
    const auto eval1 = run_eval(trained.checkpoint, opts);
    const auto eval2 = run_eval(trained.checkpoint, opts);
    REQUIRE(eval1.size() == 3);
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK(eval1[i].episode_return == eval2[i].episode_return);
        CHECK(eval1[i].episode_length == eval2[i].episode_length);
        REQUIRE(eval1[i].final_height.has_value());
        CHECK(*eval1[i].final_height >= 0.0);
        CHECK(*eval1[i].final_height <= 1.5);
        CHECK_FALSE(eval1[i].aen_mse.has_value()); // no scripted ground truth
    }
    // With zero reset noise every eval episode is the same rollout.
    CHECK(eval1[0].episode_return == eval1[1].episode_return);
}

TEST_CASE("evaluation against a scripted partner reports estimator error") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    cfg.partner = PartnerKind::Scripted;
    TrainResult trained = run_training(cfg, 2);
    EvalOptions opts;
    opts.episodes = 2;
    const auto recs = run_eval(trained.checkpoint, opts);
    REQUIRE(recs.size() == 2);
    for (const auto& r : recs) {
        REQUIRE(r.aen_mse.has_value());
        CHECK(*r.aen_mse >= 0.0);
        CHECK(*r.aen_mse <= 0.08 * 0.08); // bounded actions bound the error
    }
}

TEST_CASE("evaluation writes a pipeline-ready trace of the first episode") {
    ExperimentConfig cfg = tiny_config(Mode::Centralized);
    TrainResult trained = run_training(cfg, 4);
    EvalOptions opts;
    opts.episodes = 2;
    opts.trace_path = temp_path("lift_trace_test.csv");
    const auto recs = run_eval(trained.checkpoint, opts);

    const std::string text = slurp(opts.trace_path);
    CHECK(text.find("# kind = commands") != std::string::npos);
    CHECK(text.find("a1x") != std::string::npos);
    std::size_t data_rows = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || line.find("a1x") != std::string::npos)
            continue;
        ++data_rows;
        CHECK(std::count(line.begin(), line.end(), ',') == 3); // 4 columns
    }
    CHECK(data_rows == recs[0].episode_length);
    std::filesystem::remove(opts.trace_path);
}

TEST_CASE("evaluation rejects a checkpoint whose nets mismatch its config") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    TrainResult trained = run_training(cfg, 6);
    // Claim a different width than the agents were built with.
    trained.checkpoint.config.decentralized_width = 16;
    EvalOptions opts;
    opts.episodes = 1;
    CHECK_THROWS_AS(run_eval(trained.checkpoint, opts), CheckpointError);
}

TEST_CASE("finetuning tightens the safety band") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    TrainResult trained = run_training(cfg, 9);
    const double old_delta = trained.checkpoint.config.env.safety_delta;

    SUBCASE("zero extra steps only rewrites the margin") {
        const auto before = agent_param_snapshot(trained.checkpoint.agents[0]);
        FinetuneResult ft = resume_finetune(trained.checkpoint, old_delta / 2, 0);
        CHECK(ft.records.empty());
        CHECK(ft.checkpoint.config.env.safety_delta == old_delta / 2);
        CHECK(agent_param_snapshot(ft.checkpoint.agents[0]) == before);
        CHECK(ft.checkpoint.agents.size() == trained.checkpoint.agents.size());
    }
    SUBCASE("training steps change the learners and log episodes") {
        FinetuneResult ft = resume_finetune(trained.checkpoint, old_delta / 2, 40);
        CHECK_FALSE(ft.records.empty());
        std::uint64_t total = 0;
        for (const auto& r : ft.records) {
            total += r.episode_length;
            CHECK(r.episode >= 1);
        }
        CHECK(total == 40);
        CHECK(agent_param_snapshot(ft.checkpoint.agents[0]) !=
              agent_param_snapshot(trained.checkpoint.agents[0]));
    }
    SUBCASE("widening the band is refused") {
        CHECK_THROWS_AS(resume_finetune(trained.checkpoint, old_delta * 2, 10),
                        ConfigError);
        CHECK_THROWS_AS(resume_finetune(trained.checkpoint, old_delta, 10),
                        ConfigError);
    }
}

TEST_CASE("estimator probe is deterministic and scale-bounded") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    cfg.partner = PartnerKind::Scripted;
    TrainResult trained = run_training(cfg, 13);
    const Agent& agent = trained.checkpoint.agents[0];

    const double m1 = estimator_probe_mse(agent, cfg.env, 64, 99);
    const double m2 = estimator_probe_mse(agent, cfg.env, 64, 99);
    CHECK(m1 == m2);
    CHECK(m1 >= 0.0);
    CHECK(m1 <= 0.08 * 0.08);

    const double m3 = estimator_probe_mse(agent, cfg.env, 64, 100);
    CHECK(m3 != m1); // different probe draw
}

TEST_CASE("metrics files round-trip through write and read") {
    ExperimentConfig cfg = tiny_config(Mode::Decentralized);
    TrainResult res = run_training(cfg, 5);
    const std::string path = temp_path("lift_metrics_roundtrip.csv");
    write_metrics_csv(path, cfg, 5, "train", res.records);

    MetricsFile f = read_metrics_csv(path);
    CHECK(f.kind == "train");
    CHECK(f.header_value("label", "?") == cfg.label);
    CHECK(f.header_value("mode", "?") == "decentralized");
    CHECK(f.header_value("seed", "?") == "5");
    REQUIRE(f.records.size() == res.records.size());
    for (std::size_t i = 0; i < f.records.size(); ++i) {
        CHECK(f.records[i].seed == res.records[i].seed);
        CHECK(f.records[i].episode == res.records[i].episode);
        CHECK(f.records[i].episode_return == res.records[i].episode_return);
        CHECK(f.records[i].episode_length == res.records[i].episode_length);
        CHECK(f.records[i].done_reason == res.records[i].done_reason);
    }

    // Writing the same records twice gives identical bytes.
    const std::string again = temp_path("lift_metrics_roundtrip2.csv");
    write_metrics_csv(again, cfg, 5, "train", res.records);
    CHECK(slurp(path) == slurp(again));
    std::filesystem::remove(path);
    std::filesystem::remove(again);
}

TEST_CASE("summaries count successes against the derived threshold") {
    // Centralized seeds with final medians 100 (best), 90, 84. Threshold
    // 0.85 * 100 = 85: two of three succeed.
    std::vector<MetricsFile> inputs = {
        synthetic_train_file("central", 1, 100.0),
        synthetic_train_file("central", 2, 90.0),
        synthetic_train_file("central", 3, 84.0),
    };
    SummaryOptions opts;
    SummaryResult res = export_summary(inputs, opts);
    REQUIRE(res.rows.size() == 1);
    const SummaryRow& row = res.rows[0];
    CHECK(row.label == "central");
    CHECK(row.num_seeds == 3);
    CHECK(row.threshold == doctest::Approx(85.0));
    CHECK(row.num_success == 2);
    CHECK(row.success_rate == doctest::Approx(2.0 / 3.0));
    CHECK(row.median_final == doctest::Approx(90.0));
    CHECK(row.iqr_low == doctest::Approx(87.0));  // quartiles of {84, 90, 100}
    CHECK(row.iqr_high == doctest::Approx(95.0));

    // An explicit threshold overrides the derived one.
    SummaryOptions fixed;
    fixed.threshold = 95.0;
    SummaryResult res2 = export_summary(inputs, fixed);
    CHECK(res2.rows[0].num_success == 1);
    CHECK(res2.rows[0].threshold == 95.0);
}

TEST_CASE("summaries express success fractions like eight of ten") {
    std::vector<MetricsFile> inputs;
    for (int s = 1; s <= 10; ++s) {
        // Seeds 1 and 2 land below 85% of the best median (100).
        const double level = s <= 2 ? 80.0 : 100.0;
        inputs.push_back(synthetic_train_file("central", std::uint64_t(s), level));
    }
    SummaryResult res = export_summary(inputs, SummaryOptions{});
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].num_seeds == 10);
    CHECK(res.rows[0].num_success == 8);
    CHECK(res.rows[0].success_rate == doctest::Approx(0.8));
}

TEST_CASE("single-seed summaries have a degenerate iqr") {
    std::vector<MetricsFile> inputs = {synthetic_train_file("solo", 1, 50.0)};
    SummaryResult res = export_summary(inputs, SummaryOptions{});
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].median_final == doctest::Approx(50.0));
    CHECK(res.rows[0].iqr_low == doctest::Approx(50.0));
    CHECK(res.rows[0].iqr_high == doctest::Approx(50.0));
}

TEST_CASE("curves follow per-episode medians across seeds") {
    std::vector<MetricsFile> inputs = {
        synthetic_train_file("central", 1, 100.0),
        synthetic_train_file("central", 2, 90.0),
        synthetic_train_file("central", 3, 84.0),
    };
    SummaryResult res = export_summary(inputs, SummaryOptions{});
    REQUIRE_FALSE(res.curves.empty());
    // Twelve episodes, curve_points 200: every episode appears.
    CHECK(res.curves.size() == 12);
    CHECK(res.curves.front().episode == 1);
    CHECK(res.curves.back().episode == 12);
    CHECK(res.curves.front().median_return == doctest::Approx(1.0));
    CHECK(res.curves.back().median_return == doctest::Approx(90.0));
    CHECK(res.curves.back().iqr_low == doctest::Approx(87.0));
    CHECK(res.curves.back().iqr_high == doctest::Approx(95.0));

    // Downsampling keeps the last episode.
    SummaryOptions sparse;
    sparse.curve_points = 4;
    SummaryResult res2 = export_summary(inputs, sparse);
    CHECK(res2.curves.size() <= 4);
    CHECK(res2.curves.back().episode == 12);
}

TEST_CASE("summarizing a summary is idempotent") {
    std::vector<MetricsFile> inputs = {
        synthetic_train_file("central", 1, 100.0),
        synthetic_train_file("central", 2, 90.0),
    };
    SummaryResult first = export_summary(inputs, SummaryOptions{});

    std::ostringstream text;
    write_summary_csv(text, first.rows);

    // Parse the written summary back as a metrics file.
    const std::string path = temp_path("lift_summary_pass.csv");
    {
        std::ofstream out(path, std::ios::binary);
        out << text.str();
    }
    MetricsFile parsed = read_metrics_csv(path);
    CHECK(parsed.kind == "summary");
    SummaryResult second = export_summary({parsed}, SummaryOptions{});

    std::ostringstream text2;
    write_summary_csv(text2, second.rows);
    CHECK(text.str() == text2.str());
    std::filesystem::remove(path);
}

TEST_CASE("summary input must not be empty") {
    CHECK_THROWS_AS(export_summary({}, SummaryOptions{}), ConfigError);
}
