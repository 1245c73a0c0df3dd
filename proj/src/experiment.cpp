#include "aentd3/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "aentd3/errors.hpp"
#include "aentd3/lift_env.hpp"
#include "aentd3/numio.hpp"

namespace aentd3 {
namespace {

// The environment is two effectors in the x-z plane.
constexpr std::size_t kEffectorDim = 2;
constexpr std::size_t kFullStateDim = 4;

std::vector<double> joined_state(const StatePartition& p) {
    std::vector<double> s;
    s.reserve(p.own.size() + p.partner.size());
    s.insert(s.end(), p.own.begin(), p.own.end());
    s.insert(s.end(), p.partner.begin(), p.partner.end());
    return s;
}

bool layouts_equal(const AgentLayout& a, const AgentLayout& b) {
    return a.mode == b.mode && a.own_state_dim == b.own_state_dim &&
           a.partner_state_dim == b.partner_state_dim &&
           a.own_action_dim == b.own_action_dim &&
           a.partner_action_dim == b.partner_action_dim &&
           a.hidden_width == b.hidden_width;
}

void check_checkpoint_layouts(const TrainingCheckpoint& ckpt) {
    if (ckpt.agents.size() != learner_count(ckpt.config))
        throw CheckpointError(
            "checkpoint learner count does not match its config");
    for (std::size_t i = 0; i < ckpt.agents.size(); ++i)
        if (!layouts_equal(ckpt.agents[i].layout(), layout_for(ckpt.config, i)))
            throw CheckpointError(
                "checkpoint learner layout does not match its config");
}

// Data collection and per-step updates shared by fresh training and
// fine-tuning. Owns the environment state and the replay buffers; the
// learners and streams stay with the caller.
class TrainingLoop {
public:
    TrainingLoop(const ExperimentConfig& cfg, std::vector<Agent>& agents,
                 SeedStreams& streams)
        : hp_(cfg.hyper), env_(cfg.env),
          central_(cfg.mode == Mode::Centralized),
          scripted_(cfg.partner == PartnerKind::Scripted), agents_(agents),
          streams_(streams) {
        for (const Agent& a : agents_) {
            const AgentLayout& l = a.layout();
            buffers_.emplace_back(cfg.buffer_capacity, l.state_dim(),
                                  l.own_action_dim, l.partner_action_dim);
        }
        state_ = reset(env_, streams_.env);
    }

    const EnvState& state() const { return state_; }
    void reset_episode() { state_ = reset(env_, streams_.env); }

    // One warm-up step: uniform-random commands stored without any
    // update; a finished episode rolls straight into a fresh one.
    void warmup_step() {
        if (state_.done()) reset_episode();
        collect(true);
    }

    // One training step at within-episode index t (1-based): collect a
    // transition with exploration noise, then update every learner once.
    // Returns the step reward.
    double train_step(std::uint64_t t) {
        const StepResult sr = collect(false);
        agents_[0].train_step(buffers_[0], hp_, t, streams_.train1);
        if (agents_.size() > 1)
            agents_[1].train_step(buffers_[1], hp_, t, streams_.train2);
        return sr.reward;
    }

private:
    std::vector<double> uniform_action(Rng& rng, std::size_t dim) const {
        std::vector<double> a(dim);
        for (double& v : a)
            v = rng.uniform(hp_.action_bounds.low, hp_.action_bounds.high);
        return a;
    }

    // Chooses both effector commands from the current state, advances the
    // environment, and stores each learner's view of the transition.
    // Draw order per step is fixed: first learner's action stream, then
    // the second's (the scripted partner draws nothing).
    StepResult collect(bool uniform) {
        StepResult sr;
        if (central_) {
            const std::vector<double> joint =
                uniform ? uniform_action(streams_.act1, 2 * kEffectorDim)
                        : agents_[0].select_action(state_vector(state_),
                                                   hp_.explore_sigma,
                                                   streams_.act1);
            const std::span<const double> a1(joint.data(), kEffectorDim);
            const std::span<const double> a2(joint.data() + kEffectorDim,
                                             kEffectorDim);
            sr = step(state_, a1, a2, env_);
            Transition t;
            t.state = state_vector(state_);
            t.own_action = joint;
            t.reward = sr.reward;
            t.next_state = state_vector(sr.next_state);
            t.terminated = sr.done_reason == DoneReason::SafetyTermination;
            buffers_[0].push(t);
            state_ = sr.next_state;
            return sr;
        }

        const StatePartition p1 = state_partition(state_, 1);
        const std::vector<double> est1 =
            agents_[0].estimate_partner_action(p1.partner);
        const std::vector<double> a1 =
            uniform ? uniform_action(streams_.act1, kEffectorDim)
                    : agents_[0].select_action(p1.own, hp_.explore_sigma,
                                               streams_.act1);
        StatePartition p2;
        std::vector<double> est2, a2;
        if (scripted_) {
            const auto sa = scripted_partner(state_, env_);
            a2.assign(sa.begin(), sa.end());
        } else {
            p2 = state_partition(state_, 2);
            est2 = agents_[1].estimate_partner_action(p2.partner);
            a2 = uniform ? uniform_action(streams_.act2, kEffectorDim)
                         : agents_[1].select_action(p2.own, hp_.explore_sigma,
                                                    streams_.act2);
        }
        sr = step(state_, a1, a2, env_);
        const bool term = sr.done_reason == DoneReason::SafetyTermination;

        Transition t1;
        t1.state = joined_state(p1);
        t1.own_action = a1;
        t1.partner_estimate = est1;
        t1.reward = sr.reward;
        t1.next_state = joined_state(state_partition(sr.next_state, 1));
        t1.terminated = term;
        buffers_[0].push(t1);
        if (!scripted_) {
            Transition t2;
            t2.state = joined_state(p2);
            t2.own_action = a2;
            t2.partner_estimate = est2;
            t2.reward = sr.reward;
            t2.next_state = joined_state(state_partition(sr.next_state, 2));
            t2.terminated = term;
            buffers_[1].push(t2);
        }
        state_ = sr.next_state;
        return sr;
    }

    const Hyperparams& hp_;
    const EnvConfig& env_;
    bool central_, scripted_;
    std::vector<Agent>& agents_;
    SeedStreams& streams_;
    std::vector<ReplayBuffer> buffers_;
    EnvState state_;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

} // namespace

SeedStreams make_seed_streams(std::uint64_t seed) {
    Rng root(seed);
    // Braced-list evaluation order is left to right, which freezes the
    // stream layout: env, init1, init2, act1, act2, train1, train2.
    return SeedStreams{root.split(), root.split(), root.split(), root.split(),
                       root.split(), root.split(), root.split()};
}

AgentLayout layout_for(const ExperimentConfig& cfg, std::size_t agent_index) {
    if (agent_index >= learner_count(cfg))
        throw ConfigError("no learner with this index under this config");
    AgentLayout l;
    if (cfg.mode == Mode::Centralized) {
        l.mode = Mode::Centralized;
        l.own_state_dim = kFullStateDim;
        l.partner_state_dim = 0;
        l.own_action_dim = 2 * kEffectorDim;
        l.partner_action_dim = 0;
    } else {
        l.mode = Mode::Decentralized;
        l.own_state_dim = kEffectorDim;
        l.partner_state_dim = kEffectorDim;
        l.own_action_dim = kEffectorDim;
        l.partner_action_dim = kEffectorDim;
    }
    l.hidden_width = cfg.hidden_width();
    return l;
}

std::size_t learner_count(const ExperimentConfig& cfg) {
    if (cfg.mode == Mode::Centralized) return 1;
    return cfg.partner == PartnerKind::Scripted ? 1 : 2;
}

std::vector<Agent> make_initial_agents(const ExperimentConfig& cfg,
                                       SeedStreams& streams) {
    std::vector<Agent> agents;
    agents.reserve(learner_count(cfg));
    agents.emplace_back(layout_for(cfg, 0), cfg.hyper.action_bounds, cfg.opt,
                        streams.init1);
    if (learner_count(cfg) > 1)
        agents.emplace_back(layout_for(cfg, 1), cfg.hyper.action_bounds,
                            cfg.opt, streams.init2);
    return agents;
}

TrainResult run_training(const ExperimentConfig& cfg, std::uint64_t seed) {
    cfg.validate();
    SeedStreams streams = make_seed_streams(seed);
    std::vector<Agent> agents = make_initial_agents(cfg, streams);
    TrainingLoop loop(cfg, agents, streams);

    for (std::uint64_t i = 0; i < cfg.learning_starts; ++i) loop.warmup_step();

    std::vector<MetricsRecord> records;
    records.reserve(static_cast<std::size_t>(cfg.hyper.episodes));
    for (int m = 1; m <= cfg.hyper.episodes; ++m) {
        const auto t0 = std::chrono::steady_clock::now();
        loop.reset_episode();
        double ep_return = 0.0;
        std::uint64_t steps = 0;
        while (!loop.state().done()) {
            ++steps;
            ep_return += loop.train_step(steps);
        }
        MetricsRecord r;
        r.seed = seed;
        r.episode = static_cast<std::uint64_t>(m);
        r.episode_return = ep_return;
        r.episode_length = steps;
        r.done_reason = loop.state().done_reason;
        r.wall_time_s = seconds_since(t0);
        records.push_back(std::move(r));
        if (m % 1000 == 0 || m == cfg.hyper.episodes) {
            const int lo = std::max(0, m - 1000);
            double len_sum = 0.0;
            double ret_sum = 0.0;
            for (int i = lo; i < m; ++i) {
                len_sum += static_cast<double>(records[static_cast<std::size_t>(i)].episode_length);
                ret_sum += records[static_cast<std::size_t>(i)].episode_return;
            }
            const double n = static_cast<double>(m - lo);
            std::fprintf(stderr, "train: episode %d/%d  mean_len %.1f  mean_return %.2f\n",
                         m, cfg.hyper.episodes, len_sum / n, ret_sum / n);
        }
    }

    TrainResult out;
    out.records = std::move(records);
    out.checkpoint.config = cfg;
    out.checkpoint.seed = seed;
    out.checkpoint.agents = std::move(agents);
    return out;
}

std::vector<MetricsRecord> run_eval(const TrainingCheckpoint& ckpt,
                                    const EvalOptions& opts) {
    ckpt.config.validate();
    check_checkpoint_layouts(ckpt);
    if (opts.episodes < 1) throw ConfigError("eval episodes must be >= 1");

    const bool central = ckpt.config.mode == Mode::Centralized;
    const bool scripted = ckpt.config.partner == PartnerKind::Scripted;
    EnvConfig env = ckpt.config.env;
    env.reset_noise = 0.0;
    Rng no_noise(0); // zero reset noise consumes no draws

    std::vector<MetricsRecord> records;
    std::vector<std::array<double, 4>> trace;
    for (int e = 1; e <= opts.episodes; ++e) {
        const auto t0 = std::chrono::steady_clock::now();
        EnvState st = reset(env, no_noise);
        double ep_return = 0.0, mse_total = 0.0;
        std::uint64_t steps = 0;
        while (!st.done()) {
            ++steps;
            std::vector<double> a1, a2;
            if (central) {
                const std::vector<double> joint =
                    ckpt.agents[0].policy_action(state_vector(st));
                a1.assign(joint.begin(), joint.begin() + kEffectorDim);
                a2.assign(joint.begin() + kEffectorDim, joint.end());
            } else {
                const StatePartition p1 = state_partition(st, 1);
                a1 = ckpt.agents[0].policy_action(p1.own);
                if (scripted) {
                    const auto sa = scripted_partner(st, env);
                    a2.assign(sa.begin(), sa.end());
                    const std::vector<double> est =
                        ckpt.agents[0].estimate_partner_action(p1.partner);
                    double sq = 0.0;
                    for (std::size_t c = 0; c < est.size(); ++c) {
                        const double d = est[c] - a2[c];
                        sq += d * d;
                    }
                    mse_total += sq / static_cast<double>(est.size());
                } else {
                    const StatePartition p2 = state_partition(st, 2);
                    a2 = ckpt.agents[1].policy_action(p2.own);
                }
            }
            if (e == 1 && !opts.trace_path.empty())
                trace.push_back({a1[0], a1[1], a2[0], a2[1]});
            const StepResult sr = step(st, a1, a2, env);
            ep_return += sr.reward;
            st = sr.next_state;
        }
        MetricsRecord r;
        r.seed = ckpt.seed;
        r.episode = static_cast<std::uint64_t>(e);
        r.episode_return = ep_return;
        r.episode_length = steps;
        r.done_reason = st.done_reason;
        r.final_height = st.beam_height();
        if (scripted) r.aen_mse = mse_total / static_cast<double>(steps);
        r.wall_time_s = seconds_since(t0);
        records.push_back(std::move(r));
    }

    if (!opts.trace_path.empty()) {
        std::ofstream f(opts.trace_path);
        if (!f) throw IoError("cannot write trace file: " + opts.trace_path);
        f << "# kind = commands\n# columns = a1x a1z a2x a2z\n";
        for (const auto& row : trace)
            f << format_double(row[0]) << ',' << format_double(row[1]) << ','
              << format_double(row[2]) << ',' << format_double(row[3]) << '\n';
        f.flush();
        if (!f)
            throw IoError("failed while writing trace file: " +
                          opts.trace_path);
    }
    return records;
}

FinetuneResult resume_finetune(const TrainingCheckpoint& src, double new_delta,
                               std::uint64_t extra_steps) {
    src.config.validate();
    check_checkpoint_layouts(src);
    if (!(new_delta < src.config.env.safety_delta))
        throw ConfigError(
            "fine-tuning requires a strictly tightened safety_delta");

    FinetuneResult out;
    out.checkpoint.config = src.config;
    out.checkpoint.config.env.safety_delta = new_delta;
    out.checkpoint.config.validate();
    out.checkpoint.seed = src.seed;
    out.checkpoint.agents = src.agents;
    if (extra_steps == 0) return out;

    const ExperimentConfig& cfg = out.checkpoint.config;
    SeedStreams streams = make_seed_streams(src.seed);
    TrainingLoop loop(cfg, out.checkpoint.agents, streams);

    std::uint64_t remaining = extra_steps;
    std::uint64_t episode = 0;
    while (remaining > 0) {
        const auto t0 = std::chrono::steady_clock::now();
        ++episode;
        loop.reset_episode();
        double ep_return = 0.0;
        std::uint64_t steps = 0;
        while (!loop.state().done() && remaining > 0) {
            ++steps;
            --remaining;
            ep_return += loop.train_step(steps);
        }
        MetricsRecord r;
        r.seed = src.seed;
        r.episode = episode;
        r.episode_return = ep_return;
        r.episode_length = steps;
        r.done_reason = loop.state().done_reason;
        r.wall_time_s = seconds_since(t0);
        out.records.push_back(std::move(r));
    }
    return out;
}

double estimator_probe_mse(const Agent& agent, const EnvConfig& env,
                           int n_states, std::uint64_t probe_seed) {
    if (n_states < 1) throw ConfigError("probe needs at least one state");
    Rng rng(probe_seed);
    // Ladder of beam heights from the start height up past the target, so
    // the probe sees the partner both lifting and holding.
    const int levels = 10;
    const double span = 1.2 * (env.target_height - env.start_height);
    double total = 0.0;
    for (int i = 0; i < n_states; ++i) {
        EnvState st = reset(env, rng);
        const double lift =
            span * static_cast<double>(i % levels) / (levels - 1);
        st.z1 = std::clamp(st.z1 + lift, env.workspace_z.lo,
                           env.workspace_z.hi);
        st.z2 = std::clamp(st.z2 + lift, env.workspace_z.lo,
                           env.workspace_z.hi);
        const auto truth = scripted_partner(st, env);
        const StatePartition part = state_partition(st, 1);
        const std::vector<double> est =
            agent.estimate_partner_action(part.partner);
        if (est.size() != truth.size())
            throw ShapeError("estimator output does not match the partner "
                             "action dimension");
        double sq = 0.0;
        for (std::size_t c = 0; c < est.size(); ++c) {
            const double d = est[c] - truth[c];
            sq += d * d;
        }
        total += sq / static_cast<double>(est.size());
    }
    return total / static_cast<double>(n_states);
}

namespace {

// Linear-interpolation quantile on a copy (p in [0, 1], v non-empty).
double quantile(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    const double pos = p * static_cast<double>(v.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= v.size()) return v.back();
    const double frac = pos - static_cast<double>(lo);
    return v[lo] + frac * (v[lo + 1] - v[lo]);
}

struct Group {
    std::string label;
    std::string mode;
    int window = 100;
    double factor = 0.85;
    // Per seed: (episode, return) pairs in file order.
    std::map<std::uint64_t, std::vector<std::pair<std::uint64_t, double>>>
        by_seed;
};

double final_window_median(
    std::vector<std::pair<std::uint64_t, double>> series, int window) {
    std::stable_sort(series.begin(), series.end(),
                     [](const auto& a, const auto& b) {
                         return a.first < b.first;
                     });
    const std::size_t w =
        std::min<std::size_t>(static_cast<std::size_t>(window), series.size());
    std::vector<double> tail;
    tail.reserve(w);
    for (std::size_t i = series.size() - w; i < series.size(); ++i)
        tail.push_back(series[i].second);
    return quantile(std::move(tail), 0.5);
}

std::size_t find_column(const MetricsFile& f, const std::string& name) {
    const auto it = std::find(f.columns.begin(), f.columns.end(), name);
    if (it == f.columns.end())
        throw ShapeError("file " + f.path + " lacks column " + name);
    return static_cast<std::size_t>(it - f.columns.begin());
}

} // namespace

SummaryResult export_summary(const std::vector<MetricsFile>& inputs,
                             const SummaryOptions& opts) {
    if (inputs.empty())
        throw ConfigError("summarize needs at least one metrics file");
    if (opts.curve_points < 1)
        throw ConfigError("curve_points must be positive");

    SummaryResult result;
    std::vector<Group> groups;
    std::map<std::string, std::size_t> group_index;

    for (const MetricsFile& f : inputs) {
        if (f.kind == "summary") {
            // Already aggregated: pass the rows through untouched.
            const std::size_t c_label = find_column(f, "label");
            const std::size_t c_mode = find_column(f, "mode");
            const std::size_t c_seeds = find_column(f, "num_seeds");
            const std::size_t c_succ = find_column(f, "num_success");
            const std::size_t c_rate = find_column(f, "success_rate");
            const std::size_t c_thresh = find_column(f, "threshold");
            const std::size_t c_median = find_column(f, "median_final");
            const std::size_t c_lo = find_column(f, "iqr_low");
            const std::size_t c_hi = find_column(f, "iqr_high");
            for (const auto& row : f.raw_rows) {
                if (row.size() != f.columns.size())
                    throw ShapeError("ragged row in summary file: " + f.path);
                SummaryRow r;
                r.label = row[c_label];
                r.mode = row[c_mode];
                r.num_seeds = parse_u64(row[c_seeds]);
                r.num_success = parse_u64(row[c_succ]);
                r.success_rate = parse_double(row[c_rate]);
                r.threshold = parse_double(row[c_thresh]);
                r.median_final = parse_double(row[c_median]);
                r.iqr_low = parse_double(row[c_lo]);
                r.iqr_high = parse_double(row[c_hi]);
                result.rows.push_back(std::move(r));
            }
            continue;
        }
        if (f.kind == "curves") {
            const std::size_t c_label = find_column(f, "label");
            const std::size_t c_ep = find_column(f, "episode");
            const std::size_t c_median = find_column(f, "median_return");
            const std::size_t c_lo = find_column(f, "iqr_low");
            const std::size_t c_hi = find_column(f, "iqr_high");
            for (const auto& row : f.raw_rows) {
                if (row.size() != f.columns.size())
                    throw ShapeError("ragged row in curves file: " + f.path);
                CurvePoint p;
                p.label = row[c_label];
                p.episode = parse_u64(row[c_ep]);
                p.median_return = parse_double(row[c_median]);
                p.iqr_low = parse_double(row[c_lo]);
                p.iqr_high = parse_double(row[c_hi]);
                result.curves.push_back(std::move(p));
            }
            continue;
        }
        // Train/eval records: group by label, then seed.
        const std::string label = f.header_value("label", "unlabeled");
        auto [it, fresh] = group_index.try_emplace(label, groups.size());
        if (fresh) {
            Group g;
            g.label = label;
            g.mode = f.header_value("mode", "decentralized");
            g.window =
                static_cast<int>(parse_u64(f.header_value("success_window",
                                                          "100")));
            g.factor =
                parse_double(f.header_value("success_threshold_factor",
                                            "0.85"));
            groups.push_back(std::move(g));
        }
        Group& g = groups[it->second];
        for (const MetricsRecord& r : f.records)
            g.by_seed[r.seed].emplace_back(r.episode, r.episode_return);
    }

    // Per-seed final-window medians per group, and the threshold base:
    // the best such median among centralized runs, falling back to the
    // best overall when no centralized input is present.
    std::vector<std::vector<double>> medians(groups.size());
    bool have_central_base = false;
    double central_base = 0.0, any_base = 0.0;
    bool have_any_base = false;
    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        for (const auto& [s, series] : g.by_seed) {
            const double med = final_window_median(series, g.window);
            medians[gi].push_back(med);
            if (!have_any_base || med > any_base) any_base = med;
            have_any_base = true;
            if (g.mode == "centralized" &&
                (!have_central_base || med > central_base)) {
                central_base = med;
                have_central_base = true;
            }
        }
    }

    for (std::size_t gi = 0; gi < groups.size(); ++gi) {
        const Group& g = groups[gi];
        if (medians[gi].empty()) continue;
        SummaryRow r;
        r.label = g.label;
        r.mode = g.mode;
        r.num_seeds = medians[gi].size();
        if (opts.threshold) {
            r.threshold = *opts.threshold;
        } else {
            const double base =
                have_central_base ? central_base : any_base;
            r.threshold = g.factor * base;
        }
        for (double med : medians[gi])
            if (med >= r.threshold) ++r.num_success;
        r.success_rate = static_cast<double>(r.num_success) /
                         static_cast<double>(r.num_seeds);
        r.median_final = quantile(medians[gi], 0.5);
        r.iqr_low = quantile(medians[gi], 0.25);
        r.iqr_high = quantile(medians[gi], 0.75);
        result.rows.push_back(std::move(r));
    }

    // Downsampled per-episode curves (median and IQR across seeds).
    for (const Group& g : groups) {
        std::map<std::uint64_t, std::vector<double>> by_episode;
        for (const auto& [s, series] : g.by_seed)
            for (const auto& [ep, ret] : series) by_episode[ep].push_back(ret);
        if (by_episode.empty()) continue;
        std::vector<std::uint64_t> episodes;
        episodes.reserve(by_episode.size());
        for (const auto& [ep, v] : by_episode) episodes.push_back(ep);
        const std::size_t n = episodes.size();
        const std::size_t stride =
            (n + static_cast<std::size_t>(opts.curve_points) - 1) /
            static_cast<std::size_t>(opts.curve_points);
        std::vector<std::size_t> picks;
        for (std::size_t i = stride - 1; i < n; i += stride) picks.push_back(i);
        if (picks.empty() || picks.back() != n - 1) picks.push_back(n - 1);
        for (std::size_t i : picks) {
            const std::vector<double>& returns = by_episode[episodes[i]];
            CurvePoint p;
            p.label = g.label;
            p.episode = episodes[i];
            p.median_return = quantile(returns, 0.5);
            p.iqr_low = quantile(returns, 0.25);
            p.iqr_high = quantile(returns, 0.75);
            result.curves.push_back(std::move(p));
        }
    }
    return result;
}

void write_summary_csv(std::ostream& out,
                       const std::vector<SummaryRow>& rows) {
    out << "# kind = summary\n";
    out << "label,mode,num_seeds,num_success,success_rate,threshold,"
           "median_final,iqr_low,iqr_high\n";
    for (const SummaryRow& r : rows)
        out << r.label << ',' << r.mode << ',' << format_u64(r.num_seeds)
            << ',' << format_u64(r.num_success) << ','
            << format_double(r.success_rate) << ','
            << format_double(r.threshold) << ','
            << format_double(r.median_final) << ','
            << format_double(r.iqr_low) << ','
            << format_double(r.iqr_high) << '\n';
}

void write_curves_csv(std::ostream& out,
                      const std::vector<CurvePoint>& pts) {
    out << "# kind = curves\n";
    out << "label,episode,median_return,iqr_low,iqr_high\n";
    for (const CurvePoint& p : pts)
        out << p.label << ',' << format_u64(p.episode) << ','
            << format_double(p.median_return) << ','
            << format_double(p.iqr_low) << ','
            << format_double(p.iqr_high) << '\n';
}

} // namespace aentd3
