#include "aentd3/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "aentd3/numio.hpp"

namespace aentd3 {

using ordered_json = nlohmann::ordered_json;

const char* partner_kind_name(PartnerKind p) {
    return p == PartnerKind::Learned ? "learned" : "scripted";
}

PartnerKind partner_kind_from_name(const std::string& name) {
    if (name == "learned") return PartnerKind::Learned;
    if (name == "scripted") return PartnerKind::Scripted;
    throw ConfigError("unknown partner kind: " + name);
}

void ExperimentConfig::validate() const {
    hyper.validate();
    env.validate();
    if (label.find(',') != std::string::npos ||
        label.find('\n') != std::string::npos)
        throw ConfigError("label must not contain commas or newlines");
    if (!(opt.critic_lr > 0 && opt.actor_lr > 0 && opt.aen_lr > 0))
        throw ConfigError("learning rates must be positive");
    if (!(opt.head_init_scale > 0))
        throw ConfigError("head_init_scale must be positive");
    if (centralized_width == 0 || decentralized_width == 0)
        throw ConfigError("network widths must be positive");
    if (seeds.empty()) throw ConfigError("seeds must be non-empty");
    if (success_window < 1) throw ConfigError("success_window must be >= 1");
    if (!(success_threshold_factor > 0))
        throw ConfigError("success_threshold_factor must be positive");
    if (buffer_capacity == 0)
        throw ConfigError("buffer_capacity must be positive");
    if (hyper.horizon != env.horizon)
        throw ConfigError("hyperparams and env disagree on the horizon");
    if (hyper.action_bounds.low != env.action_bounds.low ||
        hyper.action_bounds.high != env.action_bounds.high)
        throw ConfigError("hyperparams and env disagree on action bounds");
    if (mode == Mode::Centralized && partner == PartnerKind::Scripted)
        throw ConfigError("a scripted partner requires decentralized mode");
    if (metrics_path.empty() || checkpoint_path.empty())
        throw ConfigError("metrics_path and checkpoint_path must be set");
    if (seeds.size() > 1) {
        if (metrics_path.find("{seed}") == std::string::npos ||
            checkpoint_path.find("{seed}") == std::string::npos)
            throw ConfigError("with multiple seeds, metrics_path and "
                              "checkpoint_path need a {seed} placeholder");
    }
}

std::string expand_seed_path(const std::string& pattern, std::uint64_t seed) {
    std::string out = pattern;
    const std::string token = "{seed}";
    for (std::size_t pos = out.find(token); pos != std::string::npos;
         pos = out.find(token, pos))
        out.replace(pos, token.size(), format_u64(seed));
    return out;
}

namespace {

void parse_hyper(const ordered_json& j, Hyperparams& h) {
    for (const auto& [key, value] : j.items()) {
        if (key == "gamma") h.gamma = value.get<double>();
        else if (key == "tau") h.tau = value.get<double>();
        else if (key == "explore_sigma") h.explore_sigma = value.get<double>();
        else if (key == "target_sigma") h.target_sigma = value.get<double>();
        else if (key == "noise_clip") h.noise_clip = value.get<double>();
        else if (key == "policy_delay") h.policy_delay = value.get<int>();
        else if (key == "batch_size") h.batch_size = value.get<int>();
        else if (key == "episodes") h.episodes = value.get<int>();
        else if (key == "horizon") h.horizon = value.get<int>();
        else if (key == "action_low") h.action_bounds.low = value.get<double>();
        else if (key == "action_high")
            h.action_bounds.high = value.get<double>();
        else if (key == "recompute_partner_estimate")
            h.recompute_partner_estimate = value.get<bool>();
        else throw ConfigError("unknown hyper key: " + key);
    }
}

void parse_optimizer(const ordered_json& j, OptimizerSettings& o) {
    for (const auto& [key, value] : j.items()) {
        if (key == "critic_lr") o.critic_lr = value.get<double>();
        else if (key == "actor_lr") o.actor_lr = value.get<double>();
        else if (key == "aen_lr") o.aen_lr = value.get<double>();
        else if (key == "head_init_scale")
            o.head_init_scale = value.get<double>();
        else throw ConfigError("unknown optimizer key: " + key);
    }
}

Interval parse_interval(const ordered_json& j, const std::string& key) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(key + " must be a [lo, hi] pair");
    return {j[0].get<double>(), j[1].get<double>()};
}

// horizon and action bounds live in the hyper section; the env mirrors
// them after parsing so the two views can never drift in a loaded config.
void parse_env(const ordered_json& j, EnvConfig& e) {
    for (const auto& [key, value] : j.items()) {
        if (key == "safety_delta") e.safety_delta = value.get<double>();
        else if (key == "initial_separation")
            e.initial_separation = value.get<double>();
        else if (key == "start_height") e.start_height = value.get<double>();
        else if (key == "target_height") e.target_height = value.get<double>();
        else if (key == "workspace_x")
            e.workspace_x = parse_interval(value, key);
        else if (key == "workspace_z")
            e.workspace_z = parse_interval(value, key);
        else if (key == "tilt_weight") e.tilt_weight = value.get<double>();
        else if (key == "reset_noise") e.reset_noise = value.get<double>();
        else throw ConfigError("unknown env key: " + key);
    }
}

} // namespace

ExperimentConfig config_from_json_text(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be an object");

    ExperimentConfig cfg;
    try {
        for (const auto& [key, value] : j.items()) {
            if (key == "label") cfg.label = value.get<std::string>();
            else if (key == "mode")
                cfg.mode = mode_from_name(value.get<std::string>());
            else if (key == "partner")
                cfg.partner = partner_kind_from_name(value.get<std::string>());
            else if (key == "hyper") parse_hyper(value, cfg.hyper);
            else if (key == "optimizer") parse_optimizer(value, cfg.opt);
            else if (key == "env") parse_env(value, cfg.env);
            else if (key == "centralized_width")
                cfg.centralized_width = value.get<std::size_t>();
            else if (key == "decentralized_width")
                cfg.decentralized_width = value.get<std::size_t>();
            else if (key == "seeds")
                cfg.seeds = value.get<std::vector<std::uint64_t>>();
            else if (key == "learning_starts")
                cfg.learning_starts = value.get<std::uint64_t>();
            else if (key == "buffer_capacity")
                cfg.buffer_capacity = value.get<std::size_t>();
            else if (key == "success_window")
                cfg.success_window = value.get<int>();
            else if (key == "success_threshold_factor")
                cfg.success_threshold_factor = value.get<double>();
            else if (key == "metrics_path")
                cfg.metrics_path = value.get<std::string>();
            else if (key == "checkpoint_path")
                cfg.checkpoint_path = value.get<std::string>();
            else throw ConfigError("unknown config key: " + key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }

    if (cfg.label.empty()) cfg.label = mode_name(cfg.mode);
    cfg.env.horizon = cfg.hyper.horizon;
    cfg.env.action_bounds = cfg.hyper.action_bounds;
    cfg.validate();
    return cfg;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read config file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return config_from_json_text(buf.str());
}

std::string config_to_json_text(const ExperimentConfig& cfg) {
    ordered_json j;
    j["label"] = cfg.label.empty() ? mode_name(cfg.mode) : cfg.label;
    j["mode"] = mode_name(cfg.mode);
    j["partner"] = partner_kind_name(cfg.partner);
    j["hyper"] = {{"gamma", cfg.hyper.gamma},
                  {"tau", cfg.hyper.tau},
                  {"explore_sigma", cfg.hyper.explore_sigma},
                  {"target_sigma", cfg.hyper.target_sigma},
                  {"noise_clip", cfg.hyper.noise_clip},
                  {"policy_delay", cfg.hyper.policy_delay},
                  {"batch_size", cfg.hyper.batch_size},
                  {"episodes", cfg.hyper.episodes},
                  {"horizon", cfg.hyper.horizon},
                  {"action_low", cfg.hyper.action_bounds.low},
                  {"action_high", cfg.hyper.action_bounds.high},
                  {"recompute_partner_estimate",
                   cfg.hyper.recompute_partner_estimate}};
    j["optimizer"] = {{"critic_lr", cfg.opt.critic_lr},
                      {"actor_lr", cfg.opt.actor_lr},
                      {"aen_lr", cfg.opt.aen_lr},
                      {"head_init_scale", cfg.opt.head_init_scale}};
    j["env"] = {{"safety_delta", cfg.env.safety_delta},
                {"initial_separation", cfg.env.initial_separation},
                {"start_height", cfg.env.start_height},
                {"target_height", cfg.env.target_height},
                {"workspace_x", {cfg.env.workspace_x.lo, cfg.env.workspace_x.hi}},
                {"workspace_z", {cfg.env.workspace_z.lo, cfg.env.workspace_z.hi}},
                {"tilt_weight", cfg.env.tilt_weight},
                {"reset_noise", cfg.env.reset_noise}};
    j["centralized_width"] = cfg.centralized_width;
    j["decentralized_width"] = cfg.decentralized_width;
    j["seeds"] = cfg.seeds;
    j["learning_starts"] = cfg.learning_starts;
    j["buffer_capacity"] = cfg.buffer_capacity;
    j["success_window"] = cfg.success_window;
    j["success_threshold_factor"] = cfg.success_threshold_factor;
    j["metrics_path"] = cfg.metrics_path;
    j["checkpoint_path"] = cfg.checkpoint_path;
    return j.dump();
}

std::vector<std::string> config_echo_lines(const ExperimentConfig& cfg) {
    std::vector<std::string> lines;
    auto add = [&lines](const std::string& key, const std::string& value) {
        lines.push_back(key + " = " + value);
    };
    add("label", cfg.label.empty() ? mode_name(cfg.mode) : cfg.label);
    add("mode", mode_name(cfg.mode));
    add("partner", partner_kind_name(cfg.partner));
    add("gamma", format_double(cfg.hyper.gamma));
    add("tau", format_double(cfg.hyper.tau));
    add("explore_sigma", format_double(cfg.hyper.explore_sigma));
    add("target_sigma", format_double(cfg.hyper.target_sigma));
    add("noise_clip", format_double(cfg.hyper.noise_clip));
    add("policy_delay", format_u64(static_cast<std::uint64_t>(cfg.hyper.policy_delay)));
    add("batch_size", format_u64(static_cast<std::uint64_t>(cfg.hyper.batch_size)));
    add("episodes", format_u64(static_cast<std::uint64_t>(cfg.hyper.episodes)));
    add("horizon", format_u64(static_cast<std::uint64_t>(cfg.hyper.horizon)));
    add("action_low", format_double(cfg.hyper.action_bounds.low));
    add("action_high", format_double(cfg.hyper.action_bounds.high));
    add("recompute_partner_estimate",
        cfg.hyper.recompute_partner_estimate ? "1" : "0");
    add("critic_lr", format_double(cfg.opt.critic_lr));
    add("actor_lr", format_double(cfg.opt.actor_lr));
    add("aen_lr", format_double(cfg.opt.aen_lr));
    add("head_init_scale", format_double(cfg.opt.head_init_scale));
    add("safety_delta", format_double(cfg.env.safety_delta));
    add("initial_separation", format_double(cfg.env.initial_separation));
    add("start_height", format_double(cfg.env.start_height));
    add("target_height", format_double(cfg.env.target_height));
    add("workspace_x", format_double(cfg.env.workspace_x.lo) + " " +
                           format_double(cfg.env.workspace_x.hi));
    add("workspace_z", format_double(cfg.env.workspace_z.lo) + " " +
                           format_double(cfg.env.workspace_z.hi));
    add("tilt_weight", format_double(cfg.env.tilt_weight));
    add("reset_noise", format_double(cfg.env.reset_noise));
    add("centralized_width", format_u64(cfg.centralized_width));
    add("decentralized_width", format_u64(cfg.decentralized_width));
    {
        std::string s;
        for (std::size_t i = 0; i < cfg.seeds.size(); ++i) {
            if (i) s += " ";
            s += format_u64(cfg.seeds[i]);
        }
        add("seeds", s);
    }
    add("learning_starts", format_u64(cfg.learning_starts));
    add("buffer_capacity", format_u64(cfg.buffer_capacity));
    add("success_window", format_u64(static_cast<std::uint64_t>(cfg.success_window)));
    add("success_threshold_factor",
        format_double(cfg.success_threshold_factor));
    return lines;
}

} // namespace aentd3
