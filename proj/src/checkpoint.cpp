#include "aentd3/checkpoint.hpp"

#include <fstream>
#include <sstream>

#include "aentd3/numio.hpp"

namespace aentd3 {
namespace {

constexpr std::size_t kNumbersPerLine = 8;

void write_flat(std::ostream& out, const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        out << format_double(values[i]);
        out << (((i + 1) % kNumbersPerLine == 0 || i + 1 == values.size())
                    ? '\n'
                    : ' ');
    }
}

// Line-oriented token reader with checkpoint-flavoured errors.
class Reader {
public:
    explicit Reader(std::istream& in) : in_(in) {}

    std::string word() {
        std::string w;
        if (!(in_ >> w)) throw CheckpointError("unexpected end of checkpoint");
        return w;
    }

    void expect(const std::string& literal) {
        const std::string w = word();
        if (w != literal)
            throw CheckpointError("expected '" + literal + "', found '" + w +
                                  "'");
    }

    double real() { return parse_double(word()); }
    std::uint64_t integer() { return parse_u64(word()); }

    // Rest of the current line (for embedded one-line payloads).
    std::string line() {
        std::string l;
        if (!std::getline(in_, l))
            throw CheckpointError("unexpected end of checkpoint");
        if (!l.empty() && l.front() == ' ') l.erase(0, 1);
        return l;
    }

    void read_flat(std::vector<double>& out, std::size_t count) {
        out.resize(count);
        for (std::size_t i = 0; i < count; ++i) out[i] = real();
    }

private:
    std::istream& in_;
};

} // namespace

void save_network(std::ostream& out, const MlpNetwork& net) {
    out << "mlp v1\n";
    out << "layers " << net.layers.size() << '\n';
    for (const Layer& l : net.layers)
        out << "layer " << l.spec.input_dim << ' ' << l.spec.output_dim << ' '
            << activation_name(l.spec.activation) << '\n';
    out << "scale " << format_double(net.output_scale) << '\n';
    std::vector<double> flat;
    net.copy_params(flat);
    out << "params " << flat.size() << '\n';
    write_flat(out, flat);
}

MlpNetwork load_network(std::istream& in) {
    Reader r(in);
    r.expect("mlp");
    r.expect("v1");
    r.expect("layers");
    const std::uint64_t n_layers = r.integer();
    if (n_layers == 0) throw CheckpointError("network has no layers");
    std::vector<LayerSpec> specs;
    specs.reserve(n_layers);
    for (std::uint64_t k = 0; k < n_layers; ++k) {
        r.expect("layer");
        LayerSpec s;
        s.input_dim = static_cast<std::size_t>(r.integer());
        s.output_dim = static_cast<std::size_t>(r.integer());
        s.activation = activation_from_name(r.word());
        specs.push_back(s);
    }
    r.expect("scale");
    const double scale = r.real();
    r.expect("params");
    const std::uint64_t count = r.integer();

    MlpNetwork net;
    try {
        net = make_network(specs, scale);
    } catch (const ShapeError& e) {
        throw CheckpointError(std::string("inconsistent layer chain: ") +
                              e.what());
    }
    if (count != net.param_count())
        throw CheckpointError("parameter count does not match layer specs");
    std::vector<double> flat;
    r.read_flat(flat, count);
    net.set_params(flat);
    return net;
}

void save_adam(std::ostream& out, const AdamState& state) {
    out << "adam v1\n";
    out << "lr " << format_double(state.learning_rate) << " beta1 "
        << format_double(state.beta1) << " beta2 "
        << format_double(state.beta2) << " eps "
        << format_double(state.epsilon) << " steps " << state.step_count
        << '\n';
    out << "m " << state.m.size() << '\n';
    write_flat(out, state.m);
    out << "v " << state.v.size() << '\n';
    write_flat(out, state.v);
}

AdamState load_adam(std::istream& in) {
    Reader r(in);
    r.expect("adam");
    r.expect("v1");
    AdamState s;
    r.expect("lr");
    s.learning_rate = r.real();
    r.expect("beta1");
    s.beta1 = r.real();
    r.expect("beta2");
    s.beta2 = r.real();
    r.expect("eps");
    s.epsilon = r.real();
    r.expect("steps");
    s.step_count = r.integer();
    r.expect("m");
    const std::uint64_t m_count = r.integer();
    r.read_flat(s.m, m_count);
    r.expect("v");
    const std::uint64_t v_count = r.integer();
    if (v_count != m_count)
        throw CheckpointError("adam moment vectors disagree in size");
    r.read_flat(s.v, v_count);
    return s;
}

namespace {

void save_agent(std::ostream& out, const Agent& agent) {
    const AgentLayout& l = agent.layout();
    out << "layout " << mode_name(l.mode) << ' ' << l.own_state_dim << ' '
        << l.partner_state_dim << ' ' << l.own_action_dim << ' '
        << l.partner_action_dim << ' ' << l.hidden_width << '\n';
    out << "bounds " << format_double(agent.bounds().low) << ' '
        << format_double(agent.bounds().high) << '\n';
    out << "train_steps " << agent.train_step_count() << '\n';

    const AgentNetworks& n = agent.nets();
    auto net = [&out](const char* name, const MlpNetwork& m) {
        out << "net " << name << '\n';
        save_network(out, m);
    };
    net("critic1", n.critic1);
    net("critic2", n.critic2);
    net("actor", n.actor);
    if (agent.has_estimator()) net("estimator", n.estimator);
    net("target_critic1", n.target_critic1);
    net("target_critic2", n.target_critic2);
    net("target_actor", n.target_actor);
    if (agent.has_estimator()) net("target_estimator", n.target_estimator);
    auto adam = [&out](const char* name, const AdamState& s) {
        out << "opt " << name << '\n';
        save_adam(out, s);
    };
    adam("critic1", n.adam_critic1);
    adam("critic2", n.adam_critic2);
    adam("actor", n.adam_actor);
    if (agent.has_estimator()) adam("estimator", n.adam_estimator);
}

Agent load_agent(std::istream& in) {
    Reader r(in);
    r.expect("layout");
    AgentLayout layout;
    layout.mode = mode_from_name(r.word());
    layout.own_state_dim = static_cast<std::size_t>(r.integer());
    layout.partner_state_dim = static_cast<std::size_t>(r.integer());
    layout.own_action_dim = static_cast<std::size_t>(r.integer());
    layout.partner_action_dim = static_cast<std::size_t>(r.integer());
    layout.hidden_width = static_cast<std::size_t>(r.integer());
    r.expect("bounds");
    ActionBounds bounds;
    bounds.low = r.real();
    bounds.high = r.real();
    r.expect("train_steps");
    const std::uint64_t train_steps = r.integer();

    Rng scratch(0);
    Agent agent(layout, bounds, OptimizerSettings{}, scratch);
    agent.set_train_step_count(train_steps);
    AgentNetworks& n = agent.nets();

    auto check_shape = [](const MlpNetwork& loaded, const MlpNetwork& built,
                          const char* name) {
        if (loaded.layers.size() != built.layers.size())
            throw CheckpointError(std::string("network '") + name +
                                  "' does not match the stored layout");
        for (std::size_t k = 0; k < loaded.layers.size(); ++k)
            if (!(loaded.layers[k].spec == built.layers[k].spec))
                throw CheckpointError(std::string("network '") + name +
                                      "' does not match the stored layout");
    };
    auto net = [&](const char* name, MlpNetwork& dst) {
        Reader rr(in);
        rr.expect("net");
        rr.expect(name);
        MlpNetwork loaded = load_network(in);
        check_shape(loaded, dst, name);
        dst = std::move(loaded);
    };
    net("critic1", n.critic1);
    net("critic2", n.critic2);
    net("actor", n.actor);
    if (agent.has_estimator()) net("estimator", n.estimator);
    net("target_critic1", n.target_critic1);
    net("target_critic2", n.target_critic2);
    net("target_actor", n.target_actor);
    if (agent.has_estimator()) net("target_estimator", n.target_estimator);

    auto adam = [&](const char* name, AdamState& dst,
                    const MlpNetwork& owner) {
        Reader rr(in);
        rr.expect("opt");
        rr.expect(name);
        AdamState loaded = load_adam(in);
        if (loaded.m.size() != owner.param_count())
            throw CheckpointError(std::string("optimizer state '") + name +
                                  "' does not match its network");
        dst = std::move(loaded);
    };
    adam("critic1", n.adam_critic1, n.critic1);
    adam("critic2", n.adam_critic2, n.critic2);
    adam("actor", n.adam_actor, n.actor);
    if (agent.has_estimator()) adam("estimator", n.adam_estimator, n.estimator);
    return agent;
}

} // namespace

void save_checkpoint(const std::string& path, const TrainingCheckpoint& ckpt) {
    std::ostringstream out;
    out << "aentd3-checkpoint v1\n";
    out << "config " << config_to_json_text(ckpt.config) << '\n';
    out << "seed " << ckpt.seed << '\n';
    out << "agents " << ckpt.agents.size() << '\n';
    for (std::size_t i = 0; i < ckpt.agents.size(); ++i) {
        out << "agent " << i << '\n';
        save_agent(out, ckpt.agents[i]);
    }
    out << "end\n";

    std::ofstream f(path);
    if (!f) throw IoError("cannot write checkpoint: " + path);
    f << out.str();
    f.flush();
    if (!f) throw IoError("failed while writing checkpoint: " + path);
}

TrainingCheckpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read checkpoint: " + path);
    Reader r(in);
    r.expect("aentd3-checkpoint");
    r.expect("v1");
    r.expect("config");
    TrainingCheckpoint ckpt;
    try {
        ckpt.config = config_from_json_text(r.line());
    } catch (const ConfigError& e) {
        throw CheckpointError(std::string("embedded config invalid: ") +
                              e.what());
    }
    r.expect("seed");
    ckpt.seed = r.integer();
    r.expect("agents");
    const std::uint64_t n = r.integer();
    if (n == 0 || n > 2)
        throw CheckpointError("checkpoint must hold one or two agents");
    for (std::uint64_t i = 0; i < n; ++i) {
        r.expect("agent");
        if (r.integer() != i) throw CheckpointError("agent indices out of order");
        ckpt.agents.push_back(load_agent(in));
    }
    r.expect("end");
    return ckpt;
}

} // namespace aentd3
