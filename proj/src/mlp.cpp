#include "aentd3/mlp.hpp"

#include <cmath>
#include <cstring>

namespace aentd3 {
namespace {

// Dot product with eight independent accumulators. The split chains let the
// compiler issue independent fused multiply-adds instead of one serial
// dependency chain; the summation order is fixed by this code and therefore
// reproducible run to run.
double dot(const double* a, const double* b, std::size_t n) {
    double s0 = 0, s1 = 0, s2 = 0, s3 = 0, s4 = 0, s5 = 0, s6 = 0, s7 = 0;
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        s0 += a[i + 0] * b[i + 0];
        s1 += a[i + 1] * b[i + 1];
        s2 += a[i + 2] * b[i + 2];
        s3 += a[i + 3] * b[i + 3];
        s4 += a[i + 4] * b[i + 4];
        s5 += a[i + 5] * b[i + 5];
        s6 += a[i + 6] * b[i + 6];
        s7 += a[i + 7] * b[i + 7];
    }
    double tail = 0;
    for (; i < n; ++i) tail += a[i] * b[i];
    return ((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7)) + tail;
}

void validate_specs(const std::vector<LayerSpec>& specs) {
    if (specs.empty()) throw ShapeError("network needs at least one layer");
    for (std::size_t k = 0; k < specs.size(); ++k) {
        if (specs[k].input_dim == 0 || specs[k].output_dim == 0)
            throw ShapeError("layer dimensions must be positive");
        if (k > 0 && specs[k].input_dim != specs[k - 1].output_dim)
            throw ShapeError("layer input dim does not match previous output dim");
    }
}

// activation value and, for backward, its derivative at the stored
// pre-activation. `head_scale` applies only when the layer is the final one
// and the activation is Tanh.
inline double activate(Activation act, double z, double head_scale) {
    switch (act) {
        case Activation::ReLU: return z > 0.0 ? z : 0.0;
        case Activation::Tanh: return head_scale * std::tanh(z);
        case Activation::Identity: return z;
    }
    return z;
}

inline double activate_grad(Activation act, double z, double head_scale) {
    switch (act) {
        case Activation::ReLU: return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return head_scale * (1.0 - t * t);
        }
        case Activation::Identity: return 1.0;
    }
    return 1.0;
}

} // namespace

const char* activation_name(Activation a) {
    switch (a) {
        case Activation::ReLU: return "relu";
        case Activation::Tanh: return "tanh";
        case Activation::Identity: return "identity";
    }
    return "identity";
}

Activation activation_from_name(const std::string& name) {
    if (name == "relu") return Activation::ReLU;
    if (name == "tanh") return Activation::Tanh;
    if (name == "identity") return Activation::Identity;
    throw ShapeError("unknown activation: " + name);
}

std::size_t MlpNetwork::param_count() const {
    std::size_t n = 0;
    for (const Layer& l : layers)
        n += l.spec.input_dim * l.spec.output_dim + l.spec.output_dim;
    return n;
}

void MlpNetwork::copy_params(std::vector<double>& out) const {
    out.clear();
    out.reserve(param_count());
    for (const Layer& l : layers) {
        out.insert(out.end(), l.weights.begin(), l.weights.end());
        out.insert(out.end(), l.biases.begin(), l.biases.end());
    }
}

void MlpNetwork::set_params(std::span<const double> flat) {
    if (flat.size() != param_count())
        throw ShapeError("flat parameter size does not match network");
    std::size_t off = 0;
    for (Layer& l : layers) {
        std::memcpy(l.weights.data(), flat.data() + off,
                    l.weights.size() * sizeof(double));
        off += l.weights.size();
        std::memcpy(l.biases.data(), flat.data() + off,
                    l.biases.size() * sizeof(double));
        off += l.biases.size();
    }
}

std::span<const double> MlpNetwork::forward_into(std::span<const double> input,
                                                Workspace& ws) const {
    if (input.size() != input_dim())
        throw ShapeError("forward: input size does not match network input dim");
    const std::size_t L = layers.size();
    if (ws.pre.size() < L) ws.pre.resize(L);
    if (ws.post.size() < L) ws.post.resize(L);

    const double* cur = input.data();
    for (std::size_t k = 0; k < L; ++k) {
        const Layer& l = layers[k];
        const std::size_t in = l.spec.input_dim;
        const std::size_t out = l.spec.output_dim;
        ws.pre[k].resize(out);
        ws.post[k].resize(out);
        const bool head = (k + 1 == L);
        const double scale = head ? output_scale : 1.0;
        const double* w = l.weights.data();
        for (std::size_t o = 0; o < out; ++o) {
            const double z = l.biases[o] + dot(w + o * in, cur, in);
            ws.pre[k][o] = z;
            ws.post[k][o] = activate(l.spec.activation, z, scale);
        }
        cur = ws.post[k].data();
    }
    return {ws.post[L - 1].data(), layers.back().spec.output_dim};
}

std::vector<double> MlpNetwork::forward(std::span<const double> input) const {
    Workspace ws;
    auto out = forward_into(input, ws);
    return {out.begin(), out.end()};
}

void MlpNetwork::backward_into(std::span<const double> input,
                               std::span<const double> upstream,
                               ParamGrads& grads,
                               std::vector<double>& input_grad,
                               Workspace& ws) const {
    forward_into(input, ws); // fills ws.pre / ws.post
    backward_cached_into(input, upstream, grads, input_grad, ws);
}

void MlpNetwork::backward_cached_into(std::span<const double> input,
                                      std::span<const double> upstream,
                                      ParamGrads& grads,
                                      std::vector<double>& input_grad,
                                      Workspace& ws) const {
    if (upstream.size() != output_dim())
        throw ShapeError("backward: upstream size does not match output dim");

    const std::size_t L = layers.size();
    grads.data.resize(param_count());

    // delta holds d(upstream . output) / d(pre-activation of layer k).
    ws.delta.assign(upstream.begin(), upstream.end());
    for (std::size_t o = 0; o < ws.delta.size(); ++o) {
        const double scale = output_scale;
        ws.delta[o] *= activate_grad(layers[L - 1].spec.activation,
                                     ws.pre[L - 1][o], scale);
    }

    // Walk layers from the top; `off` tracks where layer k's slice of the
    // flat gradient vector starts.
    std::vector<std::size_t> offsets(L);
    {
        std::size_t off = 0;
        for (std::size_t k = 0; k < L; ++k) {
            offsets[k] = off;
            off += layers[k].spec.input_dim * layers[k].spec.output_dim +
                   layers[k].spec.output_dim;
        }
    }

    for (std::size_t k = L; k-- > 0;) {
        const Layer& l = layers[k];
        const std::size_t in = l.spec.input_dim;
        const std::size_t out = l.spec.output_dim;
        const double* below = (k == 0) ? input.data() : ws.post[k - 1].data();
        double* wg = grads.data.data() + offsets[k];
        double* bg = wg + in * out;

        for (std::size_t o = 0; o < out; ++o) {
            const double d = ws.delta[o];
            double* row = wg + o * in;
            for (std::size_t i = 0; i < in; ++i) row[i] = d * below[i];
            bg[o] = d;
        }

        // Propagate to the layer below (or the input for k == 0).
        std::vector<double>& dst = (k == 0) ? input_grad : ws.delta_prev;
        dst.assign(in, 0.0);
        const double* w = l.weights.data();
        for (std::size_t o = 0; o < out; ++o) {
            const double d = ws.delta[o];
            const double* row = w + o * in;
            for (std::size_t i = 0; i < in; ++i) dst[i] += d * row[i];
        }
        if (k > 0) {
            for (std::size_t i = 0; i < in; ++i)
                dst[i] *= activate_grad(layers[k - 1].spec.activation,
                                        ws.pre[k - 1][i], 1.0);
            std::swap(ws.delta, ws.delta_prev);
        }
    }
}

std::pair<ParamGrads, std::vector<double>>
MlpNetwork::backward(std::span<const double> input,
                     std::span<const double> upstream) const {
    Workspace ws;
    ParamGrads grads;
    std::vector<double> input_grad;
    backward_into(input, upstream, grads, input_grad, ws);
    return {std::move(grads), std::move(input_grad)};
}

MlpNetwork make_network(const std::vector<LayerSpec>& specs,
                        double output_scale) {
    validate_specs(specs);
    MlpNetwork net;
    net.output_scale = output_scale;
    net.layers.reserve(specs.size());
    for (const LayerSpec& s : specs) {
        Layer l;
        l.spec = s;
        l.weights.assign(s.input_dim * s.output_dim, 0.0);
        l.biases.assign(s.output_dim, 0.0);
        net.layers.push_back(std::move(l));
    }
    return net;
}

MlpNetwork init_network(const std::vector<LayerSpec>& specs,
                        double output_scale, Rng& rng) {
    MlpNetwork net = make_network(specs, output_scale);
    for (Layer& l : net.layers) {
        const double bound = 1.0 / std::sqrt(static_cast<double>(l.spec.input_dim));
        for (double& w : l.weights) w = rng.uniform(-bound, bound);
        // biases stay zero and consume no draws
    }
    return net;
}

AdamState make_adam(const MlpNetwork& net, double learning_rate) {
    AdamState s;
    s.learning_rate = learning_rate;
    s.m.assign(net.param_count(), 0.0);
    s.v.assign(net.param_count(), 0.0);
    return s;
}

void adam_step(MlpNetwork& net, const ParamGrads& grads, AdamState& state,
               GradientDirection direction) {
    const std::size_t n = net.param_count();
    if (grads.data.size() != n || state.m.size() != n || state.v.size() != n)
        throw ShapeError("adam_step: gradient/state size does not match network");

    state.step_count += 1;
    const double t = static_cast<double>(state.step_count);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    const double sign = (direction == GradientDirection::Maximize) ? -1.0 : 1.0;

    std::size_t off = 0;
    for (Layer& l : net.layers) {
        auto update = [&](std::vector<double>& params) {
            for (double& p : params) {
                const double g = sign * grads.data[off];
                double& m = state.m[off];
                double& v = state.v[off];
                m = state.beta1 * m + (1.0 - state.beta1) * g;
                v = state.beta2 * v + (1.0 - state.beta2) * g * g;
                const double mhat = m / c1;
                const double vhat = v / c2;
                p -= state.learning_rate * mhat / (std::sqrt(vhat) + state.epsilon);
                ++off;
            }
        };
        update(l.weights);
        update(l.biases);
    }
}

void soft_update(MlpNetwork& target, const MlpNetwork& online, double tau) {
    if (target.layers.size() != online.layers.size())
        throw ShapeError("soft_update: network layouts differ");
    for (std::size_t k = 0; k < target.layers.size(); ++k) {
        Layer& t = target.layers[k];
        const Layer& o = online.layers[k];
        if (!(t.spec == o.spec))
            throw ShapeError("soft_update: network layouts differ");
        for (std::size_t i = 0; i < t.weights.size(); ++i)
            t.weights[i] = std::fma(tau, o.weights[i], (1.0 - tau) * t.weights[i]);
        for (std::size_t i = 0; i < t.biases.size(); ++i)
            t.biases[i] = std::fma(tau, o.biases[i], (1.0 - tau) * t.biases[i]);
    }
}

} // namespace aentd3
