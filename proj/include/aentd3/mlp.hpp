#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "aentd3/errors.hpp"
#include "aentd3/rng.hpp"

namespace aentd3 {

// Fully-connected feed-forward networks in double precision. This is the
// whole "deep learning framework" of the project: dense layers, ReLU / Tanh
// / Identity activations, analytic reverse-mode gradients, and Adam. No
// batching at this level — callers loop over samples and accumulate.

enum class Activation { ReLU, Tanh, Identity };

const char* activation_name(Activation a);
Activation activation_from_name(const std::string& name);

struct LayerSpec {
    std::size_t input_dim = 0;
    std::size_t output_dim = 0;
    Activation activation = Activation::Identity;

    bool operator==(const LayerSpec&) const = default;
};

struct Layer {
    LayerSpec spec;
    std::vector<double> weights; // row-major: weights[o * input_dim + i]
    std::vector<double> biases;  // [output_dim]
};

// Gradients (or any other value with one entry per parameter) in the
// network's flat parameter order: for each layer in order, all weights
// row-major, then all biases.
struct ParamGrads {
    std::vector<double> data;
};

// Reusable scratch buffers so the hot loops do not allocate. Any workspace
// can be used with any network; buffers are resized on demand.
struct Workspace {
    std::vector<std::vector<double>> pre;  // pre-activations per layer
    std::vector<std::vector<double>> post; // activations per layer
    std::vector<double> delta;
    std::vector<double> delta_prev;
};

struct MlpNetwork {
    std::vector<Layer> layers;
    // Final-layer Tanh outputs are multiplied by this scale (policy heads
    // producing actions in [-scale, scale]). Ignored for Identity / ReLU
    // heads and for Tanh in hidden position.
    double output_scale = 0.0;

    std::size_t input_dim() const { return layers.front().spec.input_dim; }
    std::size_t output_dim() const { return layers.back().spec.output_dim; }
    std::size_t param_count() const;

    // Flat-order accessors used by the optimizer, soft updates and
    // checkpoints. copy_params appends nothing; it overwrites `out`.
    void copy_params(std::vector<double>& out) const;
    void set_params(std::span<const double> flat);

    std::vector<double> forward(std::span<const double> input) const;
    // Same computation without allocation; the returned span points into ws.
    std::span<const double> forward_into(std::span<const double> input,
                                         Workspace& ws) const;

    // Gradient of sum_o upstream[o] * output[o] with respect to every
    // parameter (into `grads`, flat order) and the input (into
    // `input_grad`). Both outputs are overwritten, not accumulated.
    // ReLU uses subgradient 0 at exactly 0.
    void backward_into(std::span<const double> input,
                       std::span<const double> upstream, ParamGrads& grads,
                       std::vector<double>& input_grad, Workspace& ws) const;

    // Same, but reuses the activations already in `ws` instead of running
    // the forward pass again. Only valid immediately after forward_into
    // with the identical input and workspace.
    void backward_cached_into(std::span<const double> input,
                              std::span<const double> upstream,
                              ParamGrads& grads,
                              std::vector<double>& input_grad,
                              Workspace& ws) const;
    std::pair<ParamGrads, std::vector<double>>
    backward(std::span<const double> input,
             std::span<const double> upstream) const;
};

// Build a network with the given layer chain. Weights are drawn uniformly
// from [-1/sqrt(fan_in), 1/sqrt(fan_in)] in flat parameter order (row-major
// per layer), biases start at zero and consume no draws. Throws ShapeError
// on an empty chain, a zero dimension, or mismatched consecutive dims.
MlpNetwork init_network(const std::vector<LayerSpec>& specs,
                        double output_scale, Rng& rng);

// Same chain validation, all parameters zero (used by loaders).
MlpNetwork make_network(const std::vector<LayerSpec>& specs,
                        double output_scale);

struct AdamState {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    std::uint64_t step_count = 0; // updates applied so far
    std::vector<double> m;        // first-moment estimate, flat order
    std::vector<double> v;        // second-moment estimate, flat order
};

AdamState make_adam(const MlpNetwork& net, double learning_rate);

enum class GradientDirection { Minimize, Maximize };

// One Adam update with bias correction:
//   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,  t <- t+1
//   theta <- theta - lr * (m / (1-b1^t)) / (sqrt(v / (1-b2^t)) + eps)
// Maximize negates the gradient first and is otherwise identical, so
// adam_step(..., Maximize) on g matches adam_step(..., Minimize) on -g
// bit for bit.
void adam_step(MlpNetwork& net, const ParamGrads& grads, AdamState& state,
               GradientDirection direction);

// target <- tau * online + (1 - tau) * target, elementwise over the flat
// parameters. Computed as fma(tau, online, (1 - tau) * target) so the
// arithmetic is pinned independent of compiler contraction choices.
void soft_update(MlpNetwork& target, const MlpNetwork& online, double tau);

} // namespace aentd3
