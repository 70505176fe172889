#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/frame_seq.hpp"
#include "ccnet/rng.hpp"
#include "ccnet/tensor_ops.hpp"

namespace ccnet {

struct ConvLayerSpec {
    std::size_t frames = 0; // output frame count
    std::size_t kernel = 0;
    std::size_t pool = 0; // 0 = no pooling; pools are non-overlapping
};

/// Architecture description for the 9-layer column: six temporal
/// convolutions (stride 1, ReLU, optional non-overlapping max-pool)
/// followed by three fully-connected layers with dropout between them.
struct ModelConfig {
    std::vector<ConvLayerSpec> conv_layers;
    std::vector<std::size_t> fc_layers; // output units; last entry = class_count
    std::size_t input_length = 0;       // l0
    std::size_t input_frames = 0;       // alphabet size m
    std::size_t class_count = 0;
    double dropout_prob = 0.5;
    double init_stddev = 0.02;
    std::uint64_t seed = 0;
    bool conv_bias = true; // set false for the strict bias-free form

    static ModelConfig large(std::size_t input_length, std::size_t input_frames,
                             std::size_t class_count);
    static ModelConfig small(std::size_t input_length, std::size_t input_frames,
                             std::size_t class_count);
    /// The standard kernel/pool stack with custom frame and hidden-unit
    /// counts, for reduced desk-scale runs.
    static ModelConfig scaled(std::size_t conv_frames, std::size_t fc_units,
                              std::size_t input_length, std::size_t input_frames,
                              std::size_t class_count);

    void validate() const;

    /// Frame length after the full convolutional stack for an input of
    /// length l0. Throws ShapeError naming the first layer whose output
    /// would collapse below one position.
    std::size_t output_length_after_conv(std::size_t l0) const;

    /// Flattened dimension entering the first fully-connected layer.
    std::size_t flattened_size() const;
};

template <class T>
struct ModelGrad;

/// Per-call activation cache for a train-mode forward pass. Never share
/// one context across concurrent training steps.
template <class T>
struct TrainContext {
    bool valid = false;
    std::vector<FrameSeq<T>> conv_inputs; // conv_layers.size() + 1 entries
    std::vector<FrameSeq<T>> conv_preact;
    std::vector<std::optional<ArgmaxMap>> pool_argmax;
    std::vector<std::vector<T>> fc_inputs;
    std::vector<std::vector<T>> fc_preact;       // hidden layers only
    std::vector<DropoutMask<T>> dropout_masks;   // hidden layers only
};

template <class T>
class Model {
public:
    Model() = default;

    /// Draws every parameter from Gaussian(0, init_stddev) using the
    /// given source, in checkpoint order.
    static Model build(const ModelConfig& config, Rng& rng);

    /// Zero-initialized parameters (checkpoint loading fills them in).
    static Model zeros(const ModelConfig& config);

    const ModelConfig& config() const { return config_; }
    std::size_t conv_layer_count() const { return conv_.size(); }
    std::size_t fc_layer_count() const { return fc_.size(); }
    const std::vector<ConvKernel<T>>& conv_layers() const { return conv_; }
    const std::vector<LinearWeights<T>>& fc_layers() const { return fc_; }
    ConvKernel<T>& conv_layer(std::size_t i) { return conv_[i]; }
    LinearWeights<T>& fc_layer(std::size_t i) { return fc_[i]; }

    /// Eval mode is deterministic and needs no context; train mode
    /// records activations into ctx and draws dropout masks from rng.
    std::vector<T> forward(const FrameSeq<T>& input, RunMode mode,
                           TrainContext<T>* ctx = nullptr, Rng* rng = nullptr) const;

    /// Backward through the whole column. Requires the context filled by
    /// a preceding train-mode forward call.
    ModelGrad<T> backward(TrainContext<T>& ctx, const std::vector<T>& grad_logits) const;

    /// Parameter arrays in fixed (checkpoint/update) order: conv weights
    /// then bias per layer, then fc matrix and bias per layer.
    std::vector<std::vector<T>*> param_arrays();
    std::vector<const std::vector<T>*> param_arrays() const;

private:
    ModelConfig config_;
    std::vector<ConvKernel<T>> conv_;
    std::vector<std::optional<PoolSpec>> pool_;
    std::vector<LinearWeights<T>> fc_;
};

template <class T>
struct ModelGrad {
    std::vector<ConvGrad<T>> conv;
    std::vector<LinearGrad<T>> fc;

    static ModelGrad zeros_like(const Model<T>& model) {
        ModelGrad g;
        for (const auto& k : model.conv_layers()) g.conv.push_back(ConvGrad<T>::zeros_like(k));
        for (const auto& w : model.fc_layers()) g.fc.push_back(LinearGrad<T>::zeros_like(w));
        return g;
    }

    void accumulate(const ModelGrad& other) {
        for (std::size_t i = 0; i < conv.size(); ++i) {
            for (std::size_t j = 0; j < conv[i].weights.size(); ++j)
                conv[i].weights[j] += other.conv[i].weights[j];
            for (std::size_t j = 0; j < conv[i].bias.size(); ++j)
                conv[i].bias[j] += other.conv[i].bias[j];
        }
        for (std::size_t i = 0; i < fc.size(); ++i) {
            for (std::size_t j = 0; j < fc[i].matrix.size(); ++j)
                fc[i].matrix[j] += other.fc[i].matrix[j];
            for (std::size_t j = 0; j < fc[i].bias.size(); ++j)
                fc[i].bias[j] += other.fc[i].bias[j];
        }
    }

    void scale(T factor) {
        for (auto& c : conv) {
            for (T& v : c.weights) v *= factor;
            for (T& v : c.bias) v *= factor;
        }
        for (auto& f : fc) {
            for (T& v : f.matrix) v *= factor;
            for (T& v : f.bias) v *= factor;
        }
    }

    /// Same order as Model::param_arrays.
    std::vector<std::vector<T>*> arrays() {
        std::vector<std::vector<T>*> out;
        for (auto& c : conv) {
            out.push_back(&c.weights);
            if (!c.bias.empty()) out.push_back(&c.bias);
        }
        for (auto& f : fc) {
            out.push_back(&f.matrix);
            out.push_back(&f.bias);
        }
        return out;
    }
};

// ---------------------------------------------------------------------------
// Implementation
// ---------------------------------------------------------------------------

template <class T>
Model<T> Model<T>::zeros(const ModelConfig& config) {
    config.validate();
    Model<T> m;
    m.config_ = config;

    std::size_t in_frames = config.input_frames;
    for (const ConvLayerSpec& layer : config.conv_layers) {
        ConvKernel<T> kernel(in_frames, layer.frames, layer.kernel, 1, config.conv_bias);
        m.conv_.push_back(std::move(kernel));
        m.pool_.push_back(layer.pool > 0 ? std::optional<PoolSpec>(PoolSpec(layer.pool))
                                         : std::nullopt);
        in_frames = layer.frames;
    }

    std::size_t in_units = config.flattened_size();
    for (std::size_t units : config.fc_layers) {
        m.fc_.emplace_back(units, in_units);
        in_units = units;
    }
    return m;
}

template <class T>
Model<T> Model<T>::build(const ModelConfig& config, Rng& rng) {
    Model<T> m = zeros(config);
    const double stddev = config.init_stddev;
    for (std::vector<T>* params : m.param_arrays()) {
        for (T& v : *params) v = static_cast<T>(rng.gaussian(0.0, stddev));
    }
    return m;
}

template <class T>
std::vector<T> Model<T>::forward(const FrameSeq<T>& input, RunMode mode,
                                 TrainContext<T>* ctx, Rng* rng) const {
    if (input.frames != config_.input_frames || input.length != config_.input_length) {
        throw ShapeError("Model::forward: input " + input.shape_str() +
                         " does not match configured " +
                         std::to_string(config_.input_frames) + "x" +
                         std::to_string(config_.input_length));
    }
    const bool train = mode == RunMode::train;
    if (train && (ctx == nullptr || rng == nullptr)) {
        throw StateError("Model::forward: train mode requires a context and rng");
    }
    if (ctx) {
        *ctx = TrainContext<T>{};
    }

    FrameSeq<T> x = input;
    for (std::size_t i = 0; i < conv_.size(); ++i) {
        if (ctx) ctx->conv_inputs.push_back(x);
        FrameSeq<T> pre = conv_forward(x, conv_[i]);
        if (ctx) ctx->conv_preact.push_back(pre);
        x = relu_forward(pre);
        if (pool_[i]) {
            PoolResult<T> pooled = maxpool_forward(x, *pool_[i]);
            x = std::move(pooled.output);
            if (ctx) ctx->pool_argmax.emplace_back(std::move(pooled.argmax));
        } else if (ctx) {
            ctx->pool_argmax.emplace_back(std::nullopt);
        }
    }
    if (ctx) ctx->conv_inputs.push_back(x);

    // Flatten frame-major: frame 0 positions first, then frame 1, ...
    std::vector<T> v = x.data;

    const std::size_t fc_count = fc_.size();
    for (std::size_t f = 0; f + 1 < fc_count; ++f) {
        if (ctx) ctx->fc_inputs.push_back(v);
        std::vector<T> z = linear_forward(v, fc_[f]);
        if (ctx) ctx->fc_preact.push_back(z);
        v = relu_forward(z);
        if (train) {
            DropoutResult<T> dropped =
                dropout_forward(v, config_.dropout_prob, RunMode::train, *rng);
            v = std::move(dropped.output);
            ctx->dropout_masks.push_back(std::move(dropped.mask));
        }
    }
    if (ctx) ctx->fc_inputs.push_back(v);
    std::vector<T> logits = linear_forward(v, fc_.back()); // no ReLU on the output layer

    if (ctx) ctx->valid = train;
    return logits;
}

template <class T>
ModelGrad<T> Model<T>::backward(TrainContext<T>& ctx,
                                const std::vector<T>& grad_logits) const {
    if (!ctx.valid) {
        throw StateError("Model::backward: no cached train-mode forward pass");
    }
    if (grad_logits.size() != config_.class_count) {
        throw ShapeError("Model::backward: grad_logits size " +
                         std::to_string(grad_logits.size()) + " != class count " +
                         std::to_string(config_.class_count));
    }
    ModelGrad<T> grads;
    grads.conv.resize(conv_.size());
    grads.fc.resize(fc_.size());

    std::vector<T> g = grad_logits;
    for (std::size_t f = fc_.size(); f-- > 0;) {
        LinearBackwardResult<T> lb = linear_backward(ctx.fc_inputs[f], fc_[f], g);
        grads.fc[f] = std::move(lb.grads);
        g = std::move(lb.grad_input);
        if (f > 0) {
            g = dropout_backward(g, ctx.dropout_masks[f - 1]);
            g = relu_backward(ctx.fc_preact[f - 1], g);
        }
    }

    const FrameSeq<T>& stack_out = ctx.conv_inputs.back();
    FrameSeq<T> gx(stack_out.frames, stack_out.length);
    gx.data = std::move(g);

    for (std::size_t i = conv_.size(); i-- > 0;) {
        const FrameSeq<T>& pre = ctx.conv_preact[i];
        if (pool_[i]) {
            gx = maxpool_backward(*ctx.pool_argmax[i], gx, pre.frames, pre.length);
        }
        gx = relu_backward(pre, gx);
        ConvBackwardResult<T> cb = conv_backward(ctx.conv_inputs[i], conv_[i], gx);
        grads.conv[i] = std::move(cb.grad_kernel);
        gx = std::move(cb.grad_input);
    }
    return grads;
}

template <class T>
std::vector<std::vector<T>*> Model<T>::param_arrays() {
    std::vector<std::vector<T>*> out;
    for (auto& k : conv_) {
        out.push_back(&k.weights);
        if (k.has_bias) out.push_back(&k.bias);
    }
    for (auto& w : fc_) {
        out.push_back(&w.matrix);
        out.push_back(&w.bias);
    }
    return out;
}

template <class T>
std::vector<const std::vector<T>*> Model<T>::param_arrays() const {
    std::vector<const std::vector<T>*> out;
    for (const auto& k : conv_) {
        out.push_back(&k.weights);
        if (k.has_bias) out.push_back(&k.bias);
    }
    for (const auto& w : fc_) {
        out.push_back(&w.matrix);
        out.push_back(&w.bias);
    }
    return out;
}

} // namespace ccnet
