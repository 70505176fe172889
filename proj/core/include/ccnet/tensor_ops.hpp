#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/frame_seq.hpp"
#include "ccnet/rng.hpp"
#include "ccnet/threading.hpp"

namespace ccnet {

// Index convention, used by every windowed op below (the one place where
// 1-based window math is translated to 0-based storage):
//
//   * output position y (0-based) reads the input window
//     [y*d, y*d + k - 1];
//   * kernel tap x (0-based) multiplies the input at window offset
//     k - 1 - x, i.e. the kernel is applied reversed (true convolution,
//     not cross-correlation);
//   * the output length is the number of complete windows,
//     (l - k)/d + 1, defined for l >= k.

constexpr std::size_t window_count(std::size_t length, std::size_t width,
                                   std::size_t stride) {
    return (length - width) / stride + 1;
}

constexpr std::size_t window_start(std::size_t y, std::size_t stride) {
    return y * stride;
}

constexpr std::size_t tap_offset(std::size_t width, std::size_t tap) {
    return width - 1 - tap;
}

enum class RunMode { train, eval };

// ---------------------------------------------------------------------------
// Parameter carriers
// ---------------------------------------------------------------------------

/// Temporal convolution weights: one width-k kernel per (output frame,
/// input frame) pair, plus an optional per-output-frame bias. The offset
/// constant of the window formula is k - d + 1 and is always derived,
/// never stored.
template <class T>
struct ConvKernel {
    std::size_t in_frames = 0;
    std::size_t out_frames = 0;
    std::size_t width = 0;  // k
    std::size_t stride = 0; // d
    std::vector<T> weights; // [out][in][tap]
    std::vector<T> bias;    // [out] when has_bias
    bool has_bias = false;

    ConvKernel() = default;
    ConvKernel(std::size_t in_frames_, std::size_t out_frames_, std::size_t width_,
               std::size_t stride_, bool with_bias = false)
        : in_frames(in_frames_), out_frames(out_frames_), width(width_),
          stride(stride_), weights(in_frames_ * out_frames_ * width_, T(0)),
          bias(with_bias ? out_frames_ : 0, T(0)), has_bias(with_bias) {
        if (stride_ < 1 || stride_ > width_) {
            throw ShapeError("ConvKernel: stride must satisfy 1 <= d <= k, got d=" +
                             std::to_string(stride_) + " k=" + std::to_string(width_));
        }
        if (in_frames_ < 1 || out_frames_ < 1) {
            throw ShapeError("ConvKernel: frame counts must be >= 1");
        }
    }

    std::size_t offset() const { return width - stride + 1; } // c = k - d + 1

    T& w(std::size_t out, std::size_t in, std::size_t tap) {
        return weights[(out * in_frames + in) * width + tap];
    }
    const T& w(std::size_t out, std::size_t in, std::size_t tap) const {
        return weights[(out * in_frames + in) * width + tap];
    }

    std::string shape_str() const {
        return std::to_string(in_frames) + "->" + std::to_string(out_frames) +
               " k=" + std::to_string(width) + " d=" + std::to_string(stride);
    }
};

/// Max-pooling geometry. The single-argument form is the non-overlapping
/// pool (stride = width); the two-argument form admits any 1 <= d <= k.
struct PoolSpec {
    std::size_t width = 0;
    std::size_t stride = 0;

    explicit PoolSpec(std::size_t width_) : PoolSpec(width_, width_) {}
    PoolSpec(std::size_t width_, std::size_t stride_)
        : width(width_), stride(stride_) {
        if (width_ < 1 || stride_ < 1 || stride_ > width_) {
            throw ShapeError("PoolSpec: need 1 <= d <= k, got k=" +
                             std::to_string(width_) + " d=" + std::to_string(stride_));
        }
    }
};

template <class T>
struct LinearWeights {
    std::size_t out_units = 0;
    std::size_t in_units = 0;
    std::vector<T> matrix; // [out][in]
    std::vector<T> bias;   // [out]

    LinearWeights() = default;
    LinearWeights(std::size_t out_units_, std::size_t in_units_)
        : out_units(out_units_), in_units(in_units_),
          matrix(out_units_ * in_units_, T(0)), bias(out_units_, T(0)) {}

    T& w(std::size_t out, std::size_t in) { return matrix[out * in_units + in]; }
    const T& w(std::size_t out, std::size_t in) const {
        return matrix[out * in_units + in];
    }

    std::string shape_str() const {
        return std::to_string(in_units) + "->" + std::to_string(out_units);
    }
};

/// Gradient buffers mirror their parameter twins shape for shape.
template <class T>
struct ConvGrad {
    std::vector<T> weights;
    std::vector<T> bias;

    static ConvGrad zeros_like(const ConvKernel<T>& kernel) {
        ConvGrad g;
        g.weights.assign(kernel.weights.size(), T(0));
        g.bias.assign(kernel.bias.size(), T(0));
        return g;
    }
};

template <class T>
struct LinearGrad {
    std::vector<T> matrix;
    std::vector<T> bias;

    static LinearGrad zeros_like(const LinearWeights<T>& w) {
        LinearGrad g;
        g.matrix.assign(w.matrix.size(), T(0));
        g.bias.assign(w.bias.size(), T(0));
        return g;
    }
};

// ---------------------------------------------------------------------------
// Temporal convolution
// ---------------------------------------------------------------------------

namespace detail {

inline void check_conv_input(const char* op, std::size_t in_frames,
                             std::size_t in_length, std::size_t want_frames,
                             std::size_t width, const std::string& kernel_shape) {
    if (in_frames != want_frames) {
        throw ShapeError(std::string(op) + ": input has " + std::to_string(in_frames) +
                         " frames but kernel expects " + std::to_string(want_frames) +
                         " (input " + std::to_string(in_frames) + "x" +
                         std::to_string(in_length) + ", kernel " + kernel_shape + ")");
    }
    if (in_length < width) {
        throw ShapeError(std::string(op) + ": input too short: length " +
                         std::to_string(in_length) + " < kernel width " +
                         std::to_string(width));
    }
}

} // namespace detail

template <class T>
FrameSeq<T> conv_forward(const FrameSeq<T>& input, const ConvKernel<T>& kernel) {
    detail::check_conv_input("conv_forward", input.frames, input.length,
                             kernel.in_frames, kernel.width, kernel.shape_str());
    const std::size_t k = kernel.width;
    const std::size_t d = kernel.stride;
    const std::size_t out_len = window_count(input.length, k, d);
    FrameSeq<T> output(kernel.out_frames, out_len);

    threading::parallel_for(0, kernel.out_frames, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            T* out = output.row(j);
            if (kernel.has_bias) {
                std::fill(out, out + out_len, kernel.bias[j]);
            }
            for (std::size_t i = 0; i < kernel.in_frames; ++i) {
                const T* g = input.row(i);
                for (std::size_t x = 0; x < k; ++x) {
                    const T w = kernel.w(j, i, x);
                    const T* src = g + tap_offset(k, x);
                    if (d == 1) {
                        for (std::size_t y = 0; y < out_len; ++y) out[y] += w * src[y];
                    } else {
                        for (std::size_t y = 0; y < out_len; ++y)
                            out[y] += w * src[y * d];
                    }
                }
            }
        }
    });
    return output;
}

template <class T>
struct ConvBackwardResult {
    FrameSeq<T> grad_input;
    ConvGrad<T> grad_kernel;
};

template <class T>
ConvBackwardResult<T> conv_backward(const FrameSeq<T>& input,
                                    const ConvKernel<T>& kernel,
                                    const FrameSeq<T>& grad_output) {
    detail::check_conv_input("conv_backward", input.frames, input.length,
                             kernel.in_frames, kernel.width, kernel.shape_str());
    const std::size_t k = kernel.width;
    const std::size_t d = kernel.stride;
    const std::size_t out_len = window_count(input.length, k, d);
    if (grad_output.frames != kernel.out_frames || grad_output.length != out_len) {
        throw ShapeError("conv_backward: grad_output shape " + grad_output.shape_str() +
                         " does not match forward output " +
                         std::to_string(kernel.out_frames) + "x" +
                         std::to_string(out_len) + " (kernel " + kernel.shape_str() + ")");
    }

    ConvBackwardResult<T> result;
    result.grad_input = FrameSeq<T>(input.frames, input.length);
    result.grad_kernel = ConvGrad<T>::zeros_like(kernel);

    // Input gradient: positions the forward pass never reads stay zero.
    FrameSeq<T>& gin = result.grad_input;
    threading::parallel_for(0, kernel.in_frames, [&](std::size_t i0, std::size_t i1) {
        for (std::size_t i = i0; i < i1; ++i) {
            T* gi = gin.row(i);
            for (std::size_t j = 0; j < kernel.out_frames; ++j) {
                const T* go = grad_output.row(j);
                for (std::size_t x = 0; x < k; ++x) {
                    const T w = kernel.w(j, i, x);
                    T* dst = gi + tap_offset(k, x);
                    if (d == 1) {
                        for (std::size_t y = 0; y < out_len; ++y) dst[y] += w * go[y];
                    } else {
                        for (std::size_t y = 0; y < out_len; ++y)
                            dst[y * d] += w * go[y];
                    }
                }
            }
        }
    });

    ConvGrad<T>& gk = result.grad_kernel;
    threading::parallel_for(0, kernel.out_frames, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t j = j0; j < j1; ++j) {
            const T* go = grad_output.row(j);
            for (std::size_t i = 0; i < kernel.in_frames; ++i) {
                const T* g = input.row(i);
                for (std::size_t x = 0; x < k; ++x) {
                    const T* src = g + tap_offset(k, x);
                    T acc = T(0);
                    if (d == 1) {
                        for (std::size_t y = 0; y < out_len; ++y) acc += go[y] * src[y];
                    } else {
                        for (std::size_t y = 0; y < out_len; ++y)
                            acc += go[y] * src[y * d];
                    }
                    gk.weights[(j * kernel.in_frames + i) * k + x] = acc;
                }
            }
            if (kernel.has_bias) {
                T acc = T(0);
                for (std::size_t y = 0; y < out_len; ++y) acc += go[y];
                gk.bias[j] = acc;
            }
        }
    });
    return result;
}

// ---------------------------------------------------------------------------
// Temporal max-pooling
// ---------------------------------------------------------------------------

template <class T>
struct PoolResult {
    FrameSeq<T> output;
    ArgmaxMap argmax;
};

template <class T>
PoolResult<T> maxpool_forward(const FrameSeq<T>& input, const PoolSpec& spec) {
    if (input.length < spec.width) {
        throw ShapeError("maxpool_forward: input too short: length " +
                         std::to_string(input.length) + " < pool width " +
                         std::to_string(spec.width));
    }
    const std::size_t out_len = window_count(input.length, spec.width, spec.stride);
    PoolResult<T> result;
    result.output = FrameSeq<T>(input.frames, out_len);
    result.argmax.frames = input.frames;
    result.argmax.length = out_len;
    result.argmax.index.assign(input.frames * out_len, 0);

    for (std::size_t f = 0; f < input.frames; ++f) {
        const T* g = input.row(f);
        T* out = result.output.row(f);
        for (std::size_t y = 0; y < out_len; ++y) {
            const std::size_t start = window_start(y, spec.stride);
            std::size_t best = start;
            T best_val = g[start];
            for (std::size_t p = start + 1; p < start + spec.width; ++p) {
                if (g[p] > best_val) { // ties keep the lowest input position
                    best_val = g[p];
                    best = p;
                }
            }
            out[y] = best_val;
            result.argmax.at(f, y) = best;
        }
    }
    return result;
}

template <class T>
FrameSeq<T> maxpool_backward(const ArgmaxMap& argmax, const FrameSeq<T>& grad_output,
                             std::size_t input_frames, std::size_t input_length) {
    if (grad_output.frames != argmax.frames || grad_output.length != argmax.length) {
        throw ShapeError("maxpool_backward: grad_output shape " +
                         grad_output.shape_str() + " does not match argmax grid " +
                         std::to_string(argmax.frames) + "x" +
                         std::to_string(argmax.length));
    }
    if (input_frames != argmax.frames) {
        throw ShapeError("maxpool_backward: input frame count " +
                         std::to_string(input_frames) + " does not match argmax grid " +
                         std::to_string(argmax.frames) + "x" +
                         std::to_string(argmax.length));
    }
    FrameSeq<T> grad_input(input_frames, input_length);
    for (std::size_t f = 0; f < argmax.frames; ++f) {
        for (std::size_t y = 0; y < argmax.length; ++y) {
            const std::size_t p = argmax.at(f, y);
            if (p >= input_length) {
                throw StateError("maxpool_backward: argmax index " + std::to_string(p) +
                                 " out of range for input length " +
                                 std::to_string(input_length));
            }
            grad_input.at(f, p) += grad_output.at(f, y); // overlapping windows add up
        }
    }
    return grad_input;
}

// ---------------------------------------------------------------------------
// ReLU
// ---------------------------------------------------------------------------

template <class T>
FrameSeq<T> relu_forward(const FrameSeq<T>& input) {
    FrameSeq<T> out = input;
    for (T& v : out.data) v = std::max(T(0), v);
    return out;
}

/// Subgradient at exactly 0 is taken as 0.
template <class T>
FrameSeq<T> relu_backward(const FrameSeq<T>& input, const FrameSeq<T>& grad_output) {
    if (!input.same_shape(grad_output)) {
        throw ShapeError("relu_backward: input " + input.shape_str() +
                         " vs grad_output " + grad_output.shape_str());
    }
    FrameSeq<T> grad = grad_output;
    for (std::size_t i = 0; i < grad.data.size(); ++i) {
        if (!(input.data[i] > T(0))) grad.data[i] = T(0);
    }
    return grad;
}

template <class T>
std::vector<T> relu_forward(const std::vector<T>& input) {
    std::vector<T> out = input;
    for (T& v : out) v = std::max(T(0), v);
    return out;
}

template <class T>
std::vector<T> relu_backward(const std::vector<T>& input,
                             const std::vector<T>& grad_output) {
    if (input.size() != grad_output.size()) {
        throw ShapeError("relu_backward: input size " + std::to_string(input.size()) +
                         " vs grad_output size " + std::to_string(grad_output.size()));
    }
    std::vector<T> grad = grad_output;
    for (std::size_t i = 0; i < grad.size(); ++i) {
        if (!(input[i] > T(0))) grad[i] = T(0);
    }
    return grad;
}

// ---------------------------------------------------------------------------
// Fully-connected
// ---------------------------------------------------------------------------

template <class T>
std::vector<T> linear_forward(const std::vector<T>& input, const LinearWeights<T>& w) {
    if (input.size() != w.in_units) {
        throw ShapeError("linear_forward: input size " + std::to_string(input.size()) +
                         " does not match weights " + w.shape_str());
    }
    std::vector<T> out(w.out_units);
    threading::parallel_for(0, w.out_units, [&](std::size_t o0, std::size_t o1) {
        for (std::size_t o = o0; o < o1; ++o) {
            const T* row = w.matrix.data() + o * w.in_units;
            T acc = w.bias[o];
            for (std::size_t i = 0; i < w.in_units; ++i) acc += row[i] * input[i];
            out[o] = acc;
        }
    });
    return out;
}

template <class T>
struct LinearBackwardResult {
    std::vector<T> grad_input;
    LinearGrad<T> grads;
};

template <class T>
LinearBackwardResult<T> linear_backward(const std::vector<T>& input,
                                        const LinearWeights<T>& w,
                                        const std::vector<T>& grad_output) {
    if (input.size() != w.in_units) {
        throw ShapeError("linear_backward: input size " + std::to_string(input.size()) +
                         " does not match weights " + w.shape_str());
    }
    if (grad_output.size() != w.out_units) {
        throw ShapeError("linear_backward: grad_output size " +
                         std::to_string(grad_output.size()) +
                         " does not match weights " + w.shape_str());
    }
    LinearBackwardResult<T> result;
    result.grad_input.assign(w.in_units, T(0));
    result.grads = LinearGrad<T>::zeros_like(w);
    for (std::size_t o = 0; o < w.out_units; ++o) {
        const T go = grad_output[o];
        const T* row = w.matrix.data() + o * w.in_units;
        T* gm = result.grads.matrix.data() + o * w.in_units;
        for (std::size_t i = 0; i < w.in_units; ++i) {
            result.grad_input[i] += row[i] * go;
            gm[i] = go * input[i];
        }
        result.grads.bias[o] = go;
    }
    return result;
}

// ---------------------------------------------------------------------------
// Dropout (inverted scaling: survivors are scaled at train time so that
// evaluation is a pure identity)
// ---------------------------------------------------------------------------

template <class T>
struct DropoutMask {
    std::vector<std::uint8_t> keep;
    T scale = T(1);
};

/// Applies an existing mask (the backward pass and deterministic replays
/// use this; the map is linear, so it is its own Jacobian action).
template <class T>
std::vector<T> dropout_apply(const std::vector<T>& values, const DropoutMask<T>& mask) {
    if (values.size() != mask.keep.size()) {
        throw ShapeError("dropout_apply: values size " + std::to_string(values.size()) +
                         " vs mask size " + std::to_string(mask.keep.size()));
    }
    std::vector<T> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        out[i] = mask.keep[i] ? values[i] * mask.scale : T(0);
    }
    return out;
}

template <class T>
struct DropoutResult {
    std::vector<T> output;
    DropoutMask<T> mask;
};

template <class T>
DropoutResult<T> dropout_forward(const std::vector<T>& input, double prob,
                                 RunMode mode, Rng& rng) {
    if (!(prob >= 0.0 && prob < 1.0)) {
        throw ShapeError("dropout_forward: prob must be in [0, 1), got " +
                         std::to_string(prob));
    }
    DropoutResult<T> result;
    result.mask.keep.assign(input.size(), 1);
    if (mode == RunMode::eval || prob == 0.0) {
        result.mask.scale = T(1);
        result.output = input;
        return result;
    }
    result.mask.scale = static_cast<T>(1.0 / (1.0 - prob));
    for (std::size_t i = 0; i < input.size(); ++i) {
        if (rng.uniform() < prob) result.mask.keep[i] = 0;
    }
    result.output = dropout_apply(input, result.mask);
    return result;
}

template <class T>
std::vector<T> dropout_backward(const std::vector<T>& grad_output,
                                const DropoutMask<T>& mask) {
    return dropout_apply(grad_output, mask);
}

template <class T>
struct DropoutFrameResult {
    FrameSeq<T> output;
    DropoutMask<T> mask;
};

template <class T>
DropoutFrameResult<T> dropout_forward(const FrameSeq<T>& input, double prob,
                                      RunMode mode, Rng& rng) {
    DropoutResult<T> flat = dropout_forward(input.data, prob, mode, rng);
    DropoutFrameResult<T> result;
    result.output = FrameSeq<T>(input.frames, input.length);
    result.output.data = std::move(flat.output);
    result.mask = std::move(flat.mask);
    return result;
}

// ---------------------------------------------------------------------------
// Softmax + negative log-likelihood
// ---------------------------------------------------------------------------

template <class T>
std::vector<T> softmax(const std::vector<T>& logits) {
    if (logits.empty()) {
        throw ShapeError("softmax: empty logits");
    }
    const T maxv = *std::max_element(logits.begin(), logits.end());
    std::vector<T> probs(logits.size());
    T sum = T(0);
    for (std::size_t i = 0; i < logits.size(); ++i) {
        probs[i] = std::exp(logits[i] - maxv);
        sum += probs[i];
    }
    for (T& p : probs) p /= sum;
    return probs;
}

template <class T>
struct SoftmaxLoss {
    T loss = T(0);
    std::vector<T> grad_logits;
};

template <class T>
SoftmaxLoss<T> softmax_nll(const std::vector<T>& logits, std::size_t target) {
    if (target >= logits.size()) {
        throw ShapeError("softmax_nll: target " + std::to_string(target) +
                         " out of range for " + std::to_string(logits.size()) +
                         " classes");
    }
    const T maxv = *std::max_element(logits.begin(), logits.end());
    T sum = T(0);
    std::vector<T> expd(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        expd[i] = std::exp(logits[i] - maxv);
        sum += expd[i];
    }
    SoftmaxLoss<T> result;
    result.loss = std::log(sum) - (logits[target] - maxv);
    result.grad_logits.resize(logits.size());
    for (std::size_t i = 0; i < logits.size(); ++i) {
        result.grad_logits[i] = expd[i] / sum - (i == target ? T(1) : T(0));
    }
    return result;
}

} // namespace ccnet
