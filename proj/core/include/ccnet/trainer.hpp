#pragma once

#include <cstddef>
#include <functional>
#include <ostream>
#include <string>
#include <vector>

#include "ccnet/augmentation.hpp"
#include "ccnet/datakit.hpp"
#include "ccnet/metrics.hpp"
#include "ccnet/model.hpp"
#include "ccnet/quantizer.hpp"

namespace ccnet {

/// Minibatch SGD with momentum and step-size halving: the rate starts at
/// initial_lr and is halved every halve_every epochs, at most `halvings`
/// times.
struct TrainSchedule {
    std::size_t batch_size = 128;
    double momentum = 0.9;
    double initial_lr = 0.01;
    std::size_t halve_every = 3;
    std::size_t halvings = 10;
    std::size_t max_epochs = 10;
};

/// lr(e) = initial_lr / 2^min(halvings, floor((e-1)/halve_every)) for
/// 1-based epochs; under the defaults the halvings land on epochs
/// 4, 7, ..., 31.
double lr_at_epoch(const TrainSchedule& schedule, std::size_t epoch);

/// Momentum buffers, one per parameter array, zero-initialized.
template <class T>
struct Velocity {
    std::vector<std::vector<T>> buffers;

    template <class M>
    static Velocity zeros_like(const M& model) {
        Velocity v;
        for (const auto* arr : model.param_arrays()) {
            v.buffers.emplace_back(arr->size(), T(0));
        }
        return v;
    }
};

/// Classical momentum: v <- mu*v - lr*g; w <- w + v.
template <class T>
void sgd_momentum_step(const std::vector<std::vector<T>*>& params,
                       const std::vector<const std::vector<T>*>& grads,
                       Velocity<T>& velocity, double lr, double momentum) {
    if (params.size() != grads.size() || params.size() != velocity.buffers.size()) {
        throw ShapeError("sgd_momentum_step: " + std::to_string(params.size()) +
                         " params, " + std::to_string(grads.size()) + " grads, " +
                         std::to_string(velocity.buffers.size()) + " velocity buffers");
    }
    const T mu = static_cast<T>(momentum);
    const T eta = static_cast<T>(lr);
    for (std::size_t a = 0; a < params.size(); ++a) {
        std::vector<T>& w = *params[a];
        const std::vector<T>& g = *grads[a];
        std::vector<T>& v = velocity.buffers[a];
        if (w.size() != g.size() || w.size() != v.size()) {
            throw ShapeError("sgd_momentum_step: array " + std::to_string(a) +
                             " sizes differ (param " + std::to_string(w.size()) +
                             ", grad " + std::to_string(g.size()) + ", velocity " +
                             std::to_string(v.size()) + ")");
        }
        for (std::size_t i = 0; i < w.size(); ++i) {
            v[i] = mu * v[i] - eta * g[i];
            w[i] += v[i];
        }
    }
}

struct EpochStats {
    std::size_t epoch = 0;
    double lr = 0.0;
    double mean_loss = 0.0;
    double train_accuracy = 0.0;
    double seconds = 0.0;
};

/// `epoch=3 lr=0.010000 loss=1.2345 acc=0.8750 seconds=0.42`
std::string format_epoch_stats(const EpochStats& stats);

struct TrainerOptions {
    const Thesaurus* thesaurus = nullptr; // non-null enables augmentation
    AugmentConfig augment;
    EncodeOptions encode;
};

/// One pass over the dataset: shuffle, then per minibatch
/// (augment ->) quantize -> forward(train) -> loss -> backward ->
/// momentum step with the mean gradient. The trailing partial batch is
/// trained on with its true size.
EpochStats train_epoch(Model<float>& model, const Alphabet& alphabet,
                       const Dataset& data, const DatasetSpec& spec,
                       const TrainSchedule& schedule, std::size_t epoch,
                       Velocity<float>& velocity, Rng& rng,
                       const TrainerOptions& options = {});

struct EvalResult {
    double accuracy = 0.0;
    ConfusionMatrix confusion;
    double mean_loss = 0.0;
};

EvalResult evaluate(const Model<float>& model, const Alphabet& alphabet,
                    const Dataset& data, const DatasetSpec& spec,
                    const EncodeOptions& encode = {});

struct TrainRunOptions : TrainerOptions {
    std::ostream* progress = nullptr; // per-epoch records, e.g. &std::cout
    std::ostream* log_file = nullptr;
    std::function<void(const Model<float>&, const EpochStats&, Rng&)> after_epoch;
};

/// Runs epochs 1..schedule.max_epochs, emitting one progress record per
/// epoch and invoking after_epoch (checkpointing hooks) when set.
void train(Model<float>& model, const Alphabet& alphabet, const Dataset& data,
           const DatasetSpec& spec, const TrainSchedule& schedule, Rng& rng,
           const TrainRunOptions& options = {});

} // namespace ccnet
