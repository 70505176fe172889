#include "ccnet/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>

namespace ccnet {

double lr_at_epoch(const TrainSchedule& schedule, std::size_t epoch) {
    if (epoch < 1) {
        throw ShapeError("lr_at_epoch: epochs are 1-based");
    }
    std::size_t steps = schedule.halve_every > 0 ? (epoch - 1) / schedule.halve_every : 0;
    steps = std::min(steps, schedule.halvings);
    return schedule.initial_lr / std::pow(2.0, static_cast<double>(steps));
}

std::string format_epoch_stats(const EpochStats& stats) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "epoch=%zu lr=%.8g loss=%.6f acc=%.4f seconds=%.2f",
                  stats.epoch, stats.lr, stats.mean_loss, stats.train_accuracy,
                  stats.seconds);
    return buf;
}

namespace {

void check_label(const Sample& sample, std::size_t index, std::size_t class_count) {
    if (sample.label < 0 || static_cast<std::size_t>(sample.label) >= class_count) {
        throw DataError("record " + std::to_string(index) + ": label " +
                        std::to_string(sample.label) + " out of class range 0.." +
                        std::to_string(class_count - 1));
    }
}

} // namespace

EpochStats train_epoch(Model<float>& model, const Alphabet& alphabet,
                       const Dataset& data, const DatasetSpec& spec,
                       const TrainSchedule& schedule, std::size_t epoch,
                       Velocity<float>& velocity, Rng& rng,
                       const TrainerOptions& options) {
    if (data.samples.empty()) {
        throw DataError("train_epoch: empty dataset");
    }
    const ModelConfig& config = model.config();
    const std::size_t classes = config.class_count;
    const double lr = lr_at_epoch(schedule, epoch);
    const auto t0 = std::chrono::steady_clock::now();

    std::vector<std::size_t> order(data.samples.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    rng.shuffle(order);

    auto params = model.param_arrays();
    double loss_sum = 0.0;
    std::size_t correct = 0;

    TrainContext<float> ctx;
    for (std::size_t start = 0; start < order.size(); start += schedule.batch_size) {
        const std::size_t end = std::min(order.size(), start + schedule.batch_size);
        const std::size_t batch = end - start;
        ModelGrad<float> accum = ModelGrad<float>::zeros_like(model);
        for (std::size_t b = start; b < end; ++b) {
            const std::size_t idx = order[b];
            const Sample& sample = data.samples[idx];
            check_label(sample, idx, classes);

            std::string input_text = concat_fields(sample, spec);
            if (options.thesaurus != nullptr) {
                input_text = augment(input_text, *options.thesaurus, options.augment, rng);
            }
            EncodedText<float> encoded =
                encode<float>(input_text, alphabet, config.input_length, options.encode);

            std::vector<float> logits =
                model.forward(encoded.frames, RunMode::train, &ctx, &rng);
            SoftmaxLoss<float> loss =
                softmax_nll(logits, static_cast<std::size_t>(sample.label));
            loss_sum += loss.loss;
            const std::size_t predicted = static_cast<std::size_t>(
                std::max_element(logits.begin(), logits.end()) - logits.begin());
            if (predicted == static_cast<std::size_t>(sample.label)) ++correct;

            ModelGrad<float> grad = model.backward(ctx, loss.grad_logits);
            accum.accumulate(grad);
        }
        accum.scale(1.0f / static_cast<float>(batch)); // mean over the minibatch
        auto grad_arrays = accum.arrays();
        std::vector<const std::vector<float>*> grads(grad_arrays.begin(),
                                                     grad_arrays.end());
        sgd_momentum_step(params, grads, velocity, lr, schedule.momentum);
    }

    const auto t1 = std::chrono::steady_clock::now();
    EpochStats stats;
    stats.epoch = epoch;
    stats.lr = lr;
    stats.mean_loss = loss_sum / static_cast<double>(data.samples.size());
    stats.train_accuracy =
        static_cast<double>(correct) / static_cast<double>(data.samples.size());
    stats.seconds = std::chrono::duration<double>(t1 - t0).count();
    return stats;
}

EvalResult evaluate(const Model<float>& model, const Alphabet& alphabet,
                    const Dataset& data, const DatasetSpec& spec,
                    const EncodeOptions& encode_options) {
    const ModelConfig& config = model.config();
    EvalResult result{0.0, ConfusionMatrix(config.class_count), 0.0};
    double loss_sum = 0.0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const Sample& sample = data.samples[i];
        check_label(sample, i, config.class_count);
        EncodedText<float> encoded = encode<float>(
            concat_fields(sample, spec), alphabet, config.input_length, encode_options);
        std::vector<float> logits = model.forward(encoded.frames, RunMode::eval);
        const std::size_t predicted = static_cast<std::size_t>(
            std::max_element(logits.begin(), logits.end()) - logits.begin());
        result.confusion.record(static_cast<std::size_t>(sample.label), predicted);
        loss_sum += softmax_nll(logits, static_cast<std::size_t>(sample.label)).loss;
    }
    result.accuracy = result.confusion.accuracy();
    result.mean_loss =
        data.samples.empty() ? 0.0 : loss_sum / static_cast<double>(data.samples.size());
    return result;
}

void train(Model<float>& model, const Alphabet& alphabet, const Dataset& data,
           const DatasetSpec& spec, const TrainSchedule& schedule, Rng& rng,
           const TrainRunOptions& options) {
    Velocity<float> velocity = Velocity<float>::zeros_like(model);
    for (std::size_t epoch = 1; epoch <= schedule.max_epochs; ++epoch) {
        EpochStats stats =
            train_epoch(model, alphabet, data, spec, schedule, epoch, velocity, rng,
                        options);
        const std::string line = format_epoch_stats(stats);
        if (options.progress) *options.progress << line << '\n' << std::flush;
        if (options.log_file) *options.log_file << line << '\n' << std::flush;
        if (options.after_epoch) options.after_epoch(model, stats, rng);
    }
}

} // namespace ccnet
