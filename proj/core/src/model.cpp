#include "ccnet/model.hpp"

namespace ccnet {

namespace {

std::vector<ConvLayerSpec> standard_conv_stack(std::size_t frames) {
    return {
        {frames, 7, 3}, {frames, 7, 3}, {frames, 3, 0},
        {frames, 3, 0}, {frames, 3, 0}, {frames, 3, 3},
    };
}

} // namespace

ModelConfig ModelConfig::large(std::size_t input_length, std::size_t input_frames,
                               std::size_t class_count) {
    ModelConfig c;
    c.conv_layers = standard_conv_stack(1024);
    c.fc_layers = {2048, 2048, class_count};
    c.input_length = input_length;
    c.input_frames = input_frames;
    c.class_count = class_count;
    c.init_stddev = 0.02;
    return c;
}

ModelConfig ModelConfig::small(std::size_t input_length, std::size_t input_frames,
                               std::size_t class_count) {
    ModelConfig c;
    c.conv_layers = standard_conv_stack(256);
    c.fc_layers = {1024, 1024, class_count};
    c.input_length = input_length;
    c.input_frames = input_frames;
    c.class_count = class_count;
    c.init_stddev = 0.05;
    return c;
}

ModelConfig ModelConfig::scaled(std::size_t conv_frames, std::size_t fc_units,
                                std::size_t input_length, std::size_t input_frames,
                                std::size_t class_count) {
    ModelConfig c;
    c.conv_layers = standard_conv_stack(conv_frames);
    c.fc_layers = {fc_units, fc_units, class_count};
    c.input_length = input_length;
    c.input_frames = input_frames;
    c.class_count = class_count;
    c.init_stddev = 0.05;
    return c;
}

void ModelConfig::validate() const {
    if (input_frames < 1) throw ShapeError("ModelConfig: input_frames must be >= 1");
    if (input_length < 1) throw ShapeError("ModelConfig: input_length must be >= 1");
    if (class_count < 2) throw ShapeError("ModelConfig: class_count must be >= 2");
    if (fc_layers.empty()) throw ShapeError("ModelConfig: no fully-connected layers");
    if (fc_layers.back() != class_count) {
        throw ShapeError("ModelConfig: last fc layer has " +
                         std::to_string(fc_layers.back()) + " units but class_count is " +
                         std::to_string(class_count));
    }
    for (std::size_t i = 0; i < conv_layers.size(); ++i) {
        const ConvLayerSpec& l = conv_layers[i];
        if (l.frames < 1 || l.kernel < 1) {
            throw ShapeError("ModelConfig: conv layer " + std::to_string(i + 1) +
                             " has invalid frames/kernel");
        }
    }
    if (!(dropout_prob >= 0.0 && dropout_prob < 1.0)) {
        throw ShapeError("ModelConfig: dropout_prob must be in [0, 1)");
    }
    if (!(init_stddev > 0.0)) {
        throw ShapeError("ModelConfig: init_stddev must be positive");
    }
    output_length_after_conv(input_length); // throws if any layer collapses
}

std::size_t ModelConfig::output_length_after_conv(std::size_t l0) const {
    std::size_t l = l0;
    for (std::size_t i = 0; i < conv_layers.size(); ++i) {
        const ConvLayerSpec& layer = conv_layers[i];
        if (l < layer.kernel) {
            throw ShapeError("input too short: length " + std::to_string(l) +
                             " < kernel width " + std::to_string(layer.kernel) +
                             " at conv layer " + std::to_string(i + 1));
        }
        l = window_count(l, layer.kernel, 1);
        if (layer.pool > 0) {
            if (l < layer.pool) {
                throw ShapeError("input too short: length " + std::to_string(l) +
                                 " < pool width " + std::to_string(layer.pool) +
                                 " at conv layer " + std::to_string(i + 1));
            }
            l = window_count(l, layer.pool, layer.pool);
        }
    }
    return l;
}

std::size_t ModelConfig::flattened_size() const {
    const std::size_t out_len = output_length_after_conv(input_length);
    const std::size_t frames =
        conv_layers.empty() ? input_frames : conv_layers.back().frames;
    return out_len * frames;
}

} // namespace ccnet
