#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "ccnet/errors.hpp"

namespace ccnet {

/// A stack of 1-D signals: `frames` rows, `length` positions per row,
/// stored row-major. This is the universal activation/input carrier for
/// the temporal layers.
template <class T>
struct FrameSeq {
    std::size_t frames = 0;
    std::size_t length = 0;
    std::vector<T> data; // frames * length, row-major

    FrameSeq() = default;
    FrameSeq(std::size_t frames_, std::size_t length_)
        : frames(frames_), length(length_), data(frames_ * length_, T(0)) {
        if (frames_ < 1 || length_ < 1) {
            throw ShapeError("FrameSeq: frames and length must be >= 1, got " +
                             shape_str());
        }
    }

    T& at(std::size_t frame, std::size_t pos) { return data[frame * length + pos]; }
    const T& at(std::size_t frame, std::size_t pos) const {
        return data[frame * length + pos];
    }

    T* row(std::size_t frame) { return data.data() + frame * length; }
    const T* row(std::size_t frame) const { return data.data() + frame * length; }

    bool same_shape(const FrameSeq& other) const {
        return frames == other.frames && length == other.length;
    }

    std::string shape_str() const {
        return std::to_string(frames) + "x" + std::to_string(length);
    }

    bool all_finite() const {
        for (const T& v : data) {
            if (!std::isfinite(static_cast<double>(v))) return false;
        }
        return true;
    }
};

/// Per-frame argmax positions recorded by max-pooling, same grid as the
/// pooled output.
struct ArgmaxMap {
    std::size_t frames = 0;
    std::size_t length = 0;
    std::vector<std::size_t> index; // input position per output cell

    std::size_t& at(std::size_t frame, std::size_t pos) {
        return index[frame * length + pos];
    }
    std::size_t at(std::size_t frame, std::size_t pos) const {
        return index[frame * length + pos];
    }
};

} // namespace ccnet
