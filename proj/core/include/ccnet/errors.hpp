#pragma once

#include <stdexcept>
#include <string>

namespace ccnet {

/// Dimension/shape/range precondition violations (bad frame counts,
/// inputs shorter than a receptive field, out-of-range class indices).
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Malformed content in user-supplied data (CSV rows, thesaurus lines,
/// alphabet files, label maps).
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Filesystem and stream failures, including corrupt or truncated
/// checkpoint files.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// API misuse: calling backward without a cached forward pass, argmax
/// indices that do not belong to the paired forward call, and similar
/// internal-consistency violations.
class StateError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace ccnet
