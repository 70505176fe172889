#pragma once

#include <cstddef>
#include <ostream>
#include <vector>

#include "ccnet/errors.hpp"

namespace ccnet {

/// Confusion counts with true classes as rows and predicted classes as
/// columns.
class ConfusionMatrix {
public:
    explicit ConfusionMatrix(std::size_t class_count)
        : classes_(class_count), counts_(class_count * class_count, 0) {
        if (class_count < 1) {
            throw ShapeError("ConfusionMatrix: class_count must be >= 1");
        }
    }

    std::size_t class_count() const { return classes_; }
    std::size_t total() const { return total_; }

    void record(std::size_t true_class, std::size_t predicted_class) {
        check(true_class);
        check(predicted_class);
        ++counts_[true_class * classes_ + predicted_class];
        ++total_;
    }

    std::size_t count(std::size_t true_class, std::size_t predicted_class) const {
        check(true_class);
        check(predicted_class);
        return counts_[true_class * classes_ + predicted_class];
    }

    /// trace / total; 0 for an empty matrix.
    double accuracy() const;

    /// Each row divided by its sum; empty rows come back all-zero.
    std::vector<std::vector<double>> normalize_rows() const;

    /// Elementwise sum, for merging shards evaluated in parallel.
    void merge(const ConfusionMatrix& other);

    /// Plain CSV of the raw counts, one row per true class.
    void write_csv(std::ostream& out) const;

private:
    void check(std::size_t c) const {
        if (c >= classes_) {
            throw ShapeError("ConfusionMatrix: class " + std::to_string(c) +
                             " out of range for " + std::to_string(classes_) +
                             " classes");
        }
    }

    std::size_t classes_;
    std::vector<std::size_t> counts_;
    std::size_t total_ = 0;
};

} // namespace ccnet
