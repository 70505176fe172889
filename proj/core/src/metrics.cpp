#include "ccnet/metrics.hpp"

namespace ccnet {

double ConfusionMatrix::accuracy() const {
    if (total_ == 0) return 0.0;
    std::size_t trace = 0;
    for (std::size_t c = 0; c < classes_; ++c) trace += counts_[c * classes_ + c];
    return static_cast<double>(trace) / static_cast<double>(total_);
}

std::vector<std::vector<double>> ConfusionMatrix::normalize_rows() const {
    std::vector<std::vector<double>> rows(classes_, std::vector<double>(classes_, 0.0));
    for (std::size_t t = 0; t < classes_; ++t) {
        std::size_t row_sum = 0;
        for (std::size_t p = 0; p < classes_; ++p) row_sum += counts_[t * classes_ + p];
        if (row_sum == 0) continue;
        for (std::size_t p = 0; p < classes_; ++p) {
            rows[t][p] = static_cast<double>(counts_[t * classes_ + p]) /
                         static_cast<double>(row_sum);
        }
    }
    return rows;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
    if (other.classes_ != classes_) {
        throw ShapeError("ConfusionMatrix::merge: class counts differ (" +
                         std::to_string(classes_) + " vs " +
                         std::to_string(other.classes_) + ")");
    }
    for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
}

void ConfusionMatrix::write_csv(std::ostream& out) const {
    for (std::size_t t = 0; t < classes_; ++t) {
        for (std::size_t p = 0; p < classes_; ++p) {
            if (p > 0) out << ',';
            out << counts_[t * classes_ + p];
        }
        out << '\n';
    }
}

} // namespace ccnet
