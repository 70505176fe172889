#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/tensor_ops.hpp"

namespace ccnet {

/// Most frequent training-set words, ranked by descending frequency with
/// lexicographic tie-breaking.
class Vocabulary {
public:
    static Vocabulary build(const std::vector<std::string>& texts, std::size_t cap);

    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<std::size_t>& frequencies() const { return frequencies_; }

    std::optional<std::size_t> index_of(const std::string& word) const {
        auto it = index_.find(word);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    /// `word<TAB>frequency` per line, in rank order.
    void save(const std::filesystem::path& path) const;
    static Vocabulary load(const std::filesystem::path& path);

private:
    std::vector<std::string> words_;
    std::vector<std::size_t> frequencies_;
    std::unordered_map<std::string, std::size_t> index_;

    void rebuild_index();
};

/// Raw in-vocabulary token counts; out-of-vocabulary tokens are ignored.
std::vector<float> featurize_bow(const std::string& text, const Vocabulary& vocab,
                                 bool binarize = false);

/// Word -> dense vector table, loaded from a text file of
/// `word v1 v2 ... vd` lines (an optional `count dim` header line is
/// accepted).
class EmbeddingTable {
public:
    static EmbeddingTable load(const std::filesystem::path& path);
    static EmbeddingTable from_rows(std::vector<std::string> words,
                                    std::vector<float> vectors, std::size_t dim);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }
    const std::vector<std::string>& words() const { return words_; }
    const std::vector<float>& vectors() const { return vectors_; }
    const float* row(std::size_t i) const { return vectors_.data() + i * dim_; }

    const float* lookup(const std::string& word) const {
        auto it = index_.find(word);
        return it == index_.end() ? nullptr : row(it->second);
    }

private:
    std::size_t dim_ = 0;
    std::vector<std::string> words_;
    std::vector<float> vectors_; // size() * dim_
    std::unordered_map<std::string, std::size_t> index_;
};

struct Centroids {
    std::size_t k = 0;
    std::size_t dim = 0;
    std::vector<float> values; // k * dim
    std::vector<double> squared_norms;

    const float* row(std::size_t i) const { return values.data() + i * dim; }
    void recompute_norms();

    /// Nearest centroid by Euclidean distance, computed via
    /// |c|^2 - 2 x.c (the |x|^2 term is constant in the argmin); ties go
    /// to the lowest index.
    std::size_t nearest(const float* point) const;
};

struct KmeansResult {
    Centroids centroids;
    std::vector<double> inertia_history; // after each assignment step
    std::size_t iterations = 0;
};

/// Lloyd's algorithm with k-means++ seeding. Stops at an assignment
/// fixpoint or after max_iters. Empty clusters are reseeded from the
/// point farthest from its assigned centroid.
KmeansResult kmeans(const std::vector<float>& points, std::size_t count,
                    std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters = 100);

struct CentroidCodebook {
    Centroids centroids;
    std::shared_ptr<const EmbeddingTable> table;

    void save(const std::filesystem::path& path) const;
    static CentroidCodebook load(const std::filesystem::path& path);
};

CentroidCodebook build_codebook(std::shared_ptr<const EmbeddingTable> table,
                                std::size_t k, std::uint64_t seed,
                                std::size_t max_iters = 100);

/// Counts of nearest centroids over the text's in-table tokens.
std::vector<float> featurize_centroids(const std::string& text,
                                       const CentroidCodebook& codebook);

struct LogRegModel {
    LinearWeights<float> weights;

    std::size_t class_count() const { return weights.out_units; }
};

struct LogRegOptions {
    std::size_t epochs = 20;
    double lr = 0.01;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
};

/// Multinomial logistic regression trained by minibatch SGD on the
/// softmax NLL, zero-initialized, no regularization.
LogRegModel train_logreg(const std::vector<std::vector<float>>& features,
                         const std::vector<int>& labels, std::size_t class_count,
                         const LogRegOptions& options = {});

std::size_t predict_logreg(const LogRegModel& model, const std::vector<float>& features);

} // namespace ccnet
