#include "ccnet/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "ccnet/rng.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

// ---------------------------------------------------------------------------
// Vocabulary
// ---------------------------------------------------------------------------

Vocabulary Vocabulary::build(const std::vector<std::string>& texts, std::size_t cap) {
    if (texts.empty()) {
        throw DataError("Vocabulary::build: empty corpus");
    }
    std::unordered_map<std::string, std::size_t> counts;
    for (const std::string& t : texts) {
        for (std::string& w : text::word_tokens(t)) counts[std::move(w)]++;
    }
    std::vector<std::pair<std::string, std::size_t>> ranked(counts.begin(), counts.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    if (ranked.size() > cap) ranked.resize(cap);

    Vocabulary v;
    for (auto& [word, freq] : ranked) {
        v.words_.push_back(std::move(word));
        v.frequencies_.push_back(freq);
    }
    v.rebuild_index();
    return v;
}

void Vocabulary::rebuild_index() {
    index_.clear();
    for (std::size_t i = 0; i < words_.size(); ++i) index_.emplace(words_[i], i);
}

void Vocabulary::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("Vocabulary: cannot open " + path.string() + " for writing");
    }
    for (std::size_t i = 0; i < words_.size(); ++i) {
        out << words_[i] << '\t' << frequencies_[i] << '\n';
    }
    if (!out) {
        throw IoError("Vocabulary: write to " + path.string() + " failed");
    }
}

Vocabulary Vocabulary::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("Vocabulary: cannot open " + path.string());
    }
    Vocabulary v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError("Vocabulary: " + path.string() + ":" +
                            std::to_string(line_no) + ": missing tab");
        }
        v.words_.push_back(line.substr(0, tab));
        try {
            v.frequencies_.push_back(std::stoull(line.substr(tab + 1)));
        } catch (const std::exception&) {
            throw DataError("Vocabulary: " + path.string() + ":" +
                            std::to_string(line_no) + ": unparseable frequency");
        }
    }
    v.rebuild_index();
    return v;
}

std::vector<float> featurize_bow(const std::string& text_in, const Vocabulary& vocab,
                                 bool binarize) {
    std::vector<float> features(vocab.size(), 0.0f);
    for (const std::string& w : text::word_tokens(text_in)) {
        if (auto idx = vocab.index_of(w)) {
            if (binarize) {
                features[*idx] = 1.0f;
            } else {
                features[*idx] += 1.0f;
            }
        }
    }
    return features;
}

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

EmbeddingTable EmbeddingTable::from_rows(std::vector<std::string> words,
                                         std::vector<float> vectors, std::size_t dim) {
    if (dim == 0 || words.empty() || vectors.size() != words.size() * dim) {
        throw DataError("EmbeddingTable: inconsistent rows (" +
                        std::to_string(words.size()) + " words, " +
                        std::to_string(vectors.size()) + " values, dim " +
                        std::to_string(dim) + ")");
    }
    EmbeddingTable t;
    t.dim_ = dim;
    t.words_ = std::move(words);
    t.vectors_ = std::move(vectors);
    for (std::size_t i = 0; i < t.words_.size(); ++i) t.index_.emplace(t.words_[i], i);
    return t;
}

EmbeddingTable EmbeddingTable::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("EmbeddingTable: cannot open " + path.string());
    }
    std::vector<std::string> words;
    std::vector<float> vectors;
    std::size_t dim = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string word;
        row >> word;
        std::vector<float> vals;
        double v;
        while (row >> v) vals.push_back(static_cast<float>(v));
        // A leading `count dim` header line has a numeric "word" and one value.
        if (line_no == 1 && vals.size() == 1 &&
            word.find_first_not_of("0123456789") == std::string::npos) {
            continue;
        }
        if (vals.empty()) {
            throw DataError("EmbeddingTable: " + path.string() + ":" +
                            std::to_string(line_no) + ": no vector values");
        }
        if (dim == 0) {
            dim = vals.size();
        } else if (vals.size() != dim) {
            throw DataError("EmbeddingTable: " + path.string() + ":" +
                            std::to_string(line_no) + ": expected " +
                            std::to_string(dim) + " values, found " +
                            std::to_string(vals.size()));
        }
        words.push_back(std::move(word));
        vectors.insert(vectors.end(), vals.begin(), vals.end());
    }
    if (words.empty()) {
        throw DataError("EmbeddingTable: " + path.string() + " has no vectors");
    }
    return from_rows(std::move(words), std::move(vectors), dim);
}

// ---------------------------------------------------------------------------
// k-means
// ---------------------------------------------------------------------------

void Centroids::recompute_norms() {
    squared_norms.assign(k, 0.0);
    for (std::size_t c = 0; c < k; ++c) {
        const float* v = row(c);
        double acc = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc += static_cast<double>(v[j]) * v[j];
        squared_norms[c] = acc;
    }
}

std::size_t Centroids::nearest(const float* point) const {
    std::size_t best = 0;
    double best_score = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < k; ++c) {
        const float* v = row(c);
        double dot = 0.0;
        for (std::size_t j = 0; j < dim; ++j) dot += static_cast<double>(v[j]) * point[j];
        const double score = squared_norms[c] - 2.0 * dot;
        if (score < best_score) {
            best_score = score;
            best = c;
        }
    }
    return best;
}

namespace {

double squared_distance(const float* a, const float* b, std::size_t dim) {
    double acc = 0.0;
    for (std::size_t j = 0; j < dim; ++j) {
        const double diff = static_cast<double>(a[j]) - b[j];
        acc += diff * diff;
    }
    return acc;
}

} // namespace

KmeansResult kmeans(const std::vector<float>& points, std::size_t count,
                    std::size_t dim, std::size_t k, std::uint64_t seed,
                    std::size_t max_iters) {
    if (count == 0 || dim == 0 || points.size() != count * dim) {
        throw ShapeError("kmeans: inconsistent point buffer (" +
                         std::to_string(points.size()) + " values for " +
                         std::to_string(count) + "x" + std::to_string(dim) + ")");
    }
    if (k < 1 || k > count) {
        throw ShapeError("kmeans: k=" + std::to_string(k) + " with only " +
                         std::to_string(count) + " points");
    }

    Rng rng(seed);
    KmeansResult result;
    Centroids& c = result.centroids;
    c.k = k;
    c.dim = dim;
    c.values.assign(k * dim, 0.0f);

    // k-means++ seeding: first centroid uniform, then proportional to the
    // squared distance to the closest chosen centroid.
    auto point = [&](std::size_t i) { return points.data() + i * dim; };
    std::vector<double> dist2(count, std::numeric_limits<double>::infinity());
    {
        const std::size_t first = static_cast<std::size_t>(rng.below(count));
        std::copy_n(point(first), dim, c.values.begin());
    }
    for (std::size_t chosen = 1; chosen < k; ++chosen) {
        const float* last = c.values.data() + (chosen - 1) * dim;
        double total = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            dist2[i] = std::min(dist2[i], squared_distance(point(i), last, dim));
            total += dist2[i];
        }
        std::size_t pick = 0;
        if (total > 0.0) {
            const double u = rng.uniform() * total;
            double cumulative = 0.0;
            pick = count - 1;
            for (std::size_t i = 0; i < count; ++i) {
                cumulative += dist2[i];
                if (u < cumulative) {
                    pick = i;
                    break;
                }
            }
        } else {
            pick = static_cast<std::size_t>(rng.below(count)); // all points coincide
        }
        std::copy_n(point(pick), dim, c.values.begin() + chosen * dim);
    }
    c.recompute_norms();

    std::vector<std::size_t> assignment(count, 0);
    std::vector<std::size_t> previous(count, count); // impossible value
    std::vector<double> sums(k * dim, 0.0);
    std::vector<std::size_t> sizes(k, 0);

    for (std::size_t iter = 0; iter < max_iters; ++iter) {
        double inertia = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            assignment[i] = c.nearest(point(i));
            inertia += squared_distance(point(i), c.row(assignment[i]), dim);
        }
        result.inertia_history.push_back(inertia);
        result.iterations = iter + 1;
        if (assignment == previous) break;
        previous = assignment;

        std::fill(sums.begin(), sums.end(), 0.0);
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < count; ++i) {
            const float* p = point(i);
            double* s = sums.data() + assignment[i] * dim;
            for (std::size_t j = 0; j < dim; ++j) s[j] += p[j];
            ++sizes[assignment[i]];
        }
        for (std::size_t cl = 0; cl < k; ++cl) {
            if (sizes[cl] == 0) {
                // Reseed from the point farthest from its centroid.
                std::size_t far = 0;
                double far_d = -1.0;
                for (std::size_t i = 0; i < count; ++i) {
                    const double d =
                        squared_distance(point(i), c.row(assignment[i]), dim);
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                std::copy_n(point(far), dim, c.values.begin() + cl * dim);
                continue;
            }
            float* dst = c.values.data() + cl * dim;
            for (std::size_t j = 0; j < dim; ++j) {
                dst[j] = static_cast<float>(sums[cl * dim + j] /
                                            static_cast<double>(sizes[cl]));
            }
        }
        c.recompute_norms();
    }
    return result;
}

// ---------------------------------------------------------------------------
// Codebook
// ---------------------------------------------------------------------------

namespace {
constexpr char kCodebookMagic[4] = {'C', 'C', 'C', 'B'};
}

CentroidCodebook build_codebook(std::shared_ptr<const EmbeddingTable> table,
                                std::size_t k, std::uint64_t seed,
                                std::size_t max_iters) {
    if (!table) {
        throw StateError("build_codebook: null embedding table");
    }
    KmeansResult km = kmeans(table->vectors(), table->size(), table->dim(), k, seed,
                             max_iters);
    return CentroidCodebook{std::move(km.centroids), std::move(table)};
}

void CentroidCodebook::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("CentroidCodebook: cannot open " + path.string() +
                      " for writing");
    }
    auto u64 = [&](std::uint64_t v) {
        char b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<char>(v >> (8 * i));
        out.write(b, 8);
    };
    out.write(kCodebookMagic, 4);
    u64(centroids.k);
    u64(centroids.dim);
    out.write(reinterpret_cast<const char*>(centroids.values.data()),
              static_cast<std::streamsize>(centroids.values.size() * sizeof(float)));
    u64(table->size());
    for (std::size_t i = 0; i < table->size(); ++i) {
        const std::string& w = table->words()[i];
        u64(w.size());
        out.write(w.data(), static_cast<std::streamsize>(w.size()));
    }
    out.write(reinterpret_cast<const char*>(table->vectors().data()),
              static_cast<std::streamsize>(table->vectors().size() * sizeof(float)));
    if (!out) {
        throw IoError("CentroidCodebook: write to " + path.string() + " failed");
    }
}

CentroidCodebook CentroidCodebook::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("CentroidCodebook: cannot open " + path.string());
    }
    auto fail = [&]() -> IoError {
        return IoError("CentroidCodebook: " + path.string() + " is truncated or corrupt");
    };
    auto u64 = [&]() -> std::uint64_t {
        char b[8];
        in.read(b, 8);
        if (in.gcount() != 8) throw fail();
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(b[i])) << (8 * i);
        return v;
    };
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kCodebookMagic, 4) != 0) {
        throw IoError("CentroidCodebook: " + path.string() + " has bad magic");
    }
    CentroidCodebook cb;
    cb.centroids.k = u64();
    cb.centroids.dim = u64();
    cb.centroids.values.resize(cb.centroids.k * cb.centroids.dim);
    in.read(reinterpret_cast<char*>(cb.centroids.values.data()),
            static_cast<std::streamsize>(cb.centroids.values.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) !=
        cb.centroids.values.size() * sizeof(float)) {
        throw fail();
    }
    cb.centroids.recompute_norms();
    const std::uint64_t word_count = u64();
    std::vector<std::string> words(word_count);
    for (auto& w : words) {
        w.resize(u64());
        in.read(w.data(), static_cast<std::streamsize>(w.size()));
        if (static_cast<std::size_t>(in.gcount()) != w.size()) throw fail();
    }
    std::vector<float> vectors(word_count * cb.centroids.dim);
    in.read(reinterpret_cast<char*>(vectors.data()),
            static_cast<std::streamsize>(vectors.size() * sizeof(float)));
    if (static_cast<std::size_t>(in.gcount()) != vectors.size() * sizeof(float)) {
        throw fail();
    }
    cb.table = std::make_shared<EmbeddingTable>(EmbeddingTable::from_rows(
        std::move(words), std::move(vectors), cb.centroids.dim));
    return cb;
}

std::vector<float> featurize_centroids(const std::string& text_in,
                                       const CentroidCodebook& codebook) {
    std::vector<float> features(codebook.centroids.k, 0.0f);
    for (const std::string& w : text::word_tokens(text_in)) {
        const float* vec = codebook.table->lookup(w);
        if (vec == nullptr) continue;
        features[codebook.centroids.nearest(vec)] += 1.0f;
    }
    return features;
}

// ---------------------------------------------------------------------------
// Multinomial logistic regression
// ---------------------------------------------------------------------------

LogRegModel train_logreg(const std::vector<std::vector<float>>& features,
                         const std::vector<int>& labels, std::size_t class_count,
                         const LogRegOptions& options) {
    if (features.empty() || features.size() != labels.size()) {
        throw ShapeError("train_logreg: " + std::to_string(features.size()) +
                         " feature rows vs " + std::to_string(labels.size()) +
                         " labels");
    }
    const std::size_t dim = features[0].size();
    for (std::size_t i = 0; i < features.size(); ++i) {
        if (features[i].size() != dim) {
            throw ShapeError("train_logreg: row " + std::to_string(i) + " has " +
                             std::to_string(features[i].size()) + " values, expected " +
                             std::to_string(dim));
        }
        if (labels[i] < 0 || static_cast<std::size_t>(labels[i]) >= class_count) {
            throw DataError("train_logreg: record " + std::to_string(i) + ": label " +
                            std::to_string(labels[i]) + " out of class range");
        }
    }

    LogRegModel model;
    model.weights = LinearWeights<float>(class_count, dim);
    LinearGrad<float> accum = LinearGrad<float>::zeros_like(model.weights);

    Rng rng(options.seed);
    std::vector<std::size_t> order(features.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t end = std::min(order.size(), start + options.batch_size);
            std::fill(accum.matrix.begin(), accum.matrix.end(), 0.0f);
            std::fill(accum.bias.begin(), accum.bias.end(), 0.0f);
            for (std::size_t b = start; b < end; ++b) {
                const std::vector<float>& x = features[order[b]];
                std::vector<float> logits = linear_forward(x, model.weights);
                SoftmaxLoss<float> loss =
                    softmax_nll(logits, static_cast<std::size_t>(labels[order[b]]));
                LinearBackwardResult<float> back =
                    linear_backward(x, model.weights, loss.grad_logits);
                for (std::size_t i = 0; i < accum.matrix.size(); ++i)
                    accum.matrix[i] += back.grads.matrix[i];
                for (std::size_t i = 0; i < accum.bias.size(); ++i)
                    accum.bias[i] += back.grads.bias[i];
            }
            const float scale =
                static_cast<float>(options.lr) / static_cast<float>(end - start);
            for (std::size_t i = 0; i < accum.matrix.size(); ++i)
                model.weights.matrix[i] -= scale * accum.matrix[i];
            for (std::size_t i = 0; i < accum.bias.size(); ++i)
                model.weights.bias[i] -= scale * accum.bias[i];
        }
    }
    return model;
}

std::size_t predict_logreg(const LogRegModel& model, const std::vector<float>& features) {
    std::vector<float> logits = linear_forward(features, model.weights);
    return static_cast<std::size_t>(
        std::max_element(logits.begin(), logits.end()) - logits.begin());
}

} // namespace ccnet
