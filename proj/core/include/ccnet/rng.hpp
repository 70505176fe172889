#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <random>

namespace ccnet {

/// Deterministic random source. std::mt19937_64 is fully specified by the
/// standard, but the std distributions are not, so every draw here
/// (bounded ints, uniform reals, gaussians, shuffles) is implemented
/// explicitly. Two Rng instances with the same seed produce identical
/// streams on any platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Unbiased uniform integer in [0, n). n must be nonzero.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via Box-Muller; the spare value is cached.
    double gaussian();

    double gaussian(double mean, double stddev) {
        return mean + stddev * gaussian();
    }

    /// Fisher-Yates permutation of v.
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

    /// k distinct indices drawn from [0, n), in draw order.
    std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k);

    /// Serializes the engine state as text. The Box-Muller spare is
    /// discarded so that restore(save()) and a fresh save() agree
    /// byte for byte.
    std::string save_state();
    void restore_state(const std::string& state);

private:
    std::mt19937_64 engine_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

} // namespace ccnet
