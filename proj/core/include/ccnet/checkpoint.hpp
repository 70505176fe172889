#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "ccnet/model.hpp"
#include "ccnet/quantizer.hpp"

namespace ccnet {

struct CheckpointMeta {
    std::vector<std::string> class_names; // empty or one per class
    std::uint64_t epoch = 0;
    std::uint64_t step = 0;
    std::string rng_state; // Rng::save_state text, empty if untracked
};

struct LoadedCheckpoint {
    Model<float> model;
    Alphabet alphabet;
    CheckpointMeta meta;
};

/// Binary checkpoint: magic "CCNK", format version, config block,
/// alphabet, class names, training metadata, then the parameter arrays
/// in layer order as little-endian 32-bit floats. Writing is canonical,
/// so save -> load -> save reproduces the file byte for byte.
void save_checkpoint(const Model<float>& model, const Alphabet& alphabet,
                     const CheckpointMeta& meta, const std::filesystem::path& path);

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

} // namespace ccnet
