#include "ccnet/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

namespace ccnet {

namespace {

constexpr char kMagic[4] = {'C', 'C', 'N', 'K'};
constexpr std::uint32_t kVersion = 1;

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { raw(&v, 1); }
    void u32(std::uint32_t v) {
        std::uint8_t b[4];
        for (int i = 0; i < 4; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        raw(b, 4);
    }
    void u64(std::uint64_t v) {
        std::uint8_t b[8];
        for (int i = 0; i < 8; ++i) b[i] = static_cast<std::uint8_t>(v >> (8 * i));
        raw(b, 8);
    }
    void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        raw(s.data(), s.size());
    }
    void raw(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
    }

private:
    std::ostream& out_;
};

class Reader {
public:
    Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

    std::uint8_t u8() {
        std::uint8_t v;
        raw(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        raw(b, 4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
        return v;
    }
    std::uint64_t u64() {
        std::uint8_t b[8];
        raw(b, 8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
        return v;
    }
    float f32() { return std::bit_cast<float>(u32()); }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str() {
        std::uint32_t n = u32();
        std::string s(n, '\0');
        raw(s.data(), n);
        return s;
    }
    void raw(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (in_.gcount() != static_cast<std::streamsize>(n)) {
            throw IoError("checkpoint " + name_ + ": unexpected end of file");
        }
    }

private:
    std::istream& in_;
    std::string name_;
};

} // namespace

void save_checkpoint(const Model<float>& model, const Alphabet& alphabet,
                     const CheckpointMeta& meta, const std::filesystem::path& path) {
    const ModelConfig& config = model.config();
    if (!meta.class_names.empty() && meta.class_names.size() != config.class_count) {
        throw ShapeError("save_checkpoint: " + std::to_string(meta.class_names.size()) +
                         " class names for " + std::to_string(config.class_count) +
                         " classes");
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("save_checkpoint: cannot open " + path.string() + " for writing");
    }
    Writer w(out);
    w.raw(kMagic, 4);
    w.u32(kVersion);

    w.u32(static_cast<std::uint32_t>(config.conv_layers.size()));
    for (const ConvLayerSpec& layer : config.conv_layers) {
        w.u64(layer.frames);
        w.u64(layer.kernel);
        w.u64(layer.pool);
    }
    w.u32(static_cast<std::uint32_t>(config.fc_layers.size()));
    for (std::size_t units : config.fc_layers) w.u64(units);
    w.u64(config.input_length);
    w.u64(config.input_frames);
    w.u64(config.class_count);
    w.f64(config.dropout_prob);
    w.f64(config.init_stddev);
    w.u64(config.seed);
    w.u8(config.conv_bias ? 1 : 0);

    w.u32(static_cast<std::uint32_t>(alphabet.size()));
    for (char32_t c : alphabet.characters()) w.u32(static_cast<std::uint32_t>(c));

    w.u32(static_cast<std::uint32_t>(meta.class_names.size()));
    for (const std::string& name : meta.class_names) w.str(name);

    w.u64(meta.epoch);
    w.u64(meta.step);
    w.str(meta.rng_state);

    const auto params = model.param_arrays();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const std::vector<float>* arr : params) {
        w.u64(arr->size());
        for (float v : *arr) w.f32(v);
    }
    out.flush();
    if (!out) {
        throw IoError("save_checkpoint: write to " + path.string() + " failed");
    }
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("load_checkpoint: cannot open " + path.string());
    }
    Reader r(in, path.string());

    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) {
        throw IoError("load_checkpoint: " + path.string() +
                      " is not a checkpoint file (bad magic)");
    }
    const std::uint32_t version = r.u32();
    if (version != kVersion) {
        throw IoError("load_checkpoint: " + path.string() + ": unsupported version " +
                      std::to_string(version) + " (expected " + std::to_string(kVersion) +
                      ")");
    }

    ModelConfig config;
    const std::uint32_t conv_count = r.u32();
    for (std::uint32_t i = 0; i < conv_count; ++i) {
        ConvLayerSpec layer;
        layer.frames = r.u64();
        layer.kernel = r.u64();
        layer.pool = r.u64();
        config.conv_layers.push_back(layer);
    }
    const std::uint32_t fc_count = r.u32();
    for (std::uint32_t i = 0; i < fc_count; ++i) config.fc_layers.push_back(r.u64());
    config.input_length = r.u64();
    config.input_frames = r.u64();
    config.class_count = r.u64();
    config.dropout_prob = r.f64();
    config.init_stddev = r.f64();
    config.seed = r.u64();
    config.conv_bias = r.u8() != 0;

    const std::uint32_t char_count = r.u32();
    std::vector<char32_t> chars;
    chars.reserve(char_count);
    for (std::uint32_t i = 0; i < char_count; ++i) {
        chars.push_back(static_cast<char32_t>(r.u32()));
    }

    CheckpointMeta meta;
    const std::uint32_t name_count = r.u32();
    for (std::uint32_t i = 0; i < name_count; ++i) meta.class_names.push_back(r.str());
    meta.epoch = r.u64();
    meta.step = r.u64();
    meta.rng_state = r.str();

    Model<float> model = Model<float>::zeros(config);
    auto params = model.param_arrays();
    const std::uint32_t array_count = r.u32();
    if (array_count != params.size()) {
        throw IoError("load_checkpoint: " + path.string() + ": expected " +
                      std::to_string(params.size()) + " parameter arrays, found " +
                      std::to_string(array_count));
    }
    for (std::vector<float>* arr : params) {
        const std::uint64_t n = r.u64();
        if (n != arr->size()) {
            throw IoError("load_checkpoint: " + path.string() +
                          ": parameter array size " + std::to_string(n) +
                          " does not match configured " + std::to_string(arr->size()));
        }
        for (float& v : *arr) v = r.f32();
    }

    Alphabet alphabet = Alphabet::from_characters(std::move(chars));
    if (alphabet.size() != config.input_frames) {
        throw IoError("load_checkpoint: " + path.string() + ": alphabet size " +
                      std::to_string(alphabet.size()) + " does not match input frames " +
                      std::to_string(config.input_frames));
    }
    return LoadedCheckpoint{std::move(model), std::move(alphabet), std::move(meta)};
}

} // namespace ccnet
