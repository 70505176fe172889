#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ccnet/errors.hpp"

namespace ccnet {

struct Sample {
    int label = 0; // 0-based class index
    std::vector<std::string> fields;
};

struct Dataset {
    std::vector<Sample> samples;
    std::size_t class_count = 0;

    std::size_t size() const { return samples.size(); }
};

/// Many-to-one remapping of raw file labels. Keys are the labels as they
/// appear in the CSV (1-based); values are the new 0-based classes. Rows
/// whose label has no entry are dropped. The image must be the
/// contiguous range 0..K-1.
struct LabelMap {
    std::map<int, int> remap;

    std::size_t image_size() const;
    void validate() const;
};

struct DatasetSpec {
    std::size_t class_count = 0;
    std::vector<std::string> class_names;   // optional, one per class
    std::size_t field_count = 0;            // 0 = infer from the first row
    std::vector<std::size_t> concat_order;  // empty = natural order
    std::string separator = " ";
    bool reverse_characters = false; // alternate reading of "reverse order"
    std::optional<LabelMap> label_map;

    void validate() const;
};

/// One parsed CSV record with the line number where it started.
struct CsvRow {
    std::size_t line = 0;
    std::vector<std::string> cells;
};

/// RFC-4180-style rows: comma separated, double-quote quoting with
/// doubled-quote escapes; quoted cells may span lines.
std::vector<CsvRow> read_csv_rows(const std::filesystem::path& path);
std::vector<CsvRow> parse_csv(std::string_view content, const std::string& source_name);

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells);
void write_csv_rows(const std::filesystem::path& path, const std::vector<CsvRow>& rows);

/// Loads `label,field1,...` records. Raw labels are 1-based; they are
/// either shifted to 0-based or passed through spec.label_map.
Dataset load_csv(const std::filesystem::path& path, const DatasetSpec& spec);

std::string concat_fields(const Sample& sample, const DatasetSpec& spec);

/// Disjoint per-class-exact train/test split, deterministic under seed.
std::pair<Dataset, Dataset> stratified_sample(const Dataset& data,
                                              std::size_t per_class_train,
                                              std::size_t per_class_test,
                                              std::uint64_t seed);

struct DedupeResult {
    Dataset dataset;
    std::size_t removed = 0;
};

/// Drops later records whose key fields exactly match an earlier record.
DedupeResult dedupe(const Dataset& data, const std::vector<std::size_t>& key_fields);

/// Keeps records whose concatenated text length (in characters) lies in
/// [min_chars, max_chars].
Dataset filter_by_length(const Dataset& data, const DatasetSpec& spec,
                         std::size_t min_chars, std::size_t max_chars);

} // namespace ccnet
