#include "ccnet/datakit.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "ccnet/rng.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

std::size_t LabelMap::image_size() const {
    std::unordered_set<int> image;
    for (const auto& [from, to] : remap) image.insert(to);
    return image.size();
}

void LabelMap::validate() const {
    if (remap.empty()) {
        throw DataError("LabelMap: empty mapping");
    }
    std::unordered_set<int> image;
    int max_to = -1;
    for (const auto& [from, to] : remap) {
        if (to < 0) {
            throw DataError("LabelMap: negative target class " + std::to_string(to));
        }
        image.insert(to);
        max_to = std::max(max_to, to);
    }
    if (static_cast<std::size_t>(max_to + 1) != image.size()) {
        throw DataError("LabelMap: target classes are not contiguous from 0");
    }
}

void DatasetSpec::validate() const {
    if (class_count < 1) {
        throw DataError("DatasetSpec: class_count must be >= 1");
    }
    if (!class_names.empty() && class_names.size() != class_count) {
        throw DataError("DatasetSpec: " + std::to_string(class_names.size()) +
                        " class names for " + std::to_string(class_count) + " classes");
    }
    if (label_map) {
        label_map->validate();
        if (label_map->image_size() != class_count) {
            throw DataError("DatasetSpec: label map produces " +
                            std::to_string(label_map->image_size()) +
                            " classes but class_count is " + std::to_string(class_count));
        }
    }
    if (!concat_order.empty()) {
        std::vector<bool> seen(concat_order.size(), false);
        for (std::size_t idx : concat_order) {
            if (idx >= concat_order.size() || seen[idx]) {
                throw DataError("DatasetSpec: concat_order is not a permutation");
            }
            seen[idx] = true;
        }
        if (field_count != 0 && concat_order.size() != field_count) {
            throw DataError("DatasetSpec: concat_order has " +
                            std::to_string(concat_order.size()) + " entries for " +
                            std::to_string(field_count) + " fields");
        }
    }
}

std::vector<CsvRow> parse_csv(std::string_view content, const std::string& source_name) {
    std::vector<CsvRow> rows;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = content.size();
    while (i < n) {
        CsvRow row;
        row.line = line;
        std::string cell;
        bool in_quotes = false;
        bool row_done = false;
        bool any_content = false;
        while (i < n && !row_done) {
            const char c = content[i];
            if (in_quotes) {
                if (c == '"') {
                    if (i + 1 < n && content[i + 1] == '"') {
                        cell.push_back('"');
                        i += 2;
                    } else {
                        in_quotes = false;
                        ++i;
                    }
                } else {
                    if (c == '\n') ++line;
                    cell.push_back(c);
                    ++i;
                }
                continue;
            }
            switch (c) {
            case '"':
                if (!cell.empty()) {
                    throw DataError(source_name + ":" + std::to_string(line) +
                                    ": stray quote inside unquoted cell");
                }
                in_quotes = true;
                any_content = true;
                ++i;
                break;
            case ',':
                row.cells.push_back(std::move(cell));
                cell.clear();
                any_content = true;
                ++i;
                break;
            case '\r':
                ++i;
                if (i < n && content[i] == '\n') {
                    ++i;
                    ++line;
                    row_done = true;
                }
                break;
            case '\n':
                ++i;
                ++line;
                row_done = true;
                break;
            default:
                cell.push_back(c);
                any_content = true;
                ++i;
                break;
            }
        }
        if (in_quotes) {
            throw DataError(source_name + ":" + std::to_string(row.line) +
                            ": unterminated quoted cell");
        }
        if (!any_content && row.cells.empty() && cell.empty()) {
            continue; // blank line
        }
        row.cells.push_back(std::move(cell));
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<CsvRow> read_csv_rows(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("read_csv_rows: cannot open " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.string());
}

void write_csv_row(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) out << ',';
        const std::string& cell = cells[i];
        const bool needs_quotes =
            cell.find_first_of(",\"\n\r") != std::string::npos;
        if (!needs_quotes) {
            out << cell;
            continue;
        }
        out << '"';
        for (char c : cell) {
            if (c == '"') out << "\"\"";
            else out << c;
        }
        out << '"';
    }
    out << '\n';
}

void write_csv_rows(const std::filesystem::path& path, const std::vector<CsvRow>& rows) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("write_csv_rows: cannot open " + path.string() + " for writing");
    }
    for (const CsvRow& row : rows) write_csv_row(out, row.cells);
    if (!out) {
        throw IoError("write_csv_rows: write to " + path.string() + " failed");
    }
}

Dataset load_csv(const std::filesystem::path& path, const DatasetSpec& spec) {
    spec.validate();
    const std::vector<CsvRow> rows = read_csv_rows(path);
    Dataset data;
    data.class_count = spec.class_count;
    std::size_t field_count = spec.field_count;
    for (const CsvRow& row : rows) {
        const std::string where = path.string() + ":" + std::to_string(row.line);
        if (row.cells.size() < 2) {
            throw DataError(where + ": expected a label and at least one text field");
        }
        if (field_count == 0) {
            field_count = row.cells.size() - 1;
        }
        if (row.cells.size() - 1 != field_count) {
            throw DataError(where + ": expected " + std::to_string(field_count) +
                            " text fields, found " + std::to_string(row.cells.size() - 1));
        }
        int raw_label;
        try {
            std::size_t used = 0;
            raw_label = std::stoi(row.cells[0], &used);
            if (used != row.cells[0].size()) throw std::invalid_argument("");
        } catch (const std::exception&) {
            throw DataError(where + ": unparseable label '" + row.cells[0] + "'");
        }
        int label;
        if (spec.label_map) {
            auto it = spec.label_map->remap.find(raw_label);
            if (it == spec.label_map->remap.end()) {
                continue; // label deliberately dropped
            }
            label = it->second;
        } else {
            if (raw_label < 1 || static_cast<std::size_t>(raw_label) > spec.class_count) {
                throw DataError(where + ": label " + std::to_string(raw_label) +
                                " outside 1.." + std::to_string(spec.class_count));
            }
            label = raw_label - 1;
        }
        Sample s;
        s.label = label;
        s.fields.assign(row.cells.begin() + 1, row.cells.end());
        data.samples.push_back(std::move(s));
    }
    return data;
}

std::string concat_fields(const Sample& sample, const DatasetSpec& spec) {
    std::string out;
    const std::size_t n = sample.fields.size();
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t idx = spec.concat_order.empty() ? i : spec.concat_order[i];
        if (idx >= n) {
            throw DataError("concat_fields: order index " + std::to_string(idx) +
                            " out of range for " + std::to_string(n) + " fields");
        }
        if (i > 0) out += spec.separator;
        out += sample.fields[idx];
    }
    if (spec.reverse_characters) {
        std::vector<char32_t> cps = text::utf8_decode(out);
        std::reverse(cps.begin(), cps.end());
        out = text::utf8_encode(cps);
    }
    return out;
}

std::pair<Dataset, Dataset> stratified_sample(const Dataset& data,
                                              std::size_t per_class_train,
                                              std::size_t per_class_test,
                                              std::uint64_t seed) {
    std::vector<std::vector<std::size_t>> by_class(data.class_count);
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const int label = data.samples[i].label;
        if (label < 0 || static_cast<std::size_t>(label) >= data.class_count) {
            throw DataError("stratified_sample: sample " + std::to_string(i) +
                            " has label " + std::to_string(label) + " outside 0.." +
                            std::to_string(data.class_count - 1));
        }
        by_class[static_cast<std::size_t>(label)].push_back(i);
    }
    const std::size_t need = per_class_train + per_class_test;
    Rng rng(seed);
    Dataset train, test;
    train.class_count = test.class_count = data.class_count;
    for (std::size_t c = 0; c < data.class_count; ++c) {
        if (by_class[c].size() < need) {
            throw DataError("stratified_sample: class " + std::to_string(c) + " has " +
                            std::to_string(by_class[c].size()) + " samples, need " +
                            std::to_string(need));
        }
        rng.shuffle(by_class[c]);
        for (std::size_t i = 0; i < per_class_train; ++i) {
            train.samples.push_back(data.samples[by_class[c][i]]);
        }
        for (std::size_t i = 0; i < per_class_test; ++i) {
            test.samples.push_back(data.samples[by_class[c][per_class_train + i]]);
        }
    }
    return {std::move(train), std::move(test)};
}

DedupeResult dedupe(const Dataset& data, const std::vector<std::size_t>& key_fields) {
    DedupeResult result;
    result.dataset.class_count = data.class_count;
    std::unordered_set<std::string> seen;
    for (const Sample& s : data.samples) {
        std::string key;
        for (std::size_t f : key_fields) {
            if (f >= s.fields.size()) {
                throw DataError("dedupe: key field " + std::to_string(f) +
                                " out of range for " + std::to_string(s.fields.size()) +
                                " fields");
            }
            key += s.fields[f];
            key.push_back('\x1f'); // unit separator keeps fields distinct
        }
        if (seen.insert(std::move(key)).second) {
            result.dataset.samples.push_back(s);
        } else {
            ++result.removed;
        }
    }
    return result;
}

Dataset filter_by_length(const Dataset& data, const DatasetSpec& spec,
                         std::size_t min_chars, std::size_t max_chars) {
    Dataset out;
    out.class_count = data.class_count;
    for (const Sample& s : data.samples) {
        const std::size_t len = text::utf8_decode(concat_fields(s, spec)).size();
        if (len >= min_chars && len <= max_chars) {
            out.samples.push_back(s);
        }
    }
    return out;
}

} // namespace ccnet
