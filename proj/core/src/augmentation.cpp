#include "ccnet/augmentation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace ccnet {

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            parts.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    parts.push_back(cur);
    return parts;
}

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::size_t key_token_count(const std::string& key) {
    return text::split_whitespace(key).size();
}

} // namespace

void Thesaurus::add_entry(const std::string& key, std::vector<std::string> synonyms) {
    const std::string k = text::ascii_lower(key);
    if (k.empty()) {
        throw DataError("Thesaurus: empty key");
    }
    if (synonyms.empty()) {
        throw DataError("Thesaurus: entry '" + k + "' has no synonyms");
    }
    auto [it, inserted] = entries_.emplace(k, std::move(synonyms));
    if (!inserted) {
        throw DataError("Thesaurus: duplicate key '" + k + "'");
    }
    max_key_tokens_ = std::max(max_key_tokens_, key_token_count(k));
}

const std::vector<std::string>* Thesaurus::lookup(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

Thesaurus Thesaurus::load_tsv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("Thesaurus: cannot open " + path.string());
    }
    Thesaurus t;
    std::unordered_map<std::string, std::size_t> first_line;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos) {
            throw DataError(where + ": missing tab separator");
        }
        const std::string key = text::ascii_lower(trim(line.substr(0, tab)));
        if (key.empty()) {
            throw DataError(where + ": empty key");
        }
        std::vector<std::string> synonyms;
        for (const std::string& raw : split(line.substr(tab + 1), '|')) {
            const std::string syn = trim(raw);
            if (syn.empty()) {
                throw DataError(where + ": empty synonym in entry '" + key + "'");
            }
            synonyms.push_back(syn);
        }
        if (auto it = first_line.find(key); it != first_line.end()) {
            throw DataError("Thesaurus: duplicate key '" + key + "' on lines " +
                            std::to_string(it->second) + " and " +
                            std::to_string(line_no) + " of " + path.string());
        }
        first_line.emplace(key, line_no);
        t.add_entry(key, std::move(synonyms));
    }
    return t;
}

Thesaurus Thesaurus::load_mythes(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("Thesaurus: cannot open " + path.string());
    }
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) {
        throw DataError("Thesaurus: " + path.string() + " is empty");
    }
    ++line_no; // first line is the encoding declaration

    Thesaurus t;
    std::unordered_map<std::string, std::size_t> first_line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no);
        const std::vector<std::string> head = split(line, '|');
        if (head.size() != 2) {
            throw DataError(where + ": expected 'word|count' header");
        }
        const std::string key = text::ascii_lower(trim(head[0]));
        int meanings;
        try {
            meanings = std::stoi(head[1]);
        } catch (const std::exception&) {
            throw DataError(where + ": unparseable meaning count '" + head[1] + "'");
        }
        if (key.empty() || meanings < 1) {
            throw DataError(where + ": invalid entry header");
        }
        std::vector<std::string> synonyms;
        std::unordered_map<std::string, bool> seen;
        for (int m = 0; m < meanings; ++m) {
            if (!std::getline(in, line)) {
                throw DataError(where + ": truncated entry '" + key + "'");
            }
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            std::vector<std::string> cells = split(line, '|');
            // cells[0] is the part-of-speech tag; the rest are synonyms,
            // possibly with trailing "(... term)" annotations.
            for (std::size_t i = 1; i < cells.size(); ++i) {
                std::string syn = trim(cells[i]);
                if (syn.size() > 1 && syn.back() == ')') {
                    const std::size_t open = syn.rfind(" (");
                    if (open != std::string::npos) syn = trim(syn.substr(0, open));
                }
                if (syn.empty()) continue;
                if (text::ascii_lower(syn) == key) continue;
                if (seen.emplace(text::ascii_lower(syn), true).second) {
                    synonyms.push_back(std::move(syn));
                }
            }
        }
        if (synonyms.empty()) continue;
        if (auto it = first_line.find(key); it != first_line.end()) {
            throw DataError("Thesaurus: duplicate key '" + key + "' on lines " +
                            std::to_string(it->second) + " and " +
                            std::to_string(line_no) + " of " + path.string());
        }
        first_line.emplace(key, line_no);
        t.add_entry(key, std::move(synonyms));
    }
    return t;
}

void Thesaurus::save_tsv(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("Thesaurus: cannot open " + path.string() + " for writing");
    }
    for (const auto& [key, synonyms] : entries_) {
        out << key << '\t';
        for (std::size_t i = 0; i < synonyms.size(); ++i) {
            if (i > 0) out << '|';
            out << synonyms[i];
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("Thesaurus: write to " + path.string() + " failed");
    }
}

void AugmentConfig::validate() const {
    if (!(p > 0.0 && p < 1.0) || !(q > 0.0 && q < 1.0)) {
        throw DataError("AugmentConfig: p and q must lie in (0, 1), got p=" +
                        std::to_string(p) + " q=" + std::to_string(q));
    }
}

std::size_t sample_truncated_geometric(double param, std::size_t max_value, Rng& rng) {
    if (!(param > 0.0 && param < 1.0)) {
        throw DataError("sample_truncated_geometric: param must be in (0, 1)");
    }
    if (max_value == 0) return 0;
    // Normalizer: sum_{j=0}^{max} param^j = (1 - param^(max+1)) / (1 - param).
    const double total =
        (1.0 - std::pow(param, static_cast<double>(max_value) + 1.0)) / (1.0 - param);
    const double u = rng.uniform() * total;
    double cumulative = 0.0;
    double term = 1.0;
    for (std::size_t i = 0; i <= max_value; ++i) {
        cumulative += term;
        if (u < cumulative) return i;
        term *= param;
    }
    return max_value; // numeric edge: u landed on the tail boundary
}

std::vector<ReplaceableUnit> find_replaceable(const std::string& text_in,
                                              const Thesaurus& thesaurus) {
    std::vector<ReplaceableUnit> units;
    if (thesaurus.empty()) return units;

    const std::vector<text::Span> tokens = text::split_whitespace(text_in);
    std::vector<text::Span> cores(tokens.size());
    std::vector<std::string> lowered(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        cores[i] = text::strip_punctuation(text_in, tokens[i]);
        lowered[i] = text::ascii_lower(
            std::string_view(text_in).substr(cores[i].begin, cores[i].end - cores[i].begin));
    }

    const std::size_t max_run = std::min<std::size_t>(3, thesaurus.max_key_tokens());
    std::size_t i = 0;
    while (i < tokens.size()) {
        if (cores[i].empty()) {
            ++i;
            continue;
        }
        bool matched = false;
        for (std::size_t run = max_run; run >= 2 && !matched; --run) {
            if (i + run > tokens.size()) continue;
            bool run_ok = true;
            std::string key = lowered[i];
            for (std::size_t j = 1; j < run; ++j) {
                if (cores[i + j].empty()) {
                    run_ok = false;
                    break;
                }
                key += ' ';
                key += lowered[i + j];
            }
            if (run_ok && thesaurus.lookup(key) != nullptr) {
                units.push_back(ReplaceableUnit{
                    text::Span{cores[i].begin, cores[i + run - 1].end}, key});
                i += run;
                matched = true;
            }
        }
        if (matched) continue;
        if (thesaurus.lookup(lowered[i]) != nullptr) {
            units.push_back(ReplaceableUnit{cores[i], lowered[i]});
        }
        ++i;
    }
    return units;
}

std::string replace_synonyms(const std::string& text_in, const Thesaurus& thesaurus,
                             std::size_t count, double q, Rng& rng) {
    const std::vector<ReplaceableUnit> units = find_replaceable(text_in, thesaurus);
    if (units.empty() || count == 0) return text_in;
    count = std::min(count, units.size());

    std::vector<std::size_t> chosen = rng.sample_indices(units.size(), count);
    std::sort(chosen.begin(), chosen.end()); // positional order for stable output

    std::string out;
    out.reserve(text_in.size());
    std::size_t cursor = 0;
    for (std::size_t idx : chosen) {
        const ReplaceableUnit& unit = units[idx];
        const std::vector<std::string>& synonyms = *thesaurus.lookup(unit.key);
        const std::size_t s = sample_truncated_geometric(q, synonyms.size() - 1, rng);
        std::string replacement = synonyms[s];
        const char first = text_in[unit.span.begin];
        if (first >= 'A' && first <= 'Z' && !replacement.empty() &&
            replacement[0] >= 'a' && replacement[0] <= 'z') {
            replacement[0] = static_cast<char>(replacement[0] - 'a' + 'A');
        }
        out.append(text_in, cursor, unit.span.begin - cursor);
        out += replacement;
        cursor = unit.span.end;
    }
    out.append(text_in, cursor, text_in.size() - cursor);
    return out;
}

std::string augment(const std::string& text_in, const Thesaurus& thesaurus,
                    const AugmentConfig& config, Rng& rng) {
    config.validate();
    if (thesaurus.empty()) return text_in;
    const std::vector<ReplaceableUnit> units = find_replaceable(text_in, thesaurus);
    if (units.empty()) return text_in;
    const std::size_t r = sample_truncated_geometric(config.p, units.size(), rng);
    if (r == 0) return text_in;
    return replace_synonyms(text_in, thesaurus, r, config.q, rng);
}

} // namespace ccnet
