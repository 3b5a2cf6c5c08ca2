#pragma once

// Gazetteer ingestion and the immutable name -> candidates index.
//
// Input are TSV tables (UTF-8, '#' comment lines):
//   places.tsv   place_id \t canonical_name \t country \t lat \t lon \t class \t source
//   variants.tsv place_id \t name \t lang \t kind
//
// Canonical names are indexed as variants (kind=canonical, lang="*").
// Lookup keys are NFC + simple case fold + whitespace collapse; the
// case-preserving NFC form of every variant is retained alongside.

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoparse/text.hpp"

namespace geoparse {

class GazetteerError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct PlaceEntry {
    std::string place_id;
    std::string canonical_name;
    std::string country;  // ISO-3166 alpha-2, uppercase
    double lat = 0.0;
    double lon = 0.0;
    int importance_class = 6;  // 0 country .. 6 settlement
    std::string source;
};

enum class VariantKind { canonical, exonym, historical, linguistic };

inline const char* to_string(VariantKind kind) {
    switch (kind) {
        case VariantKind::canonical: return "canonical";
        case VariantKind::exonym: return "exonym";
        case VariantKind::historical: return "historical";
        case VariantKind::linguistic: return "linguistic";
    }
    return "?";
}

inline std::optional<VariantKind> parse_variant_kind(std::string_view s) {
    if (s == "canonical") return VariantKind::canonical;
    if (s == "exonym") return VariantKind::exonym;
    if (s == "historical") return VariantKind::historical;
    if (s == "linguistic") return VariantKind::linguistic;
    return std::nullopt;
}

struct NameVariant {
    std::string place_id;
    std::string name;
    std::string lang;  // ISO-639-1 or "*"
    VariantKind kind = VariantKind::exonym;
};

struct RowIssue {
    std::size_t line = 0;
    std::string message;
};

template <typename Row>
struct LoadResult {
    std::vector<Row> rows;
    std::vector<RowIssue> issues;  // rejected rows and warnings, with line numbers
    std::size_t rejected = 0;
};

namespace detail_gaz {

inline std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t tab = line.find('\t', start);
        if (tab == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, tab - start));
        start = tab + 1;
    }
}

inline bool valid_country(std::string_view code) {
    return code.size() == 2 && std::isalpha(static_cast<unsigned char>(code[0])) &&
           std::isalpha(static_cast<unsigned char>(code[1]));
}

inline std::string upper_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

inline bool valid_lang(std::string_view code) {
    if (code == "*") return true;
    return code.size() == 2 && std::islower(static_cast<unsigned char>(code[0])) &&
           std::islower(static_cast<unsigned char>(code[1]));
}

inline std::optional<double> parse_double(std::string_view s) {
    try {
        std::size_t used = 0;
        const std::string buf(s);
        const double v = std::stod(buf, &used);
        if (used != buf.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

inline std::optional<long> parse_int(std::string_view s) {
    try {
        std::size_t used = 0;
        const std::string buf(s);
        const long v = std::stol(buf, &used);
        if (used != buf.size()) return std::nullopt;
        return v;
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

// FNV-1a, used as the index build checksum.
inline std::uint64_t fnv1a(std::string_view data) {
    std::uint64_t hash = 1469598103934665603ULL;
    for (const char c : data) {
        hash ^= static_cast<unsigned char>(c);
        hash *= 1099511628211ULL;
    }
    return hash;
}

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

inline void put_f64(std::string& out, double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    put_u64(out, bits);
}

inline void put_string(std::string& out, std::string_view s) {
    put_u32(out, static_cast<std::uint32_t>(s.size()));
    out.append(s.data(), s.size());
}

class Reader {
public:
    Reader(std::string_view data, std::string_view what) : data_(data), what_(what) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        const std::string_view b = take(4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }

    std::uint64_t u64() {
        const std::string_view b = take(8);
        std::uint64_t v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(b[i]);
        return v;
    }

    double f64() {
        const std::uint64_t bits = u64();
        double v = 0.0;
        std::memcpy(&v, &bits, sizeof v);
        return v;
    }

    std::string str() {
        const std::uint32_t n = u32();
        return std::string(take(n));
    }

    bool done() const { return pos_ == data_.size(); }

private:
    std::string_view take(std::size_t n) {
        if (pos_ + n > data_.size())
            throw GazetteerError(std::string(what_) + ": truncated or corrupt data");
        const std::string_view out = data_.substr(pos_, n);
        pos_ += n;
        return out;
    }

    std::string_view data_;
    std::string_view what_;
    std::size_t pos_ = 0;
};

}  // namespace detail_gaz

inline LoadResult<PlaceEntry> load_places(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GazetteerError("cannot open places file: " + path);
    LoadResult<PlaceEntry> result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail_gaz::split_tabs(line);
        const auto reject = [&](std::string msg) {
            result.issues.push_back({line_no, std::move(msg)});
            ++result.rejected;
        };
        if (fields.size() != 7) {
            reject("expected 7 tab-separated fields, got " + std::to_string(fields.size()));
            continue;
        }
        PlaceEntry entry;
        entry.place_id = std::string(fields[0]);
        entry.canonical_name = text::normalize_cased(fields[1]);
        entry.source = std::string(fields[6]);
        if (entry.place_id.empty()) {
            reject("empty place_id");
            continue;
        }
        if (entry.canonical_name.empty()) {
            reject("empty canonical_name");
            continue;
        }
        if (!detail_gaz::valid_country(fields[2])) {
            reject("invalid country code '" + std::string(fields[2]) + "'");
            continue;
        }
        entry.country = detail_gaz::upper_ascii(fields[2]);
        const auto lat = detail_gaz::parse_double(fields[3]);
        const auto lon = detail_gaz::parse_double(fields[4]);
        if (!lat || *lat < -90.0 || *lat > 90.0) {
            reject("latitude out of range: '" + std::string(fields[3]) + "'");
            continue;
        }
        if (!lon || *lon <= -180.0 || *lon > 180.0) {
            reject("longitude out of range: '" + std::string(fields[4]) + "'");
            continue;
        }
        entry.lat = *lat;
        entry.lon = *lon;
        const auto cls = detail_gaz::parse_int(fields[5]);
        if (!cls || *cls < 0) {
            reject("invalid class '" + std::string(fields[5]) + "'");
            continue;
        }
        if (*cls > 6) {
            // "6 & more" inputs collapse into class 6
            result.issues.push_back({line_no, "class " + std::to_string(*cls) + " clamped to 6"});
            entry.importance_class = 6;
        } else {
            entry.importance_class = static_cast<int>(*cls);
        }
        result.rows.push_back(std::move(entry));
    }
    return result;
}

inline LoadResult<NameVariant> load_variants(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GazetteerError("cannot open variants file: " + path);
    LoadResult<NameVariant> result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail_gaz::split_tabs(line);
        const auto reject = [&](std::string msg) {
            result.issues.push_back({line_no, std::move(msg)});
            ++result.rejected;
        };
        if (fields.size() != 4) {
            reject("expected 4 tab-separated fields, got " + std::to_string(fields.size()));
            continue;
        }
        NameVariant variant;
        variant.place_id = std::string(fields[0]);
        variant.name = text::normalize_cased(fields[1]);
        if (variant.place_id.empty()) {
            reject("empty place_id");
            continue;
        }
        if (variant.name.empty()) {
            reject("empty name");
            continue;
        }
        if (!detail_gaz::valid_lang(fields[2])) {
            reject("invalid language code '" + std::string(fields[2]) + "'");
            continue;
        }
        variant.lang = std::string(fields[2]);
        const auto kind = parse_variant_kind(fields[3]);
        if (!kind) {
            reject("unknown variant kind '" + std::string(fields[3]) + "'");
            continue;
        }
        variant.kind = *kind;
        result.rows.push_back(std::move(variant));
    }
    return result;
}

struct IndexMeta {
    std::size_t place_count = 0;
    std::size_t variant_count = 0;  // explicit variants accepted at build
    std::uint64_t checksum = 0;
};

class GazetteerIndex {
public:
    GazetteerIndex() = default;

    // Builds the immutable index. Throws on duplicate place_id; dangling
    // variants are dropped and reported through |issues| when given.
    static GazetteerIndex build(std::vector<PlaceEntry> places, std::vector<NameVariant> variants,
                                std::vector<std::string>* issues = nullptr) {
        GazetteerIndex index;
        index.entries_ = std::move(places);
        for (std::uint32_t i = 0; i < index.entries_.size(); ++i) {
            const PlaceEntry& entry = index.entries_[i];
            auto [it, inserted] = index.id_to_idx_.emplace(entry.place_id, i);
            if (!inserted)
                throw GazetteerError("duplicate place_id '" + entry.place_id + "' (sources '" +
                                     index.entries_[it->second].source + "' and '" + entry.source + "')");
        }
        for (NameVariant& variant : variants) {
            const auto it = index.id_to_idx_.find(variant.place_id);
            if (it == index.id_to_idx_.end()) {
                if (issues)
                    issues->push_back("variant '" + variant.name + "' references unknown place_id '" +
                                      variant.place_id + "'");
                continue;
            }
            index.add_posting(it->second, variant.name, variant.lang);
            index.variants_.push_back(std::move(variant));
        }
        for (std::uint32_t i = 0; i < index.entries_.size(); ++i)
            index.add_posting(i, index.entries_[i].canonical_name, "*");
        index.meta_.place_count = index.entries_.size();
        index.meta_.variant_count = index.variants_.size();
        index.meta_.checksum = detail_gaz::fnv1a(index.payload());
        return index;
    }

    // All entries whose variants match |key| (a normalize_key form) with a
    // language equal to |lang| or "*". Query lang "*" matches any language.
    // Results are sorted by place_id.
    std::vector<const PlaceEntry*> lookup(std::string_view key, std::string_view lang) const {
        std::vector<const PlaceEntry*> out;
        const auto it = key_to_postings_.find(std::string(key));
        if (it == key_to_postings_.end()) return out;
        for (const Posting& posting : it->second) {
            if (lang != "*" && posting.lang != "*" && posting.lang != lang) continue;
            const PlaceEntry* entry = &entries_[posting.entry];
            bool seen = false;
            for (const PlaceEntry* e : out) seen = seen || e == entry;
            if (!seen) out.push_back(entry);
        }
        std::sort(out.begin(), out.end(),
                  [](const PlaceEntry* a, const PlaceEntry* b) { return a->place_id < b->place_id; });
        return out;
    }

    // Case-preserving NFC surface forms the key was indexed under (for
    // cased-script exact matching).
    std::vector<std::string> cased_forms(std::string_view key) const {
        std::vector<std::string> out;
        const auto it = key_to_postings_.find(std::string(key));
        if (it == key_to_postings_.end()) return out;
        for (const Posting& posting : it->second)
            if (std::find(out.begin(), out.end(), posting.cased) == out.end()) out.push_back(posting.cased);
        return out;
    }

    const PlaceEntry* find(std::string_view place_id) const {
        const auto it = id_to_idx_.find(std::string(place_id));
        return it == id_to_idx_.end() ? nullptr : &entries_[it->second];
    }

    // Sorted list of every lookup key (stop-word builders iterate this).
    std::vector<std::string> keys() const {
        std::vector<std::string> out;
        out.reserve(key_to_postings_.size());
        for (const auto& [key, postings] : key_to_postings_) out.push_back(key);
        std::sort(out.begin(), out.end());
        return out;
    }

    const std::vector<PlaceEntry>& entries() const { return entries_; }
    const IndexMeta& meta() const { return meta_; }

    void persist(const std::string& path) const {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out) throw GazetteerError("cannot open index file for writing: " + path);
        const std::string body = payload();
        std::string blob;
        blob.reserve(body.size() + 32);
        blob.append(kMagic);
        blob.push_back(static_cast<char>(kFormatVersion));
        detail_gaz::put_u64(blob, body.size());
        blob.append(body);
        detail_gaz::put_u64(blob, detail_gaz::fnv1a(body));
        out.write(blob.data(), static_cast<std::streamsize>(blob.size()));
        if (!out) throw GazetteerError("write failed: " + path);
    }

    static GazetteerIndex restore(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw GazetteerError("cannot open index file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        const std::string blob = buf.str();
        if (blob.size() < 5 || blob.compare(0, 4, kMagic) != 0)
            throw GazetteerError(path + ": not a gazetteer index file (bad magic)");
        const auto version = static_cast<std::uint8_t>(blob[4]);
        if (version != kFormatVersion)
            throw GazetteerError(path + ": unsupported index format version " + std::to_string(version) +
                                 " (expected " + std::to_string(kFormatVersion) + ")");
        detail_gaz::Reader header(std::string_view(blob).substr(5), path);
        const std::uint64_t body_size = header.u64();
        if (blob.size() != 5 + 8 + body_size + 8)
            throw GazetteerError(path + ": truncated index file");
        const std::string_view body = std::string_view(blob).substr(13, body_size);
        detail_gaz::Reader tail(std::string_view(blob).substr(13 + body_size), path);
        if (tail.u64() != detail_gaz::fnv1a(body)) throw GazetteerError(path + ": checksum mismatch");

        detail_gaz::Reader reader(body, path);
        std::vector<PlaceEntry> places(reader.u32());
        for (PlaceEntry& entry : places) {
            entry.place_id = reader.str();
            entry.canonical_name = reader.str();
            entry.country = reader.str();
            entry.lat = reader.f64();
            entry.lon = reader.f64();
            entry.importance_class = reader.u8();
            entry.source = reader.str();
        }
        std::vector<NameVariant> variants(reader.u32());
        for (NameVariant& variant : variants) {
            variant.place_id = reader.str();
            variant.name = reader.str();
            variant.lang = reader.str();
            variant.kind = static_cast<VariantKind>(reader.u8());
        }
        if (!reader.done()) throw GazetteerError(path + ": trailing bytes in index payload");
        return build(std::move(places), std::move(variants));
    }

private:
    struct Posting {
        std::uint32_t entry;
        std::string lang;
        std::string cased;
    };

    void add_posting(std::uint32_t entry, const std::string& cased_name, const std::string& lang) {
        const std::string key = text::normalize_key(cased_name);
        auto& postings = key_to_postings_[key];
        for (const Posting& p : postings)
            if (p.entry == entry && p.lang == lang && p.cased == cased_name) return;
        postings.push_back({entry, lang, cased_name});
    }

    std::string payload() const {
        std::string body;
        detail_gaz::put_u32(body, static_cast<std::uint32_t>(entries_.size()));
        for (const PlaceEntry& entry : entries_) {
            detail_gaz::put_string(body, entry.place_id);
            detail_gaz::put_string(body, entry.canonical_name);
            detail_gaz::put_string(body, entry.country);
            detail_gaz::put_f64(body, entry.lat);
            detail_gaz::put_f64(body, entry.lon);
            body.push_back(static_cast<char>(entry.importance_class));
            detail_gaz::put_string(body, entry.source);
        }
        detail_gaz::put_u32(body, static_cast<std::uint32_t>(variants_.size()));
        for (const NameVariant& variant : variants_) {
            detail_gaz::put_string(body, variant.place_id);
            detail_gaz::put_string(body, variant.name);
            detail_gaz::put_string(body, variant.lang);
            body.push_back(static_cast<char>(variant.kind));
        }
        return body;
    }

    static constexpr const char* kMagic = "GZIX";
    static constexpr std::uint8_t kFormatVersion = 1;

    std::vector<PlaceEntry> entries_;
    std::unordered_map<std::string, std::uint32_t> id_to_idx_;
    std::unordered_map<std::string, std::vector<Posting>> key_to_postings_;
    std::vector<NameVariant> variants_;
    IndexMeta meta_;
};

}  // namespace geoparse
