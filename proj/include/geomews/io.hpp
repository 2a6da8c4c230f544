#pragma once

// CSV tables with a provenance header block, binary field files, and the
// content-hashed field cache shared by the sweep commands.

#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <type_traits>
#include <variant>
#include <vector>

#include "geomews/core.hpp"
#include "geomews/grid.hpp"
#include "geomews/polyline.hpp"

namespace geomews {

inline constexpr const char* kVersion = "0.3.0";

/// 64-bit FNV-1a; stable across platforms, used for config and cache keys.
inline std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

/// Shortest round-trip decimal form, independent of locale.
inline std::string fmt_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    char buf[32];
    for (int prec = 6; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

struct OutputHeader {
    std::string command;
    std::string config_hash;
    std::uint64_t seed = 0;
};

using Cell = std::variant<double, long long, std::string>;

class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const OutputHeader& header, const std::vector<std::string>& columns)
        : out_(path), ncol_(columns.size()) {
        if (!out_) throw IoError("cannot open " + path.string() + " for writing");
        out_ << "# geomews " << kVersion << "\n";
        out_ << "# command: " << header.command << "\n";
        out_ << "# config_hash: " << header.config_hash << "\n";
        out_ << "# seed: " << header.seed << "\n";
        for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
        out_ << "\n";
    }

    void row(const std::vector<Cell>& cells) {
        if (cells.size() != ncol_) throw IoError("csv row has wrong column count");
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out_ << ",";
            std::visit(
                [&](const auto& v) {
                    using T = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<T, double>) {
                        out_ << fmt_double(v);
                    } else {
                        out_ << v;
                    }
                },
                cells[i]);
        }
        out_ << "\n";
    }

private:
    std::ofstream out_;
    std::size_t ncol_;
};

/// Reads a CSV written by CsvWriter: comment lines skipped, first line is the header.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<std::string>> rows;

    std::size_t col(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw IoError("csv has no column '" + name + "'");
    }
    double number(std::size_t r, const std::string& name) const { return std::strtod(rows[r][col(name)].c_str(), nullptr); }
};

inline CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    CsvTable t;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string c;
        while (std::getline(ss, c, ',')) cells.push_back(c);
        if (!header) {
            t.columns = std::move(cells);
            header = true;
        } else {
            t.rows.push_back(std::move(cells));
        }
    }
    return t;
}

template <std::size_t N>
void write_field_csv(const std::filesystem::path& path, const OutputHeader& h, const ScalarField<N>& f) {
    std::vector<std::string> cols = N == 2 ? std::vector<std::string>{"T", "u", "value"} : std::vector<std::string>{"x", "value"};
    CsvWriter w(path, h, cols);
    for (std::size_t k = 0; k < f.grid().size(); ++k) {
        const auto x = f.grid().node(k);
        std::vector<Cell> row;
        for (double v : x) row.emplace_back(v);
        row.emplace_back(f[k]);
        w.row(row);
    }
}

// Binary field layout: magic, key length + key text, N, per-axis (n, lo, hi), values.
inline constexpr char kFieldMagic[8] = {'G', 'M', 'W', 'F', 'I', 'E', 'L', '1'};

template <std::size_t N>
void write_field_binary(const std::filesystem::path& path, const ScalarField<N>& f, const std::string& key) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out.write(kFieldMagic, sizeof kFieldMagic);
    const std::uint64_t klen = key.size();
    out.write(reinterpret_cast<const char*>(&klen), sizeof klen);
    out.write(key.data(), static_cast<std::streamsize>(klen));
    const std::uint64_t dim = N;
    out.write(reinterpret_cast<const char*>(&dim), sizeof dim);
    for (std::size_t a = 0; a < N; ++a) {
        const std::uint64_t n = f.grid().n(a);
        out.write(reinterpret_cast<const char*>(&n), sizeof n);
        out.write(reinterpret_cast<const char*>(&f.grid().bounds().lo[a]), sizeof(double));
        out.write(reinterpret_cast<const char*>(&f.grid().bounds().hi[a]), sizeof(double));
    }
    const auto v = f.values();
    out.write(reinterpret_cast<const char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
}

/// Returns nullopt when the file is missing, malformed, or written under another key.
template <std::size_t N>
std::optional<ScalarField<N>> read_field_binary(const std::filesystem::path& path, const std::string& key) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::string_view(magic, 8) != std::string_view(kFieldMagic, 8)) return std::nullopt;
    std::uint64_t klen = 0;
    in.read(reinterpret_cast<char*>(&klen), sizeof klen);
    if (!in || klen > (1u << 20)) return std::nullopt;
    std::string stored(klen, '\0');
    in.read(stored.data(), static_cast<std::streamsize>(klen));
    if (!in || stored != key) return std::nullopt;
    std::uint64_t dim = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof dim);
    if (!in || dim != N) return std::nullopt;
    Box<N> box{};
    std::array<std::size_t, N> n{};
    for (std::size_t a = 0; a < N; ++a) {
        std::uint64_t na = 0;
        in.read(reinterpret_cast<char*>(&na), sizeof na);
        in.read(reinterpret_cast<char*>(&box.lo[a]), sizeof(double));
        in.read(reinterpret_cast<char*>(&box.hi[a]), sizeof(double));
        n[a] = na;
    }
    if (!in) return std::nullopt;
    try {
        Grid<N> grid(box, n);
        std::vector<double> v(grid.size());
        in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(v.size() * sizeof(double)));
        if (!in) return std::nullopt;
        return ScalarField<N>(grid, std::move(v));
    } catch (const Error&) {
        return std::nullopt;
    }
}

/// Directory of binary fields keyed by a canonical description string.
/// An empty directory disables caching.
class FieldCache {
public:
    FieldCache() = default;
    explicit FieldCache(std::filesystem::path dir) : dir_(std::move(dir)) {
        if (!dir_.empty()) std::filesystem::create_directories(dir_);
    }

    bool enabled() const { return !dir_.empty(); }

    template <std::size_t N>
    std::optional<ScalarField<N>> load(const std::string& key) const {
        if (!enabled()) return std::nullopt;
        return read_field_binary<N>(path_for(key), key);
    }

    template <std::size_t N>
    void store(const std::string& key, const ScalarField<N>& f) const {
        if (!enabled()) return;
        // Write then rename so concurrent readers never see a partial file.
        const auto final_path = path_for(key);
        auto tmp = final_path;
        tmp += ".tmp" + hex64(fnv1a(key + std::to_string(reinterpret_cast<std::uintptr_t>(&f))));
        write_field_binary(tmp, f, key);
        std::filesystem::rename(tmp, final_path);
    }

private:
    std::filesystem::path path_for(const std::string& key) const { return dir_ / ("field-" + hex64(fnv1a(key)) + ".bin"); }
    std::filesystem::path dir_;
};

inline void write_polyline_csv(CsvWriter& w, double b1, double sigma, const Polyline& p) {
    for (std::size_t i = 0; i < p.size(); ++i) w.row({b1, sigma, p[i][0], p[i][1], p.arc_length()[i]});
}

}  // namespace geomews
