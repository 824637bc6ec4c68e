#pragma once

#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "state.hpp"

namespace mhd2d {

/// Binary field container, little-endian:
///   magic "MHD2", version u32 = 1, n u32, time f64, field_count u32,
///   then per field: name_len u8, name bytes, n*n f64 samples row-major
///   (y outer, x inner).
namespace snapshot {

constexpr char kMagic[4] = {'M', 'H', 'D', '2'};
constexpr std::uint32_t kVersion = 1;

namespace detail {

inline void put_u32(std::ostream& out, std::uint32_t v) {
    unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                          static_cast<unsigned char>(v >> 16),
                          static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(b), 8);
}

inline std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

inline double get_f64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    std::uint64_t bits = 0;
    for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

}  // namespace detail

struct NamedField {
    std::string name;
    ScalarField field;
};

struct Snapshot {
    double time = 0.0;
    std::vector<NamedField> fields;

    const ScalarField* find(const std::string& name) const {
        for (const auto& f : fields)
            if (f.name == name) return &f.field;
        return nullptr;
    }
};

inline void write(const std::string& path, double time,
                  const std::vector<std::pair<std::string, const ScalarField*>>& fields) {
    if (fields.empty()) throw ConfigError("snapshot: nothing to write");
    const int n = fields.front().second->grid.n;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("snapshot: cannot open for writing: " + path);
    out.write(kMagic, 4);
    detail::put_u32(out, kVersion);
    detail::put_u32(out, static_cast<std::uint32_t>(n));
    detail::put_f64(out, time);
    detail::put_u32(out, static_cast<std::uint32_t>(fields.size()));
    for (const auto& [name, field] : fields) {
        if (name.empty() || name.size() > 255)
            throw ConfigError("snapshot: field name length must be in [1, 255]");
        if (field->grid.n != n) throw ConfigError("snapshot: mixed grids");
        const unsigned char len = static_cast<unsigned char>(name.size());
        out.write(reinterpret_cast<const char*>(&len), 1);
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        for (double v : field->values) detail::put_f64(out, v);
    }
    if (!out) throw ConfigError("snapshot: write failed: " + path);
}

inline Snapshot read(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("snapshot: cannot open: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, kMagic, 4) != 0)
        throw ConfigError("snapshot: bad magic in " + path);
    if (detail::get_u32(in) != kVersion) throw ConfigError("snapshot: unsupported version");
    const std::uint32_t n = detail::get_u32(in);
    Snapshot snap;
    snap.time = detail::get_f64(in);
    const std::uint32_t count = detail::get_u32(in);
    const Grid g(static_cast<int>(n));
    for (std::uint32_t f = 0; f < count; ++f) {
        unsigned char len = 0;
        in.read(reinterpret_cast<char*>(&len), 1);
        std::string name(len, '\0');
        in.read(name.data(), len);
        ScalarField field(g);
        for (double& v : field.values) v = detail::get_f64(in);
        if (!in) throw ConfigError("snapshot: truncated file " + path);
        snap.fields.push_back({std::move(name), std::move(field)});
    }
    return snap;
}

/// Writer for a full solver state with the canonical field names.
inline void write_state(const std::string& path, const State& s) {
    write(path, s.t,
          {{"rho", &s.rho}, {"ux", &s.u.x}, {"uy", &s.u.y}, {"Bx", &s.B.x}, {"By", &s.B.y}});
}

}  // namespace snapshot
}  // namespace mhd2d
