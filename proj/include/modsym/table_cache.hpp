#pragma once

#include "modsym/bigint.hpp"
#include "modsym/group_element.hpp"
#include "modsym/words.hpp"

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

namespace modsym {

// Persisted generator tables (env MODSYM_CACHE_DIR). Binary layout: magic
// "MSGT", u32 version, u64 level, then the table fields; big integers as
// sign byte + length-prefixed magnitude bytes. Unreadable or mismatched
// files are ignored and rewritten.

namespace detail {

inline constexpr std::uint32_t kCacheVersion = 1;

inline void put_u32(std::ostream& os, std::uint32_t v) {
    unsigned char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 4);
}

inline void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

inline bool get_u32(std::istream& is, std::uint32_t& v) {
    unsigned char b[4];
    if (!is.read(reinterpret_cast<char*>(b), 4)) return false;
    v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return true;
}

inline bool get_u64(std::istream& is, std::uint64_t& v) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) return false;
    v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return true;
}

inline void put_integer(std::ostream& os, const Integer& n) {
    os.put(n < 0 ? '\1' : '\0');
    std::vector<unsigned char> bytes;
    const Integer mag = abs(n);
    export_bits(mag, std::back_inserter(bytes), 8);
    put_u32(os, static_cast<std::uint32_t>(bytes.size()));
    os.write(reinterpret_cast<const char*>(bytes.data()),
             static_cast<std::streamsize>(bytes.size()));
}

inline bool get_integer(std::istream& is, Integer& n) {
    const int sign = is.get();
    std::uint32_t len = 0;
    if (sign == EOF || !get_u32(is, len) || len > (1u << 20)) return false;
    std::vector<unsigned char> bytes(len);
    if (len && !is.read(reinterpret_cast<char*>(bytes.data()), len)) return false;
    Integer mag = 0;
    if (len) import_bits(mag, bytes.begin(), bytes.end(), 8);
    n = sign == '\1' ? -mag : mag;
    return true;
}

inline void put_matrix(std::ostream& os, const GroupElement& g) {
    put_integer(os, g.a());
    put_integer(os, g.b());
    put_integer(os, g.c());
    put_integer(os, g.d());
}

inline bool get_matrix(std::istream& is, GroupElement& g) {
    Integer a, b, c, d;
    if (!get_integer(is, a) || !get_integer(is, b) || !get_integer(is, c) ||
        !get_integer(is, d))
        return false;
    if (a * d - b * c != 1) return false;
    g = GroupElement(a, b, c, d);
    return true;
}

template <typename T>
void put_u32_vec(std::ostream& os, const std::vector<T>& v) {
    put_u64(os, v.size());
    for (T x : v) put_u32(os, static_cast<std::uint32_t>(x));
}

template <typename T>
bool get_u32_vec(std::istream& is, std::vector<T>& v, std::uint64_t cap = 1u << 26) {
    std::uint64_t n = 0;
    if (!get_u64(is, n) || n > cap) return false;
    v.resize(n);
    for (auto& x : v) {
        std::uint32_t u = 0;
        if (!get_u32(is, u)) return false;
        x = static_cast<T>(u);
    }
    return true;
}

}  // namespace detail

inline void save_table(const std::string& path, const GeneratorTable& t) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) return;  // cache is best-effort
    os.write("MSGT", 4);
    detail::put_u32(os, detail::kCacheVersion);
    detail::put_u64(os, static_cast<std::uint64_t>(t.level));
    detail::put_u64(os, t.cosets.size());
    for (const auto& [c, d] : t.cosets) {
        detail::put_u64(os, static_cast<std::uint64_t>(c));
        detail::put_u64(os, static_cast<std::uint64_t>(d));
    }
    detail::put_u64(os, t.transversal.size());
    for (const auto& g : t.transversal) detail::put_matrix(os, g);
    detail::put_u64(os, t.generators.size());
    for (const auto& g : t.generators) detail::put_matrix(os, g);
    detail::put_u32_vec(os, t.inverse_index);
    detail::put_u32_vec(os, t.action_S);
    detail::put_u32_vec(os, t.action_T);
    detail::put_u32_vec(os, t.action_Tinv);
    detail::put_u32_vec(os, t.schreier_S);
    detail::put_u32_vec(os, t.schreier_T);
    detail::put_u32_vec(os, t.schreier_Tinv);
    detail::put_u32_vec(os, t.lookup_);
}

inline std::optional<GeneratorTable> load_table(const std::string& path, long level) {
    std::ifstream is(path, std::ios::binary);
    if (!is) return std::nullopt;
    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t lvl = 0, n = 0;
    if (!is.read(magic, 4) || std::string(magic, 4) != "MSGT") return std::nullopt;
    if (!detail::get_u32(is, version) || version != detail::kCacheVersion) return std::nullopt;
    if (!detail::get_u64(is, lvl) || lvl != static_cast<std::uint64_t>(level))
        return std::nullopt;
    GeneratorTable t;
    t.level = level;
    if (!detail::get_u64(is, n) || n > (1u << 26)) return std::nullopt;
    t.cosets.resize(n);
    for (auto& [c, d] : t.cosets) {
        std::uint64_t cu = 0, du = 0;
        if (!detail::get_u64(is, cu) || !detail::get_u64(is, du)) return std::nullopt;
        c = static_cast<long>(cu);
        d = static_cast<long>(du);
    }
    if (!detail::get_u64(is, n) || n != t.cosets.size()) return std::nullopt;
    t.transversal.resize(n);
    for (auto& g : t.transversal)
        if (!detail::get_matrix(is, g)) return std::nullopt;
    if (!detail::get_u64(is, n) || n > (1u << 26)) return std::nullopt;
    t.generators.resize(n);
    for (auto& g : t.generators)
        if (!detail::get_matrix(is, g)) return std::nullopt;
    if (!detail::get_u32_vec(is, t.inverse_index) || !detail::get_u32_vec(is, t.action_S) ||
        !detail::get_u32_vec(is, t.action_T) || !detail::get_u32_vec(is, t.action_Tinv) ||
        !detail::get_u32_vec(is, t.schreier_S) || !detail::get_u32_vec(is, t.schreier_T) ||
        !detail::get_u32_vec(is, t.schreier_Tinv) || !detail::get_u32_vec(is, t.lookup_))
        return std::nullopt;
    if (t.inverse_index.size() != t.generators.size()) return std::nullopt;
    for (std::uint32_t j : t.inverse_index)
        if (j >= t.generators.size()) return std::nullopt;
    for (std::size_t j = 0; j < t.generators.size(); ++j)
        t.generator_index.emplace(t.generators[j], static_cast<std::uint32_t>(j));
    return t;
}

/// coset_table with optional persistence via MODSYM_CACHE_DIR.
inline GeneratorTable cached_coset_table(long level, std::size_t max_index = 200000) {
    const char* dir = std::getenv("MODSYM_CACHE_DIR");
    if (!dir || !*dir) return coset_table(level, max_index);
    const std::string path =
        std::string(dir) + "/gens_v" + std::to_string(detail::kCacheVersion) + "_" +
        std::to_string(level) + ".bin";
    if (auto t = load_table(path, level)) return std::move(*t);
    GeneratorTable t = coset_table(level, max_index);
    save_table(path, t);
    return t;
}

}  // namespace modsym
