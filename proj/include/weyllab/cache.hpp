#pragma once

// Eigendecomposition cache.  One file per spectral identity:
//
//   bytes 0..3   magic "WEYL"
//   u32          format version (currently 1)
//   u64          metadata length in bytes
//   metadata     JSON {identity, dim, cutoff, count, endian}
//   payload      count doubles (eigenvalues, ascending), then
//                count*count doubles (eigenvector columns)
//
// Integers and doubles are raw little-endian; the endian field exists
// so a foreign-order file is rejected instead of misread.  Writers are
// atomic (temp file + rename), so concurrent runs race benignly: last
// writer wins with a complete file.  Any malformed file is ignored
// with a warning on stderr and recomputed, never trusted.

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "weyllab/spectral.hpp"

namespace weyllab {

inline std::uint64_t fnv1a64(const std::string& s) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string cache_key(const std::string& identity) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(fnv1a64(identity)));
    return buf;
}

inline std::string cache_path(const std::string& dir, const std::string& identity) {
    return (std::filesystem::path(dir) / ("weyl_" + cache_key(identity) + ".eig"))
        .string();
}

// WEYLLAB_CACHE_DIR, when set and nonempty, wins over the configured
// directory; the out-of-band switch for relocating heavy artifacts.
inline std::string resolve_cache_dir(const std::string& configured) {
    const char* env = std::getenv("WEYLLAB_CACHE_DIR");
    if (env != nullptr && env[0] != '\0') return env;
    return configured;
}

namespace detail {

constexpr std::uint32_t cache_version = 1;

inline bool machine_is_little_endian() {
    const std::uint32_t probe = 1;
    unsigned char first;
    std::memcpy(&first, &probe, 1);
    return first == 1;
}

inline void cache_warn(const std::string& path, const std::string& reason) {
    std::cerr << "cache: ignoring " << path << ": " << reason << "\n";
}

}  // namespace detail

inline bool store_spectral(const std::string& dir, const SpectralData& sd) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    nlohmann::json meta = {
        {"identity", sd.identity()},
        {"dim", sd.dim()},
        {"cutoff", sd.basis().cutoff},
        {"count", sd.size()},
        {"endian", detail::machine_is_little_endian() ? "little" : "big"},
    };
    const std::string meta_bytes = meta.dump();

    const std::string final_path = cache_path(dir, sd.identity());
    const std::string tmp_path =
        final_path + ".tmp." +
        std::to_string(std::chrono::steady_clock::now().time_since_epoch().count());
    {
        std::ofstream out(tmp_path, std::ios::binary | std::ios::trunc);
        if (!out) return false;
        out.write("WEYL", 4);
        const std::uint32_t version = detail::cache_version;
        out.write(reinterpret_cast<const char*>(&version), sizeof version);
        const std::uint64_t mlen = meta_bytes.size();
        out.write(reinterpret_cast<const char*>(&mlen), sizeof mlen);
        out.write(meta_bytes.data(), static_cast<std::streamsize>(mlen));
        const auto& ev = sd.raw_eigenvalues();
        out.write(reinterpret_cast<const char*>(ev.data()),
                  static_cast<std::streamsize>(ev.size() * sizeof(double)));
        const auto& vecs = sd.vectors();
        out.write(reinterpret_cast<const char*>(vecs.data()),
                  static_cast<std::streamsize>(vecs.size() * sizeof(double)));
        if (!out) {
            out.close();
            fs::remove(tmp_path, ec);
            return false;
        }
    }
    fs::rename(tmp_path, final_path, ec);
    if (ec) {
        fs::remove(tmp_path, ec);
        return false;
    }
    return true;
}

inline std::optional<SpectralData> load_spectral(const std::string& dir,
                                                 const std::string& identity) {
    const std::string path = cache_path(dir, identity);
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;  // plain miss, no warning

    char magic[4];
    std::uint32_t version = 0;
    std::uint64_t mlen = 0;
    if (!in.read(magic, 4) || std::memcmp(magic, "WEYL", 4) != 0) {
        detail::cache_warn(path, "bad magic");
        return std::nullopt;
    }
    if (!in.read(reinterpret_cast<char*>(&version), sizeof version) ||
        version != detail::cache_version) {
        detail::cache_warn(path, "unsupported version " + std::to_string(version));
        return std::nullopt;
    }
    if (!in.read(reinterpret_cast<char*>(&mlen), sizeof mlen) ||
        mlen > (1ull << 20)) {
        detail::cache_warn(path, "implausible metadata length");
        return std::nullopt;
    }
    std::string meta_bytes(mlen, '\0');
    if (!in.read(meta_bytes.data(), static_cast<std::streamsize>(mlen))) {
        detail::cache_warn(path, "truncated metadata");
        return std::nullopt;
    }
    nlohmann::json meta = nlohmann::json::parse(meta_bytes, nullptr, false);
    if (meta.is_discarded() || !meta.is_object()) {
        detail::cache_warn(path, "unparseable metadata");
        return std::nullopt;
    }

    try {
        if (meta.at("identity").get<std::string>() != identity) {
            detail::cache_warn(path, "identity mismatch (key collision)");
            return std::nullopt;
        }
        if (meta.at("endian").get<std::string>() !=
            (detail::machine_is_little_endian() ? "little" : "big")) {
            detail::cache_warn(path, "foreign byte order");
            return std::nullopt;
        }
        const int dim = meta.at("dim").get<int>();
        const double cutoff = meta.at("cutoff").get<double>();
        const std::size_t count = meta.at("count").get<std::size_t>();

        LatticeBasis basis = enumerate_ball(dim, cutoff);
        if (basis.points.size() != count) {
            detail::cache_warn(path, "basis size mismatch");
            return std::nullopt;
        }
        std::vector<double> ev(count), vecs(count * count);
        if (!in.read(reinterpret_cast<char*>(ev.data()),
                     static_cast<std::streamsize>(count * sizeof(double))) ||
            !in.read(reinterpret_cast<char*>(vecs.data()),
                     static_cast<std::streamsize>(count * count * sizeof(double)))) {
            detail::cache_warn(path, "truncated payload");
            return std::nullopt;
        }
        // A well-formed file ends exactly here.
        if (in.peek() != std::ifstream::traits_type::eof()) {
            detail::cache_warn(path, "trailing bytes");
            return std::nullopt;
        }
        return SpectralData::from_parts(std::move(basis), std::move(ev),
                                        std::move(vecs), identity);
    } catch (const std::exception& e) {
        detail::cache_warn(path, e.what());
        return std::nullopt;
    }
}

struct CachedDecompose {
    SpectralData data;
    bool hit = false;
    std::string path;
};

// Cache-through decompose: the identity is derived exactly as the
// direct eigensolve would derive it, so hit and cold runs agree bit
// for bit on the stored arrays.
inline CachedDecompose decompose_cached(LatticeBasis basis, const FourierTable& table,
                                        const std::string& dir,
                                        long long basis_cap = 6000) {
    const std::string identity = spectral_identity(basis, table);
    if (auto cached = load_spectral(dir, identity))
        return {std::move(*cached), true, cache_path(dir, identity)};
    SpectralData sd = decompose(std::move(basis), table, basis_cap);
    store_spectral(dir, sd);
    return {std::move(sd), false, cache_path(dir, identity)};
}

}  // namespace weyllab
