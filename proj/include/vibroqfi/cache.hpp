// cache.hpp - on-disk store of TDMs and their derivatives
//
// File layout, little-endian:
//   "VQF1" | u32 version | u32 N | f64 tau0 | f64 tau_end | f64 p | 32-byte key
//   followed by N*N (Re, Im) f64 pairs, column-major.
// p is p_loss for a TDM and dp_loss for a derivative. Files are named by the
// hex key and written through a temporary file and a rename.

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "vibroqfi/scatter.hpp"

namespace vibroqfi {

inline constexpr const char* kCacheEnv = "VIBROQFI_CACHE_DIR";

struct CachedMatrix {
    TimeGrid grid;
    Matrix m;
    double p{0.0};
};

// Environment override, then the configured directory, then $XDG_CACHE_HOME or ~/.cache.
std::filesystem::path cache_directory(const std::string& configured = "");

class TdmCache {
public:
    explicit TdmCache(std::filesystem::path dir);

    // Missing file: nullopt. Damaged or mismatching file: nullopt plus a warning.
    std::optional<CachedMatrix> load(const Fingerprint& key, const TimeGrid& grid,
                                     std::vector<std::string>* warnings = nullptr) const;
    void store(const Fingerprint& key, const CachedMatrix& entry) const;

    std::filesystem::path path_for(const Fingerprint& key) const;
    const std::filesystem::path& dir() const { return dir_; }

private:
    std::filesystem::path dir_;
};

} // namespace vibroqfi
